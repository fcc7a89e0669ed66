// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#include "homwalk/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "homwalk/errors.hpp"

namespace homwalk
{
namespace
{
double frobenius(GroupElement const& g)
{
    return std::sqrt(g.a * g.a + g.b * g.b + g.c * g.c + g.d * g.d);
}

// Largest projection gap between two elements closer than tol: entries
// move by at most |u - I| |h| <= 1.6 tol |h|_F and the projection weights
// sum to less than 2.7.
double window(GroupElement const& g, double tol)
{
    return 5 * tol * (frobenius(g) + 1);
}

bool atom_less(Atom const& x, double px, Atom const& y, double py)
{
    if (px != py)
        return px < py;
    auto kx = std::array{x.g.a, x.g.b, x.g.c, x.g.d, x.w};
    auto ky = std::array{y.g.a, y.g.b, y.g.c, y.g.d, y.w};
    return kx < ky;
}

std::vector<double> build_cdf(std::vector<Atom> const& atoms)
{
    std::vector<double> cdf(atoms.size());
    double acc = 0;
    for (std::size_t i = 0; i < atoms.size(); ++i)
    {
        acc += atoms[i].w;
        cdf[i] = acc;
    }
    return cdf;
}

FiniteSupportMeasure uniform_preset(std::vector<GroupElement> const& gens)
{
    return FiniteSupportMeasure::uniform(gens);
}
}  // namespace

double atom_projection(GroupElement const& g)
{
    return g.a + 0.3141592653589793 * g.b + 0.5772156649015329 * g.c
           + 0.7071067811865476 * g.d;
}

std::vector<Atom> merge_atoms(std::vector<Atom> atoms, double tol)
{
    std::vector<double> proj(atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i)
        proj[i] = atom_projection(atoms[i].g);
    std::vector<std::size_t> order(atoms.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return atom_less(atoms[i], proj[i], atoms[j], proj[j]);
    });

    std::vector<Atom> out;
    std::vector<double> out_proj;
    out.reserve(atoms.size());
    for (std::size_t i : order)
    {
        Atom const& at = atoms[i];
        double lo = proj[i] - window(at.g, tol);
        bool merged = false;
        for (std::size_t k = out.size(); k-- > 0 && out_proj[k] >= lo;)
        {
            if (dist(out[k].g, at.g) < tol)
            {
                out[k].w += at.w;
                merged = true;
                break;
            }
        }
        if (!merged)
        {
            out.push_back(at);
            out_proj.push_back(proj[i]);
        }
    }
    return out;
}

//---------------------------------------------------------------------------//
FiniteSupportMeasure::FiniteSupportMeasure()
    : atoms_{{GroupElement::identity(), 1.0}}, cdf_{1.0}
{
}

FiniteSupportMeasure::FiniteSupportMeasure(std::vector<Atom> atoms, double merge_tol)
    : merge_tol_(merge_tol)
{
    if (atoms.empty())
        throw Error("measure: no atoms");
    if (!(merge_tol >= 0))
        throw Error("measure: merge tolerance must be non-negative");
    double total = 0;
    for (Atom const& a : atoms)
    {
        if (!(a.w > 0))
            throw Error("measure: weights must be positive");
        if (std::abs(a.g.det() - 1) > 1e-10)
            throw Error(fmt::format("measure: atom has determinant {}", a.g.det()));
        total += a.w;
    }
    if (std::abs(total - 1) > 1e-9)
        throw Error(fmt::format("measure: weights sum to {}", total));
    for (Atom& a : atoms)
    {
        a.w /= total;
        a.g = renormalized(a.g);
    }
    atoms_ = merge_atoms(std::move(atoms), merge_tol);
    cdf_ = build_cdf(atoms_);
}

FiniteSupportMeasure::FiniteSupportMeasure(Trusted, std::vector<Atom> atoms,
                                           double merge_tol)
    : atoms_(std::move(atoms)), cdf_(build_cdf(atoms_)), merge_tol_(merge_tol)
{
}

FiniteSupportMeasure FiniteSupportMeasure::dirac(GroupElement const& g)
{
    return FiniteSupportMeasure({{g, 1.0}});
}

FiniteSupportMeasure
FiniteSupportMeasure::uniform(std::vector<GroupElement> const& elems, double merge_tol)
{
    std::vector<Atom> atoms;
    for (auto const& g : elems)
        atoms.push_back({g, 1.0 / static_cast<double>(elems.size())});
    return FiniteSupportMeasure(std::move(atoms), merge_tol);
}

double FiniteSupportMeasure::total_mass() const
{
    return cdf_.empty() ? 0.0 : cdf_.back();
}

std::size_t FiniteSupportMeasure::sample_index(double u) const
{
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u * cdf_.back());
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()),
                                 atoms_.size() - 1);
}

std::size_t FiniteSupportMeasure::find(GroupElement const& g) const
{
    double p = atom_projection(g);
    double w = window(g, merge_tol_) * 1.1 + 1e-15;
    auto lo = std::lower_bound(atoms_.begin(), atoms_.end(), p - w,
                               [](Atom const& a, double v) {
                                   return atom_projection(a.g) < v;
                               });
    std::size_t best = atoms_.size();
    double best_d = merge_tol_;
    for (auto it = lo; it != atoms_.end() && atom_projection(it->g) <= p + w; ++it)
    {
        double d = dist(it->g, g);
        if (d < best_d || (d == 0 && best == atoms_.size()))
        {
            best_d = d;
            best = static_cast<std::size_t>(it - atoms_.begin());
        }
    }
    return best;
}

FiniteSupportMeasure FiniteSupportMeasure::inverted() const
{
    std::vector<Atom> inv;
    inv.reserve(atoms_.size());
    for (Atom const& a : atoms_)
        inv.push_back({a.g.inverse(), a.w});
    return FiniteSupportMeasure(Trusted{}, merge_atoms(std::move(inv), merge_tol_),
                                merge_tol_);
}

//---------------------------------------------------------------------------//
namespace
{
std::size_t checked_count(FiniteSupportMeasure const& mu,
                          FiniteSupportMeasure const& nu, std::size_t budget)
{
    std::size_t n = mu.size() * nu.size();
    if (n > budget)
    {
        throw AtomBudgetExceeded(fmt::format(
            "convolve: {} x {} products exceed the atom budget {}", mu.size(),
            nu.size(), budget));
    }
    return n;
}
}  // namespace

FiniteSupportMeasure convolve(FiniteSupportMeasure const& mu,
                              FiniteSupportMeasure const& nu, std::size_t budget)
{
    std::size_t n = checked_count(mu, nu, budget);
    auto const& ma = mu.atoms();
    auto const& na = nu.atoms();
    std::vector<Atom> prod(n);
    auto m = static_cast<std::int64_t>(ma.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < m; ++i)
    {
        auto base = static_cast<std::size_t>(i) * na.size();
        for (std::size_t j = 0; j < na.size(); ++j)
            prod[base + j] = {mul(ma[i].g, na[j].g), ma[i].w * na[j].w};
    }
    double tol = std::max(mu.merge_tol(), nu.merge_tol());
    return FiniteSupportMeasure(FiniteSupportMeasure::Trusted{},
                                merge_atoms(std::move(prod), tol), tol);
}

FiniteSupportMeasure convolve_serial(FiniteSupportMeasure const& mu,
                                     FiniteSupportMeasure const& nu,
                                     std::size_t budget)
{
    std::size_t n = checked_count(mu, nu, budget);
    std::vector<Atom> prod;
    prod.reserve(n);
    for (Atom const& x : mu.atoms())
        for (Atom const& y : nu.atoms())
            prod.push_back({mul(x.g, y.g), x.w * y.w});
    double tol = std::max(mu.merge_tol(), nu.merge_tol());
    return FiniteSupportMeasure(FiniteSupportMeasure::Trusted{},
                                merge_atoms(std::move(prod), tol), tol);
}

FiniteSupportMeasure convolution_power(FiniteSupportMeasure const& mu, int n,
                                       std::size_t budget)
{
    if (n < 0)
        throw Error("convolution_power: negative exponent");
    if (n == 0)
        return FiniteSupportMeasure::dirac(GroupElement::identity());
    FiniteSupportMeasure acc = mu;
    for (int k = 1; k < n; ++k)
        acc = convolve(acc, mu, budget);
    return acc;
}

double total_variation(FiniteSupportMeasure const& mu, FiniteSupportMeasure const& nu)
{
    double tv = 0;
    std::vector<char> matched(nu.size(), 0);
    for (Atom const& a : mu.atoms())
    {
        std::size_t j = nu.find(a.g);
        if (j == nu.size())
        {
            tv += a.w;
            continue;
        }
        matched[j] = 1;
        tv += std::abs(a.w - nu.atoms()[j].w);
    }
    for (std::size_t j = 0; j < nu.size(); ++j)
        if (!matched[j])
            tv += nu.atoms()[j].w;
    return tv / 2;
}

double support_radius(FiniteSupportMeasure const& mu)
{
    double r = 0;
    for (Atom const& a : mu.atoms())
        r = std::max(r, rho(a.g));
    return r;
}

bool is_symmetric(FiniteSupportMeasure const& mu)
{
    for (Atom const& a : mu.atoms())
    {
        std::size_t j = mu.find(a.g.inverse());
        if (j == mu.size() || std::abs(mu.atoms()[j].w - a.w) > 1e-9)
            return false;
    }
    return true;
}

//---------------------------------------------------------------------------//
GroupElement rot35()
{
    return {0.6, -0.8, 0.8, 0.6};
}

std::vector<std::string> const& preset_names()
{
    static std::vector<std::string> const names{
        "identity", "unipotents-rot35", "rot35-unipotent-scaled", "diagonal"};
    return names;
}

FiniteSupportMeasure generator_preset(std::string_view name, double scale)
{
    if (auto open = name.find('('); open != std::string_view::npos)
    {
        if (name.back() != ')')
            throw UnknownPreset(fmt::format("preset '{}': missing ')'", name));
        std::string arg(name.substr(open + 1, name.size() - open - 2));
        try
        {
            std::size_t used = 0;
            scale = std::stod(arg, &used);
            if (used != arg.size())
                throw std::invalid_argument(arg);
        }
        catch (std::exception const&)
        {
            throw UnknownPreset(fmt::format("preset '{}': bad scale", name));
        }
        name = name.substr(0, open);
    }
    if (name == "identity")
        return FiniteSupportMeasure();
    if (!(scale > 0) || !std::isfinite(scale))
        throw UnknownPreset(fmt::format("preset '{}': scale must be positive", name));
    if (name == "unipotents-rot35")
    {
        GroupElement r = rot35();
        return uniform_preset({upper_unipotent(scale), upper_unipotent(-scale),
                               lower_unipotent(scale), lower_unipotent(-scale), r,
                               r.inverse()});
    }
    if (name == "rot35-unipotent-scaled")
    {
        double s = 0.8 * scale;
        double tau = 0.4 * scale;
        double den = 1 + tau * tau;
        GroupElement r{(1 - tau * tau) / den, -2 * tau / den, 2 * tau / den,
                       (1 - tau * tau) / den};
        return uniform_preset({upper_unipotent(s), upper_unipotent(-s),
                               lower_unipotent(s), lower_unipotent(-s), r,
                               r.inverse()});
    }
    if (name == "diagonal")
    {
        // exp(+-(eps / 2) H), at distance exactly eps from I
        return uniform_preset({diagonal(scale), diagonal(-scale)});
    }
    throw UnknownPreset(fmt::format("unknown preset '{}'", name));
}

std::vector<SpaceAtom> pushforward(FiniteSupportMeasure const& mu, SpacePoint const& x0)
{
    std::vector<SpaceAtom> out(mu.size());
    auto const& atoms = mu.atoms();
    auto n = static_cast<std::int64_t>(atoms.size());
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i)
        out[i] = {reduce(mul(atoms[i].g, x0.rep)), atoms[i].w};
    return out;
}

}  // namespace homwalk
