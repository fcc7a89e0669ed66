// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#include "homwalk/subgroups.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/minima.hpp>
#include <fmt/core.h>

namespace homwalk
{
namespace
{
constexpr double kPi = std::numbers::pi;
constexpr int kScan = 160;
constexpr int kBits = 45;

GroupElement conjugate(GroupElement const& c, GroupElement const& h)
{
    return mul(mul(c, h), c.inverse());
}

// Period of s -> exp(s v) for elliptic v, else 0.
double period(LieVector const& v)
{
    auto [p, q, r] = v.coef;
    double neg_det = p * p + q * r;  // X^2 = neg_det I
    return neg_det < 0 ? 2 * kPi / std::sqrt(-neg_det) : 0.0;
}

// Minimize f on [lo, hi] by scan then Brent around the best scan point.
template<class F>
double scan_min(F&& f, double lo, double hi)
{
    double step = (hi - lo) / kScan;
    int best_k = 0;
    double best = f(lo);
    for (int k = 1; k <= kScan; ++k)
    {
        double v = f(lo + k * step);
        if (v < best)
        {
            best = v;
            best_k = k;
        }
    }
    double a = lo + std::max(0, best_k - 1) * step;
    double b = lo + std::min(kScan, best_k + 1) * step;
    auto r = boost::math::tools::brent_find_minima(f, a, b, kBits);
    return std::min(best, r.second);
}

// Minimize over s in R through u = asinh(s / scale), expanding the range
// until rho(h(s)) clearly exceeds what any minimizer can have.
template<class F, class Size>
double line_min(F&& f, Size&& size_of, double budget)
{
    double U = 1;
    while (U < 40 && std::min(size_of(std::sinh(U)), size_of(-std::sinh(U))) < budget)
        U *= 1.5;
    return scan_min([&](double u) { return f(std::sinh(u)); }, -U, U);
}
}  // namespace

GroupElement subgroup_element(Subgroup const& h, double s, double u)
{
    GroupElement base;
    switch (h.kind)
    {
        case Subgroup::Kind::diagonal:
            base = diagonal(s);
            break;
        case Subgroup::Kind::rotation:
            base = rotation(s);
            break;
        case Subgroup::Kind::upper_unipotent:
            base = upper_unipotent(s);
            break;
        case Subgroup::Kind::lower_unipotent:
            base = lower_unipotent(s);
            break;
        case Subgroup::Kind::borel:
            base = mul(diagonal(s), upper_unipotent(u));
            break;
        case Subgroup::Kind::one_parameter:
        {
            auto v = h.direction;
            for (double& c : v.coef)
                c *= s;
            base = exp_map(v);
            break;
        }
    }
    return conjugate(h.conj, base);
}

double distance_to_subgroup(GroupElement const& g, Subgroup const& h)
{
    bool plain = h.conj == GroupElement::identity();
    if (h.kind == Subgroup::Kind::rotation && plain)
        return cartan_t(g);

    double rg = rho(g);
    // Quasi-triangle: a minimizer has rho(h) <= 2 rho(g) up to the defect
    double budget = 2.5 * rg + 2;
    auto f = [&](double s) { return dist(g, subgroup_element(h, s)); };

    if (h.kind == Subgroup::Kind::rotation)
        return std::min(rg, scan_min(f, 0, 2 * kPi));
    if (h.kind == Subgroup::Kind::one_parameter)
    {
        if (double T = period(h.direction); T > 0)
            return std::min(rg, scan_min(f, 0, T));
    }
    if (h.kind == Subgroup::Kind::borel)
    {
        auto inner = [&](double s) {
            auto fu = [&](double u) { return dist(g, subgroup_element(h, s, u)); };
            auto size_u = [&](double u) { return rho(subgroup_element(h, s, u)); };
            return line_min(fu, size_u, budget);
        };
        auto size_s = [&](double s) { return rho(subgroup_element(h, s)); };
        return std::min(rg, line_min(inner, size_s, budget));
    }
    auto size = [&](double s) { return rho(subgroup_element(h, s)); };
    return std::min(rg, line_min(f, size, budget));
}

std::vector<Subgroup> subgroup_family(int conjugates, int one_parameter, Seed const& seed)
{
    using K = Subgroup::Kind;
    std::vector<Subgroup> fam{
        {K::diagonal, {}, {}, "A"},
        {K::rotation, {}, {}, "K"},
        {K::upper_unipotent, {}, {}, "N"},
        {K::lower_unipotent, {}, {}, "N-"},
        {K::borel, {}, {}, "AN"},
    };
    auto rng = make_rng(seed, Purpose::conjugates);
    auto random_lie = [&](double scale) {
        return LieVector{{scale * rng.normal(), scale * rng.normal(), scale * rng.normal()}};
    };
    for (int i = 0; i < conjugates; ++i)
    {
        for (auto [kind, name] : {std::pair{K::diagonal, "A"}, std::pair{K::rotation, "K"},
                                  std::pair{K::upper_unipotent, "N"},
                                  std::pair{K::borel, "AN"}})
        {
            fam.push_back({kind, exp_map(random_lie(0.5)), {}, fmt::format("c{}{}", i, name)});
        }
    }
    for (int i = 0; i < one_parameter; ++i)
    {
        LieVector v = random_lie(1.0);
        double n = v.norm();
        for (double& c : v.coef)
            c /= n;
        fam.push_back({K::one_parameter, {}, v, fmt::format("exp{}", i)});
    }
    return fam;
}

DiophantineReport
diophantine_diagnostic(FiniteSupportMeasure const& mu_d, double c1, double c2, double eps,
                       std::vector<int> const& n_list, std::vector<Subgroup> const& family,
                       std::size_t atom_budget)
{
    DiophantineReport rep;
    rep.support_radius = support_radius(mu_d);
    rep.support_ok = rep.support_radius <= eps;
    for (int n : n_list)
    {
        auto mu_n = convolution_power(mu_d, n, atom_budget);
        DiophantineRow row{n, std::pow(eps, c1 * n), 0, "", std::pow(eps, c2 * n), true};
        for (auto const& h : family)
        {
            double mass = 0;
            for (auto const& a : mu_n.atoms())
                if (distance_to_subgroup(a.g, h) < row.radius)
                    mass += a.w;
            if (mass > row.sup_mass || row.argmax.empty())
            {
                row.sup_mass = mass;
                row.argmax = h.label;
            }
        }
        row.pass = row.sup_mass <= row.threshold;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace homwalk
