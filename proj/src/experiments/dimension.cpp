// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/core.h>

#include "homwalk/errors.hpp"
#include "homwalk/experiments.hpp"
#include "homwalk/point_index.hpp"

namespace homwalk
{
namespace
{
// Closest reported distance per atom within D; PointIndex may repeat ids.
std::vector<std::pair<std::uint32_t, double>>
ball_atoms(PointIndex const& idx, SpacePoint const& q, double D)
{
    std::vector<std::pair<std::uint32_t, double>> hits;
    idx.query(q, D, [&](std::uint32_t id, double d) {
        hits.emplace_back(id, d);
        return true;
    });
    std::sort(hits.begin(), hits.end());
    hits.erase(std::unique(hits.begin(), hits.end(),
                           [](auto const& a, auto const& b) { return a.first == b.first; }),
               hits.end());
    return hits;
}

PointIndex index_atoms(std::vector<SpaceAtom> const& nu, double side)
{
    PointIndex idx(side);
    for (auto const& a : nu)
        idx.insert(a.p);
    return idx;
}

std::vector<double> sorted_deltas(std::vector<double> ds, char const* what)
{
    std::sort(ds.begin(), ds.end());
    ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
    if (ds.empty() || !(ds.front() > 0))
        throw InvalidRadius(fmt::format("{}: delta grid must be nonempty and positive", what));
    return ds;
}

double quantile(std::vector<double> v, double q)
{
    std::sort(v.begin(), v.end());
    double pos = q * double(v.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    auto hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - double(lo)) * (v[hi] - v[lo]);
}
}  // namespace

ExperimentReport flattening_estimate(FiniteSupportMeasure const& mu_d,
                                     FlatteningParams const& params, Seed const& seed)
{
    ExperimentReport rep;
    rep.name = "flatten";
    auto ds = sorted_deltas(params.delta_grid, "flatten");
    auto ns = params.n_list;
    std::sort(ns.begin(), ns.end());
    if (ns.empty() || ns.front() < 0)
        throw Error("flatten: n_list must be nonempty and nonnegative");

    auto& tab = rep.table("flatten", {"n", "delta", "atoms", "centers", "sup_mass", "volume",
                                      "volume_se", "sup_density", "gamma_hat"});
    // sup density per (delta, n)
    std::vector<std::vector<double>> sup(ds.size());
    for (int n : ns)
    {
        auto mu_n = convolution_power(mu_d, n, params.atom_budget);
        auto const& atoms = mu_n.atoms();
        // Base centers: heaviest atoms, then uniformly drawn atoms
        std::vector<std::size_t> order(atoms.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return atoms[a].w > atoms[b].w;
        });
        std::vector<std::size_t> base(order.begin(),
                                      order.begin() + std::min(order.size(), params.top_atoms));
        auto rng = make_rng(seed, Purpose::centers, static_cast<std::uint64_t>(n));
        for (std::size_t i = 0; i < params.random_atoms; ++i)
            base.push_back(static_cast<std::size_t>(rng.below(atoms.size())));

        for (std::size_t di = 0; di < ds.size(); ++di)
        {
            double delta = ds[di];
            GroupIndex idx(delta);
            for (auto const& a : atoms)
                idx.insert(a.g);
            std::vector<GroupElement> centers;
            auto prng = make_rng(seed, Purpose::perturb,
                                 static_cast<std::uint64_t>(n) * 1000 + di);
            for (auto b : base)
            {
                centers.push_back(atoms[b].g);
                for (int k = 0; k < params.perturbations; ++k)
                {
                    double s = delta / 2;
                    LieVector v{{s * prng.normal(), s * prng.normal(), s * prng.normal()}};
                    centers.push_back(mul(atoms[b].g, exp_map(v)));
                }
            }
            std::vector<double> mass(centers.size(), 0);
            parallel_trials(centers.size(), [&](std::size_t c) {
                double m = 0;
                idx.query(centers[c], delta, [&](std::uint32_t id, double d) {
                    if (d < delta)
                        m += atoms[id].w;
                });
                mass[c] = m;
            });
            double best = *std::max_element(mass.begin(), mass.end());
            auto vol = haar_ball_volume_estimate(delta);
            double dens = best / vol.value;
            double gamma = std::log(dens) / std::log(1 / delta);
            tab.add({std::int64_t{n}, delta, std::int64_t(atoms.size()),
                     std::int64_t(centers.size()), best, vol.value, vol.std_error, dens, gamma});
            sup[di].push_back(dens);
        }
    }

    // Monotonicity in n, skipping the Dirac mass at n = 0
    bool non_increasing = true, decreasing = true;
    double worst = 0;
    for (std::size_t di = 0; di < ds.size(); ++di)
    {
        auto vol = haar_ball_volume_estimate(ds[di]);
        double tol = params.volume_tolerance * vol.std_error / vol.value;
        for (std::size_t j = 1; j < ns.size(); ++j)
        {
            if (ns[j - 1] == 0)
                continue;
            double ratio = sup[di][j] / sup[di][j - 1];
            worst = std::max(worst, ratio);
            non_increasing = non_increasing && ratio <= 1 + tol;
            decreasing = decreasing && ratio < 1;
        }
    }
    rep.verdict("sup_density_non_increasing", non_increasing, worst, 1.0,
                "largest ratio of consecutive sup densities in n");
    rep.verdict("gamma_decreasing", decreasing, worst, 1.0,
                "strict decrease of gamma_hat in n at every delta");
    return rep;
}

//---------------------------------------------------------------------------//
ExperimentReport high_dimension(FiniteSupportMeasure const& mu_d, SpacePoint const& x0,
                                HighDimensionParams const& params, Seed const& seed)
{
    ExperimentReport rep;
    rep.name = "dimension";
    auto ds = sorted_deltas(params.delta_grid, "dimension");
    if (ds.size() < 3)
        throw Error("dimension: need at least 3 radii for a slope");
    auto nu = pushforward(convolution_power(mu_d, params.n, params.atom_budget), x0);
    double side = std::sqrt(ds.front() * ds.back());
    auto idx = index_atoms(nu, side);
    double d_min = ds.front(), d_max = ds.back();

    // Haar draws in deterministic batches, accepted in index order
    std::vector<SpacePoint> centers;
    std::size_t draws = 0;
    constexpr std::size_t kBatch = 8192;
    while (centers.size() < params.centers && draws < params.max_draws)
    {
        std::size_t batch = std::min(kBatch, params.max_draws - draws);
        std::vector<SpacePoint> cand(batch);
        std::vector<std::uint8_t> ok(batch, 0);
        parallel_trials(batch, [&](std::size_t i) {
            auto rng = make_rng(seed, Purpose::centers, draws + i);
            cand[i] = haar_draw(params.y_max, rng);
            ok[i] = idx.nearest(cand[i], d_min) != kNoDistance;
        });
        for (std::size_t i = 0; i < batch && centers.size() < params.centers; ++i)
        {
            if (ok[i])
                centers.push_back(cand[i]);
            ++draws;
        }
    }
    rep.scalar("haar_draws", double(draws));
    rep.scalar("acceptance_rate", draws ? double(centers.size()) / double(draws) : 0.0);
    rep.scalar("atoms", double(nu.size()));
    if (centers.size() < 3)
    {
        rep.verdict("median_slope", false, 0.0, params.min_median_slope,
                    "fewer than 3 centers with mass at the smallest radius");
        return rep;
    }

    std::vector<std::vector<double>> mass(centers.size(), std::vector<double>(ds.size(), 0));
    std::vector<std::vector<std::int64_t>> count(centers.size(),
                                                 std::vector<std::int64_t>(ds.size(), 0));
    parallel_trials(centers.size(), [&](std::size_t c) {
        for (auto const& [id, d] : ball_atoms(idx, centers[c], d_max))
        {
            for (std::size_t k = 0; k < ds.size(); ++k)
            {
                if (d <= ds[k])
                {
                    mass[c][k] += nu[id].w;
                    count[c][k] += 1;
                }
            }
        }
    });

    auto& tab = rep.table("dimension", {"center", "x", "y", "theta", "delta", "mass", "atoms"});
    auto& st = rep.table("dimension_slopes", {"center", "slope", "intercept", "r2"});
    std::vector<double> slopes;
    std::vector<double> ld;
    for (double d : ds)
        ld.push_back(std::log(d));
    for (std::size_t c = 0; c < centers.size(); ++c)
    {
        std::vector<double> lm;
        for (std::size_t k = 0; k < ds.size(); ++k)
        {
            tab.add({std::int64_t(c), centers[c].x, centers[c].y, centers[c].theta, ds[k],
                     mass[c][k], count[c][k]});
            lm.push_back(std::log(mass[c][k]));
        }
        auto fit = ols(ld, lm);
        st.add({std::int64_t(c), fit.slope, fit.intercept, fit.r2});
        slopes.push_back(fit.slope);
    }
    double med = quantile(slopes, 0.5);
    rep.scalar("slope_min", *std::min_element(slopes.begin(), slopes.end()));
    rep.scalar("slope_q25", quantile(slopes, 0.25));
    rep.scalar("slope_median", med);
    rep.scalar("slope_q75", quantile(slopes, 0.75));
    rep.scalar("centers", double(centers.size()));
    rep.verdict("median_slope", med >= params.min_median_slope, med,
                params.min_median_slope);
    if (centers.size() < params.centers)
        rep.note = fmt::format("only {} centers after {} draws", centers.size(), draws);
    return rep;
}

//---------------------------------------------------------------------------//
std::vector<double> smoothed_density(std::vector<SpaceAtom> const& nu, double delta,
                                     double eta, double e1, double kappa1,
                                     std::vector<SpacePoint> const& eval_points,
                                     HeightParams const& height_params)
{
    if (!(delta > 0 && delta < 1 && eta > 0 && eta < 1))
        throw Error("smoothed_density: need delta and eta in (0, 1)");
    auto idx = index_atoms(nu, delta);
    double cutoff = e1 * std::pow(delta, -kappa1 * eta);
    double vol = haar_ball_volume(delta);
    std::vector<double> out(eval_points.size(), 0);
    parallel_trials(eval_points.size(), [&](std::size_t i) {
        auto const& p = eval_points[i];
        if (height(p, height_params) > cutoff)
            return;
        double m = 0;
        for (auto const& [id, d] : ball_atoms(idx, p, delta))
            if (d < delta)
                m += nu[id].w;
        out[i] = m / vol;
    });
    return out;
}

ExperimentReport smoothed_density_check(FiniteSupportMeasure const& mu_d,
                                        SpacePoint const& x0, SmoothedParams const& params,
                                        Seed const& seed)
{
    ExperimentReport rep;
    rep.name = "smoothed";
    auto nu = pushforward(convolution_power(mu_d, params.n, params.atom_budget), x0);
    auto pts = haar_sample(params.haar_samples, params.y_max, seed);
    auto h = smoothed_density(nu, params.delta, params.eta, params.e1, params.kappa1, pts);
    double keep = 1 - haar_truncation_deficit(params.y_max);
    double cutoff = params.e1 * std::pow(params.delta, -params.kappa1 * params.eta);

    MeanAccumulator hm;
    for (double v : h)
        hm.add(v);
    double integral = keep * hm.mean(), integral_se = keep * hm.std_error();
    rep.scalar("integral_h", integral);
    rep.scalar("integral_h_se", integral_se);
    rep.scalar("cutoff", cutoff);
    rep.verdict("integral_at_most_one", integral <= 1 + params.mass_sigmas * integral_se,
                integral, 1.0, fmt::format("plus {} se", params.mass_sigmas));

    double ht0 = height(x0);
    auto fs = default_test_functions(params.functions);
    auto& tab = rep.table("smoothed", {"function", "lhs", "rhs", "rhs_se", "residual", "bound",
                                       "lipschitz"});
    double worst = -std::numeric_limits<double>::infinity();
    for (auto const& f : fs)
    {
        double lhs = 0;
        for (auto const& a : nu)
            if (height(a.p) <= cutoff)
                lhs += a.w * f(a.p);
        std::vector<double> fh(pts.size(), 0);
        parallel_trials(pts.size(), [&](std::size_t i) {
            if (h[i] != 0)
                fh[i] = f(pts[i]) * h[i];
        });
        MeanAccumulator acc;
        for (double v : fh)
            acc.add(v);
        double rhs = keep * acc.mean(), rhs_se = keep * acc.std_error();
        double residual = std::abs(lhs - rhs);
        double bound = params.c_hat
                       * (params.delta * f.lipschitz_bound()
                          + ht0 * std::pow(params.delta, params.kappa1 * params.eta)
                                * f.sup_norm());
        tab.add({f.label(), lhs, rhs, rhs_se, residual, bound, f.lipschitz_bound()});
        worst = std::max(worst, residual - bound);
    }
    rep.verdict("residual_within_bound", worst <= 0, worst, 0.0,
                "max over functions of residual - bound");
    return rep;
}

}  // namespace homwalk
