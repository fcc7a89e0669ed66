// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/core.h>

#include "homwalk/errors.hpp"
#include "homwalk/experiments.hpp"

namespace homwalk
{
namespace
{
// Heights at each n of n_list (sorted) along walks from x0.
std::vector<double> walk_heights(FiniteSupportMeasure const& mu, SpacePoint const& x0,
                                 std::vector<int> const& ns, std::size_t trials,
                                 std::uint64_t first_index, HeightParams const& height_params,
                                 Seed const& seed)
{
    std::vector<double> out(trials * ns.size());
    int n_max = ns.back();
    parallel_trials(trials, [&](std::size_t t) {
        auto rng = make_rng(seed, Purpose::walk, first_index + t);
        SpacePoint p = x0;
        std::size_t next = 0;
        for (int k = 0; k <= n_max; ++k)
        {
            if (k > 0)
                p = walk_step(mu, p, rng);
            while (next < ns.size() && ns[next] == k)
                out[t * ns.size() + next++] = height(p, height_params);
        }
    });
    return out;
}

std::vector<int> sorted_steps(std::vector<int> ns, char const* what)
{
    std::sort(ns.begin(), ns.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
    if (ns.empty() || ns.front() < 0)
        throw Error(fmt::format("{}: step list must be nonempty and nonnegative", what));
    return ns;
}
}  // namespace

ExperimentReport non_divergence(FiniteSupportMeasure const& mu, SpacePoint const& x0,
                                NonDivergenceParams const& params, Seed const& seed)
{
    ExperimentReport rep;
    rep.name = "nondiv";
    auto ns = sorted_steps(params.n_list, "nondiv");
    auto hs = params.h_grid;
    std::sort(hs.begin(), hs.end());
    if (hs.empty() || hs.front() < 1)
        throw Error("nondiv: h_grid must be nonempty with h >= 1");
    double ht0 = height(x0, params.height);

    auto& tab = rep.table("nondiv", {"set", "n", "h", "count", "trials", "tail", "tail_se",
                                     "ratio", "ratio_se"});
    struct Cellv
    {
        double ratio, se;
    };
    auto run = [&](std::string const& set, std::size_t trials, std::uint64_t first) {
        std::vector<std::vector<Cellv>> grid(ns.size(), std::vector<Cellv>(hs.size()));
        if (trials == 0)
            return grid;
        auto hts = walk_heights(mu, x0, ns, trials, first, params.height, seed);
        for (std::size_t j = 0; j < ns.size(); ++j)
        {
            for (std::size_t i = 0; i < hs.size(); ++i)
            {
                std::size_t k = 0;
                for (std::size_t t = 0; t < trials; ++t)
                    k += hts[t * ns.size() + j] >= hs[i];
                double p = double(k) / double(trials);
                double se = std::sqrt(p * (1 - p) / double(trials));
                double ratio = p * hs[i] / ht0;
                double rse = se * hs[i] / ht0;
                tab.add({set, std::int64_t{ns[j]}, hs[i], std::int64_t(k),
                         std::int64_t(trials), p, se, ratio, rse});
                grid[j][i] = {ratio, rse};
            }
        }
        return grid;
    };
    auto train = run("train", params.trials, 0);
    auto hold = run("holdout", params.holdout_trials, params.trials);

    double c_hat = 0;
    for (auto const& row : train)
        for (auto const& c : row)
            c_hat = std::max(c_hat, c.ratio);
    rep.scalar("C_hat", c_hat);

    double worst = 0;
    for (std::size_t i = 0; i < hs.size(); ++i)
    {
        double lo = std::numeric_limits<double>::infinity(), hi = 0;
        for (std::size_t j = 0; j < ns.size(); ++j)
        {
            lo = std::min(lo, train[j][i].ratio);
            hi = std::max(hi, train[j][i].ratio);
        }
        double spread = lo > 0 ? hi / lo : std::numeric_limits<double>::infinity();
        rep.scalar(fmt::format("spread_h{}", hs[i]), spread);
        worst = std::max(worst, spread);
    }
    rep.verdict("ratio_spread_across_n", worst <= params.max_spread, worst, params.max_spread,
                "max over h of (max over n) / (min over n) of tail h / ht(x0)");

    if (params.holdout_trials > 0)
    {
        double excess = -std::numeric_limits<double>::infinity();
        for (auto const& row : hold)
            for (auto const& c : row)
                excess = std::max(excess, c.ratio - c_hat - params.holdout_sigmas * c.se);
        rep.verdict("holdout_below_C_hat", excess <= 0, excess, 0.0,
                    fmt::format("holdout ratio - C_hat - {} se", params.holdout_sigmas));
    }
    return rep;
}

//---------------------------------------------------------------------------//
ExperimentReport contraction_check(FiniteSupportMeasure const& mu,
                                   ContractionParams const& params, Seed const& seed)
{
    ExperimentReport rep;
    rep.name = "contraction";
    auto ns = sorted_steps(params.n_list, "contraction");
    if (!(params.height_lo >= 1 && params.height_hi >= params.height_lo))
        throw Error("contraction: need 1 <= height_lo <= height_hi");
    if (params.points < 3 || params.walk_trials < 2)
        throw Error("contraction: need at least 3 points and 2 walk trials");

    std::size_t total = params.points + params.holdout_points;
    std::vector<SpacePoint> starts;
    auto rng = make_rng(seed, Purpose::centers);
    double llo = std::log(params.height_lo), lhi = std::log(params.height_hi);
    for (std::size_t i = 0; i < total; ++i)
    {
        double h = std::exp(rng.uniform(llo, lhi));
        double y = std::max(1.0, std::pow(h, 2 / params.height.kappa));
        starts.push_back(point_from_iwasawa(rng.uniform(-0.5, 0.5), y,
                                            rng.uniform(0, std::numbers::pi)));
    }

    // mean and standard error of ht(Y_N) per (point, N)
    std::vector<MeanAccumulator> acc(total * ns.size());
    for (std::size_t i = 0; i < total; ++i)
    {
        auto hts = walk_heights(mu, starts[i], ns, params.walk_trials,
                                i * params.walk_trials, params.height, seed);
        for (std::size_t t = 0; t < params.walk_trials; ++t)
            for (std::size_t j = 0; j < ns.size(); ++j)
                acc[i * ns.size() + j].add(hts[t * ns.size() + j]);
    }

    auto& tab = rep.table("contraction", {"set", "point", "N", "ht_x", "mean_ht", "se"});
    for (std::size_t j = 0; j < ns.size(); ++j)
    {
        for (std::size_t i = 0; i < total; ++i)
        {
            auto const& a = acc[i * ns.size() + j];
            tab.add({std::string(i < params.points ? "train" : "holdout"), std::int64_t(i),
                     std::int64_t{ns[j]}, height(starts[i], params.height), a.mean(),
                     a.std_error()});
        }
    }

    double worst_sat = 1;
    std::vector<double> a_hat;
    for (std::size_t j = 0; j < ns.size(); ++j)
    {
        std::vector<double> x, y;
        for (std::size_t i = 0; i < params.points; ++i)
        {
            x.push_back(height(starts[i], params.height));
            y.push_back(acc[i * ns.size() + j].mean());
        }
        auto fit = ols(x, y);
        rep.fits.push_back({fmt::format("contraction_N{}", ns[j]), "ht(x)", "E ht(Y_N)", fit,
                            params.confidence});
        rep.scalar(fmt::format("a_hat_N{}", ns[j]), fit.slope);
        rep.scalar(fmt::format("b_hat_N{}", ns[j]), fit.intercept);
        a_hat.push_back(fit.slope);
        if (j + 1 == ns.size())
        {
            double ub = fit.slope_se > 0 ? fit.slope_upper_bound(params.confidence) : fit.slope;
            rep.verdict(fmt::format("a_hat_below_one_N{}", ns[j]), ub < 1, ub, 1.0,
                        fmt::format("one-sided {} upper bound of the slope", params.confidence));
        }
        // Upper envelope: the fitted slope with the largest train excess
        // (plus two standard errors) as intercept
        double b_env = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < params.points; ++i)
        {
            auto const& a = acc[i * ns.size() + j];
            b_env = std::max(b_env, a.mean() + 2 * a.std_error() - fit.slope * x[i]);
        }
        rep.scalar(fmt::format("b_envelope_N{}", ns[j]), b_env);
        if (params.holdout_points > 0)
        {
            double a = fit.slope + params.slack;
            double b = b_env + params.slack * std::abs(b_env);
            std::size_t ok = 0;
            for (std::size_t i = params.points; i < total; ++i)
            {
                double hx = height(starts[i], params.height);
                // Small absolute slack absorbs rounding when the map is exact
                ok += acc[i * ns.size() + j].mean() <= a * hx + b + 1e-9;
            }
            double sat = double(ok) / double(params.holdout_points);
            rep.scalar(fmt::format("holdout_satisfaction_N{}", ns[j]), sat);
            worst_sat = std::min(worst_sat, sat);
        }
    }
    if (params.holdout_points > 0)
        rep.verdict("holdout_satisfaction", worst_sat >= params.min_satisfaction, worst_sat,
                    params.min_satisfaction);
    rep.scalar("a_hat_first_minus_last", a_hat.front() - a_hat.back());
    return rep;
}

LogLipschitzResult height_log_lipschitz(std::size_t samples, double margin,
                                        HeightParams const& height_params, Seed const& seed)
{
    std::vector<double> excess(samples);
    parallel_trials(samples, [&](std::size_t i) {
        auto rng = make_rng(seed, Purpose::pairs, i);
        GroupElement g;
        do
        {
            g = exp_map({{0.4 * rng.normal(), 0.4 * rng.normal(), 0.4 * rng.normal()}});
        } while (rho(g) > 1);
        SpacePoint p = haar_draw(1e3, rng);
        double ratio = height(act(g, p), height_params) / height(p, height_params);
        excess[i] = std::abs(std::log(ratio)) - (2 * rho(g) + margin);
    });
    LogLipschitzResult res{samples, 0, -std::numeric_limits<double>::infinity()};
    for (double e : excess)
    {
        res.violations += e > 0;
        res.worst_excess = std::max(res.worst_excess, e);
    }
    return res;
}

}  // namespace homwalk
