// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <fmt/core.h>

#include "homwalk/errors.hpp"
#include "homwalk/experiments.hpp"
#include "homwalk/point_index.hpp"

namespace homwalk
{
namespace
{
struct NetCoverage
{
    double r;
    std::vector<SpacePoint> pts;
    PointIndex index;
    std::vector<std::uint8_t> covered[2];
    std::size_t count[2]{0, 0};
    int diam{-1};
};

// Marks net points within r of any of the given points.
void mark(NetCoverage& nc, std::vector<SpacePoint> const& layer, int parity)
{
    auto& cov = nc.covered[parity];
    auto n = static_cast<std::int64_t>(layer.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i)
    {
        nc.index.query(layer[i], nc.r, [&](std::uint32_t id, double) {
#pragma omp atomic write
            cov[id] = 1;
            return true;
        });
    }
    nc.count[parity] = static_cast<std::size_t>(std::count(cov.begin(), cov.end(), 1));
}
}  // namespace

ExperimentReport diameter_estimate(FiniteSupportMeasure const& s, SpacePoint const& x0,
                                   DiameterParams const& params, Seed const& seed)
{
    ExperimentReport rep;
    rep.name = "diameter";
    auto const& rg = params.r_grid;
    if (rg.empty() || !std::is_sorted(rg.rbegin(), rg.rend())
        || std::adjacent_find(rg.begin(), rg.end()) != rg.end())
        throw Error("diameter: r_grid must be strictly descending and nonempty");
    if (!(rg.back() > 0))
        throw InvalidRadius("diameter: radii must be positive");

    std::vector<NetCoverage> nets;
    nets.reserve(rg.size());
    for (double r : rg)
    {
        NetCoverage nc{r, net(1 / r, r, params.height, seed), PointIndex(r), {}, {}, -1};
        for (auto const& p : nc.pts)
            nc.index.insert(p);
        for (auto& c : nc.covered)
            c.assign(nc.pts.size(), 0);
        nets.push_back(std::move(nc));
    }

    double r_min = rg.back();
    BfsOptions opts;
    opts.max_layers = params.max_layers;
    opts.dedup_r = r_min / params.dedup_factor;
    opts.h_cap = params.h_cap_factor / r_min;
    opts.height = params.height;
    opts.node_budget = params.node_budget;

    auto& layers = rep.table("diameter_layers",
                             {"layer", "fresh", "generated", "dedup_losses", "parked",
                              "stored", "r", "covered", "net_size"});
    auto process = [&](OrbitBfs const& bfs) {
        int len = bfs.length();
        int parity = len % 2;
        auto const& st = bfs.stats();
        for (auto& nc : nets)
        {
            if (nc.diam < 0)
            {
                mark(nc, bfs.layer(), parity);
                if (nc.count[parity] == nc.pts.size())
                    nc.diam = len;
            }
            layers.add({std::int64_t{len}, std::int64_t(st.fresh), std::int64_t(st.generated),
                        std::int64_t(st.dedup_losses), std::int64_t(st.parked),
                        std::int64_t(st.stored), nc.r, std::int64_t(nc.count[parity]),
                        std::int64_t(nc.pts.size())});
        }
    };
    auto done = [&] {
        return std::all_of(nets.begin(), nets.end(),
                           [](NetCoverage const& nc) { return nc.diam >= 0; });
    };

    int layers_run = 0;
    try
    {
        OrbitBfs bfs(s, x0, opts);
        process(bfs);
        while (!done() && bfs.advance())
        {
            process(bfs);
            layers_run = bfs.length();
        }
    }
    catch (NodeBudgetExceeded const& e)
    {
        rep.partial = true;
        rep.note = e.what();
    }

    auto& tab = rep.table("diameter", {"r", "log_inv_r", "net_size", "diam", "dedup_r",
                                       "covered_fraction"});
    std::vector<double> fx, fy, lr, ln;
    for (auto const& nc : nets)
    {
        std::size_t best = std::max(nc.count[0], nc.count[1]);
        tab.add({nc.r, std::log(1 / nc.r), std::int64_t(nc.pts.size()), std::int64_t{nc.diam},
                 opts.dedup_r, double(best) / double(nc.pts.size())});
        if (nc.diam >= 0)
        {
            fx.push_back(std::log(1 / nc.r));
            fy.push_back(nc.diam);
        }
        lr.push_back(std::log(nc.r));
        ln.push_back(std::log(double(nc.pts.size())));
    }
    rep.scalar("layers_run", layers_run);
    rep.scalar("dedup_r", opts.dedup_r);

    if (fx.size() >= 4)
    {
        auto fit = ols(fx, fy);
        rep.fits.push_back({"diam_vs_log_inv_r", "log(1/r)", "diam", fit});
        rep.verdict("diam_r2", fit.r2 >= params.min_r2, fit.r2, params.min_r2);
        rep.verdict("diam_slope_positive", fit.slope > 0, fit.slope, 0.0);
    }
    else
    {
        rep.verdict("diam_r2", false, double(fx.size()), 4.0,
                    "fewer than 4 radii reached coverage");
    }
    bool monotone = true;
    int prev = 0;
    for (auto const& nc : nets)
    {
        int d = nc.diam < 0 ? std::numeric_limits<int>::max() : nc.diam;
        monotone = monotone && d >= prev;
        prev = d;
    }
    rep.verdict("diam_monotone", monotone, monotone, 1.0);
    if (lr.size() >= 3)
    {
        auto fit = ols(lr, ln);
        rep.fits.push_back({"net_size_vs_r", "log r", "log net_size", fit});
        double dev = std::abs(fit.slope - params.net_exponent);
        rep.verdict("net_exponent", dev <= params.net_exponent_tol, fit.slope,
                    params.net_exponent,
                    fmt::format("tolerance {}", params.net_exponent_tol));
    }
    return rep;
}

//---------------------------------------------------------------------------//
ExperimentReport hitting_probability(FiniteSupportMeasure const& mu, SpacePoint const& x0,
                                     HittingParams const& params, Seed const& seed)
{
    ExperimentReport rep;
    rep.name = "hitting";
    if (!(params.r > 0))
        throw InvalidRadius("hitting: r must be positive");
    auto xs = params.x_list;
    if (xs.empty())
    {
        xs.push_back(x0);
        auto rng = make_rng(seed, Purpose::centers);
        double y_max = y_limit(1 / params.r);
        for (std::size_t i = 0; i < params.haar_points; ++i)
            xs.push_back(haar_draw(std::max(y_max, 1.0), rng));
    }
    auto ns = params.n_list;
    if (ns.empty())
        ns.push_back(static_cast<int>(std::ceil(params.c_hat * std::log(1 / params.r))));
    std::sort(ns.begin(), ns.end());
    if (ns.front() < 1)
        throw Error("hitting: N must be at least 1");
    int n_max = ns.back();

    BallQuery target(params.target, params.r);
    auto& tab = rep.table("hitting", {"x_index", "x", "y", "theta", "N", "hits", "trials",
                                      "prob", "wilson_lo", "wilson_hi"});
    std::vector<double> min_prob(ns.size(), 1.0);
    for (std::size_t xi = 0; xi < xs.size(); ++xi)
    {
        std::vector<std::uint8_t> hit(params.trials * ns.size(), 0);
        parallel_trials(params.trials, [&](std::size_t t) {
            auto rng = make_rng(seed, Purpose::walk, xi * params.trials + t);
            SpacePoint p = xs[xi];
            std::size_t next = 0;
            for (int k = 1; k <= n_max; ++k)
            {
                p = walk_step(mu, p, rng);
                if (k == ns[next])
                {
                    hit[t * ns.size() + next] = target.distance(p) <= params.r;
                    ++next;
                }
            }
        });
        for (std::size_t j = 0; j < ns.size(); ++j)
        {
            std::size_t k = 0;
            for (std::size_t t = 0; t < params.trials; ++t)
                k += hit[t * ns.size() + j];
            double p = double(k) / double(params.trials);
            auto ci = wilson_interval(k, params.trials);
            tab.add({std::int64_t(xi), xs[xi].x, xs[xi].y, xs[xi].theta, std::int64_t{ns[j]},
                     std::int64_t(k), std::int64_t(params.trials), p, ci.lo, ci.hi});
            min_prob[j] = std::min(min_prob[j], p);
        }
    }
    for (std::size_t j = 0; j < ns.size(); ++j)
    {
        rep.scalar(fmt::format("min_prob_N{}", ns[j]), min_prob[j]);
        double b_hat = min_prob[j] > 0 ? std::log(min_prob[j]) / std::log(params.r)
                                       : std::numeric_limits<double>::infinity();
        rep.scalar(fmt::format("B_hat_N{}", ns[j]), b_hat);
        rep.verdict(fmt::format("min_prob_N{}", ns[j]), min_prob[j] > params.min_prob,
                    min_prob[j], params.min_prob);
    }
    return rep;
}

//---------------------------------------------------------------------------//
ExperimentReport density_probability(FiniteSupportMeasure const& mu, SpacePoint const& x0,
                                     DensityParams const& params, Seed const& seed)
{
    ExperimentReport rep;
    rep.name = "density";
    if (!(params.r > 0))
        throw InvalidRadius("density: r must be positive");
    if (params.a_list.empty())
        throw Error("density: a_list is empty");
    auto pts = net(1 / params.r, params.r, params.height, seed);
    PointIndex index(params.r);
    for (auto const& p : pts)
        index.insert(p);

    auto as = params.a_list;
    std::sort(as.begin(), as.end());
    std::vector<std::int64_t> lengths;
    for (double a : as)
        lengths.push_back(static_cast<std::int64_t>(std::ceil(std::pow(params.r, -a))));
    std::int64_t l_max = lengths.back();
    std::size_t m = pts.size();
    constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();

    std::vector<std::int64_t> first(params.trials * m, kNever);
    parallel_trials(params.trials, [&](std::size_t t) {
        auto rng = make_rng(seed, Purpose::walk, t);
        std::int64_t* f = first.data() + t * m;
        std::size_t remaining = m;
        SpacePoint p = x0;
        for (std::int64_t k = 1; k <= l_max && remaining > 0; ++k)
        {
            p = walk_step(mu, p, rng);
            index.query(p, params.r, [&](std::uint32_t id, double) {
                if (f[id] == kNever)
                {
                    f[id] = k;
                    --remaining;
                }
                return true;
            });
        }
    });

    auto& tab = rep.table("density", {"A", "length", "failures", "trials", "fraction",
                                      "wilson_lo", "wilson_hi"});
    for (std::size_t j = 0; j < as.size(); ++j)
    {
        std::size_t fails = 0;
        for (std::size_t t = 0; t < params.trials; ++t)
        {
            auto* f = first.data() + t * m;
            fails += std::any_of(f, f + m, [&](std::int64_t v) { return v > lengths[j]; });
        }
        auto ci = wilson_interval(fails, params.trials);
        tab.add({as[j], lengths[j], std::int64_t(fails), std::int64_t(params.trials),
                 double(fails) / double(params.trials), ci.lo, ci.hi});
        rep.scalar(fmt::format("failure_fraction_A{}", as[j]),
                   double(fails) / double(params.trials));
    }
    rep.scalar("net_size", double(m));

    // Survival of first hitting times pooled over trials and net points
    auto& surv = rep.table("density_survival", {"t", "survivors", "total", "survival"});
    std::vector<double> fx, fy;
    std::size_t total = first.size();
    std::size_t steps = std::max<std::size_t>(params.survival_points, 1);
    // The grid ends at the last observed first hit so it resolves the decay
    std::int64_t t_end = std::min<std::int64_t>(l_max, *std::max_element(first.begin(), first.end()));
    t_end = std::max<std::int64_t>(t_end, 2);
    for (std::size_t i = 0; i < steps; ++i)
    {
        std::int64_t t = 1 + (t_end - 2) * std::int64_t(i)
                                 / std::int64_t(std::max<std::size_t>(steps - 1, 1));
        std::size_t alive = std::count_if(first.begin(), first.end(),
                                          [&](std::int64_t v) { return v > t; });
        double sv = double(alive) / double(total);
        surv.add({t, std::int64_t(alive), std::int64_t(total), sv});
        if (alive > 0 && (fx.empty() || fx.back() != double(t)))
        {
            fx.push_back(double(t));
            fy.push_back(std::log(sv));
        }
    }
    if (fx.size() >= 4)
    {
        auto fit = ols(fx, fy);
        rep.fits.push_back({"log_survival_vs_t", "t", "log survival", fit});
        double ub = fit.slope_upper_bound(0.95);
        rep.verdict("survival_decay", fit.slope < 0 && ub < 0, fit.slope, 0.0,
                    fmt::format("one-sided 95% upper bound {:.6g}", ub));
    }
    else
    {
        rep.verdict("survival_decay", false, 0.0, 0.0,
                    "fewer than 4 survival points with survivors");
    }
    return rep;
}

}  // namespace homwalk
