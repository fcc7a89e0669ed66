// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <fmt/core.h>

#include "homwalk/errors.hpp"
#include "homwalk/experiments.hpp"

namespace homwalk
{
namespace
{
// Streams for spot checks and Birkhoff runs sit far above trial indices
constexpr std::uint64_t kSpotStreams = std::uint64_t{1} << 48;
constexpr std::uint64_t kBirkhoffStreams = std::uint64_t{1} << 47;

std::vector<TestFunction> bumps_only(std::size_t count, double radius)
{
    auto all = default_test_functions(2 * count, radius);
    std::vector<TestFunction> out;
    for (std::size_t i = 0; i < all.size(); i += 2)
        out.push_back(all[i]);
    return out;
}
}  // namespace

void spot_check(FiniteSupportMeasure const& mu, SpacePoint const& x0,
                std::vector<Observable> const& obs, SpotCheckParams const& params,
                Seed const& seed, ExperimentReport& report)
{
    if (mu.size() > params.max_atoms)
    {
        throw Error(fmt::format("spot check needs at most {} atoms, measure has {}",
                                params.max_atoms, mu.size()));
    }
    auto& tab = report.table("spot_check",
                             {"observable", "n", "mc", "se", "exact", "z", "pass"});
    std::size_t checks = 0, passed = 0;
    for (int n : params.n_list)
    {
        if (n < 0 || n > 3)
            throw Error(fmt::format("spot check supports 0 <= n <= 3, got {}", n));
        auto exact_atoms = pushforward(convolution_power(mu, n), x0);
        std::vector<double> vals(params.trials * obs.size());
        parallel_trials(params.trials, [&](std::size_t t) {
            auto rng = make_rng(seed, Purpose::walk,
                                kSpotStreams + std::uint64_t(n) * params.trials + t);
            auto y = walk_endpoint(mu, x0, n, rng);
            for (std::size_t k = 0; k < obs.size(); ++k)
                vals[t * obs.size() + k] = obs[k].f(y);
        });
        for (std::size_t k = 0; k < obs.size(); ++k)
        {
            MeanAccumulator acc;
            for (std::size_t t = 0; t < params.trials; ++t)
                acc.add(vals[t * obs.size() + k]);
            double exact = 0;
            for (auto const& a : exact_atoms)
                exact += a.w * obs[k].f(a.p);
            double diff = acc.mean() - exact;
            double se = acc.std_error();
            bool ok = se > 0 ? std::abs(diff) <= params.sigmas * se : std::abs(diff) <= 1e-12;
            double z = se > 0 ? diff / se : 0.0;
            tab.add({obs[k].name, std::int64_t{n}, acc.mean(), se, exact, z,
                     std::int64_t{ok}});
            ++checks;
            passed += ok;
        }
    }
    double frac = checks ? double(passed) / double(checks) : 0.0;
    report.scalar("spot_checks", double(checks));
    report.scalar("spot_checks_passed", double(passed));
    report.verdict("spot_check_fraction", checks > 0 && frac >= params.min_fraction, frac,
                   params.min_fraction,
                   fmt::format("within {} standard errors of the exact value", params.sigmas));
}

std::vector<std::vector<double>> orbit_average(Trajectory const& t,
                                               std::vector<TestFunction> const& fs,
                                               std::vector<std::size_t> const& checkpoints)
{
    std::size_t n_max = 0;
    for (auto c : checkpoints)
        n_max = std::max(n_max, c);
    if (n_max > t.points.size())
        throw Error("orbit_average: trajectory shorter than the largest checkpoint");
    std::vector<std::vector<double>> out(checkpoints.size(), std::vector<double>(fs.size()));
    std::vector<double> sums(fs.size(), 0);
    for (std::size_t k = 0; k < n_max; ++k)
    {
        for (std::size_t j = 0; j < fs.size(); ++j)
            sums[j] += fs[j](t.points[k]);
        for (std::size_t c = 0; c < checkpoints.size(); ++c)
            if (checkpoints[c] == k + 1)
                for (std::size_t j = 0; j < fs.size(); ++j)
                    out[c][j] = sums[j] / double(k + 1);
    }
    return out;
}

//---------------------------------------------------------------------------//
ExperimentReport walk_experiment(FiniteSupportMeasure const& mu, SpacePoint const& x0,
                                 WalkParams const& params, Seed const& seed)
{
    if (params.n < 0)
        throw Error("walk: n must be nonnegative");
    ExperimentReport rep;
    rep.name = "walk";
    auto t = sample_trajectory(mu, x0, params.n, seed, params.index, params.height);
    auto& tab = rep.table("walk", {"k", "atom", "x", "y", "theta", "height"});
    for (std::size_t k = 0; k < t.points.size(); ++k)
    {
        std::int64_t atom = k == 0 ? -1 : std::int64_t{t.increments[k - 1]};
        auto const& p = t.points[k];
        tab.add({std::int64_t(k), atom, p.x, p.y, p.theta, t.heights[k]});
    }
    rep.scalar("max_height", *std::max_element(t.heights.begin(), t.heights.end()));
    return rep;
}

//---------------------------------------------------------------------------//
ExperimentReport equidistribution_error(FiniteSupportMeasure const& mu,
                                        FiniteSupportMeasure const* mu_d,
                                        SpacePoint const& x0, EquidistParams const& params,
                                        Seed const& seed)
{
    ExperimentReport rep;
    rep.name = "equidist";
    auto fs = default_test_functions(params.functions, params.bump_radius);
    auto haar = haar_integrals(fs, params.haar_samples, seed, params.y_max);
    std::vector<double> betas = mu_d ? params.beta_list : std::vector<double>{0.0};
    auto ns = params.n_grid;
    std::sort(ns.begin(), ns.end());
    if (ns.empty() || ns.front() < 0)
        throw Error("equidist: n_grid must be nonempty and nonnegative");
    std::size_t nf = fs.size();

    auto& tab = rep.table("equidist", {"beta", "n", "m", "function", "estimate", "se", "haar",
                                       "haar_se", "error", "sigma"});
    bool any_confident = false;
    double best_theta = -std::numeric_limits<double>::infinity();
    for (std::size_t bi = 0; bi < betas.size(); ++bi)
    {
        double beta = betas[bi];
        std::vector<double> fx, fy;
        std::vector<int> fg;
        for (std::size_t ni = 0; ni < ns.size(); ++ni)
        {
            int n = ns[ni];
            long m = std::lround(beta * n);
            std::vector<double> vals(params.trials * nf);
            std::uint64_t first = (bi * ns.size() + ni) * params.trials;
            parallel_trials(params.trials, [&](std::size_t t) {
                auto rng = make_rng(seed, Purpose::walk, first + t);
                SpacePoint p = x0;
                if (mu_d)
                    p = walk_endpoint(*mu_d, p, static_cast<int>(m), rng);
                p = walk_endpoint(mu, p, n, rng);
                for (std::size_t j = 0; j < nf; ++j)
                    vals[t * nf + j] = fs[j](p);
            });
            for (std::size_t j = 0; j < nf; ++j)
            {
                MeanAccumulator acc;
                for (std::size_t t = 0; t < params.trials; ++t)
                    acc.add(vals[t * nf + j]);
                double err = acc.mean() - haar[j].value;
                double sigma = std::hypot(acc.std_error(), haar[j].std_error);
                tab.add({beta, std::int64_t{n}, std::int64_t{m}, fs[j].label(), acc.mean(),
                         acc.std_error(), haar[j].value, haar[j].std_error, err, sigma});
                if (std::abs(err) > params.fit_sigmas * sigma)
                {
                    fx.push_back(n);
                    fy.push_back(std::log(std::abs(err)));
                    fg.push_back(static_cast<int>(j));
                }
            }
        }
        // Functions with a single significant point carry no slope information
        std::map<int, int> per;
        for (int g : fg)
            ++per[g];
        std::vector<double> x, y;
        std::vector<int> g;
        for (std::size_t i = 0; i < fx.size(); ++i)
        {
            if (per[fg[i]] >= 2)
            {
                x.push_back(fx[i]);
                y.push_back(fy[i]);
                g.push_back(fg[i]);
            }
        }
        std::string tag = fmt::format("beta{}", beta);
        if (x.size() >= params.min_fit_points && x.size() > per.size() + 1)
        {
            auto fit = ols_grouped(x, y, g);
            rep.fits.push_back({"equidist_" + tag, "n", "log|error| (per-function intercepts)",
                                fit, params.confidence});
            double theta = -fit.slope;
            double theta_lo = -fit.slope_upper_bound(params.confidence);
            rep.scalar("theta_hat_" + tag, theta);
            rep.scalar("theta_lower_" + tag, theta_lo);
            bool ok = theta > 0 && theta_lo > 0;
            rep.scalar("theta_confident_" + tag, ok);
            any_confident = any_confident || ok;
            best_theta = std::max(best_theta, theta);
        }
        else
        {
            rep.scalar("theta_hat_" + tag, std::numeric_limits<double>::quiet_NaN());
        }
    }
    rep.verdict("theta_positive_any_beta", any_confident, best_theta, 0.0,
                fmt::format("needs a positive one-sided {} lower bound", params.confidence));

    // Birkhoff averages along mu-walks
    if (params.birkhoff_trajectories > 0 && params.birkhoff_length > 0)
    {
        std::vector<std::size_t> cps;
        for (std::size_t c = 100; c < params.birkhoff_length; c *= 10)
            cps.push_back(c);
        cps.push_back(params.birkhoff_length);
        std::size_t T = params.birkhoff_trajectories;
        std::vector<std::vector<std::vector<double>>> avg(T);
        parallel_trials(T, [&](std::size_t j) {
            auto tr = sample_trajectory(mu, x0, static_cast<int>(params.birkhoff_length) - 1,
                                        seed, kBirkhoffStreams + j);
            avg[j] = orbit_average(tr, fs, cps);
        });
        auto& bt = rep.table("equidist_birkhoff", {"trajectory", "N", "function", "average"});
        for (std::size_t j = 0; j < T; ++j)
            for (std::size_t c = 0; c < cps.size(); ++c)
                for (std::size_t f = 0; f < nf; ++f)
                    bt.add({std::int64_t(j), std::int64_t(cps[c]), fs[f].label(), avg[j][c][f]});

        auto& bs = rep.table("equidist_birkhoff_summary",
                             {"function", "haar", "haar_se", "average", "trajectory_sd",
                              "pooled_mean", "pooled_se", "z", "pass"});
        std::size_t ok_count = 0;
        double worst = 0;
        for (std::size_t f = 0; f < nf; ++f)
        {
            MeanAccumulator acc;
            for (std::size_t j = 0; j < T; ++j)
                acc.add(avg[j].back()[f]);
            double sd = T > 1 ? std::sqrt(acc.variance()) : 0.0;
            double a0 = avg[0].back()[f];
            double sigma = std::hypot(sd, haar[f].std_error);
            double z = sigma > 0 ? (a0 - haar[f].value) / sigma : 0.0;
            bool ok = std::abs(z) <= params.birkhoff_sigmas;
            ok_count += ok;
            worst = std::max(worst, std::abs(z));
            bs.add({fs[f].label(), haar[f].value, haar[f].std_error, a0, sd, acc.mean(),
                    acc.std_error(), z, std::int64_t{ok}});
        }
        rep.verdict("birkhoff_within_sigma", ok_count == nf, worst, params.birkhoff_sigmas,
                    "largest |z| of trajectory 0 against the Haar integral");
    }
    return rep;
}

//---------------------------------------------------------------------------//
ExperimentReport spectral_gap_estimate(FiniteSupportMeasure const& mu,
                                       GapParams const& params, Seed const& seed)
{
    ExperimentReport rep;
    rep.name = "gap";
    if (params.n_max < 1 || params.haar_count < 2 || params.walk_trials < 1)
        throw Error("gap: need n_max >= 1, haar_count >= 2, walk_trials >= 1");
    auto fs = bumps_only(params.functions, params.bump_radius);
    auto haar = haar_integrals(fs, params.haar_samples, seed, params.y_max);
    std::size_t nf = fs.size();
    auto nn = static_cast<std::size_t>(params.n_max) + 1;

    // products[i][n][f] = f0(x_i) * mean over walks of f0(Y_n)
    std::vector<double> prod(params.haar_count * nn * nf);
    parallel_trials(params.haar_count, [&](std::size_t i) {
        auto crng = make_rng(seed, Purpose::centers, i);
        SpacePoint x = haar_draw(params.y_max, crng);
        std::vector<double> f0x(nf), sum(nn * nf, 0.0);
        for (std::size_t f = 0; f < nf; ++f)
            f0x[f] = fs[f](x) - haar[f].value;
        for (std::size_t w = 0; w < params.walk_trials; ++w)
        {
            auto rng = make_rng(seed, Purpose::walk, i * params.walk_trials + w);
            SpacePoint p = x;
            for (std::size_t n = 0; n < nn; ++n)
            {
                if (n > 0)
                    p = walk_step(mu, p, rng);
                for (std::size_t f = 0; f < nf; ++f)
                    sum[n * nf + f] += fs[f](p) - haar[f].value;
            }
        }
        double* out = prod.data() + i * nn * nf;
        for (std::size_t n = 0; n < nn; ++n)
            for (std::size_t f = 0; f < nf; ++f)
                out[n * nf + f] = f0x[f] * sum[n * nf + f] / double(params.walk_trials);
    });

    auto& tab = rep.table("gap", {"function", "n", "c_n", "se"});
    std::vector<std::vector<MeanAccumulator>> c(nf, std::vector<MeanAccumulator>(nn));
    for (std::size_t i = 0; i < params.haar_count; ++i)
        for (std::size_t n = 0; n < nn; ++n)
            for (std::size_t f = 0; f < nf; ++f)
                c[f][n].add(prod[(i * nn + n) * nf + f]);

    // Independent Haar estimate of |f0|^2 for the n = 0 check
    auto pts = haar_sample(params.haar_samples, params.y_max,
                           Seed{seed.key, seed.stream ^ 0x5bd1e995u});
    bool any_gap = false, c0_ok = true;
    double best_gap = -std::numeric_limits<double>::infinity(), worst_c0 = 0;
    auto& cz = rep.table("gap_c0", {"function", "c0", "c0_se", "norm2", "norm2_se", "z"});
    for (std::size_t f = 0; f < nf; ++f)
    {
        std::vector<double> x, y;
        for (std::size_t n = 0; n < nn; ++n)
        {
            double v = c[f][n].mean(), se = c[f][n].std_error();
            tab.add({fs[f].label(), std::int64_t(n), v, se});
            if (std::abs(v) > params.fit_sigmas * se)
            {
                x.push_back(double(n));
                y.push_back(std::log(std::abs(v)));
            }
        }
        if (x.size() >= std::max<std::size_t>(params.min_fit_points, 3))
        {
            auto fit = ols(x, y);
            rep.fits.push_back({"gap_" + fs[f].label(), "n", "log|c_n|", fit, params.confidence});
            double gap = -fit.slope;
            double lower = -fit.slope_upper_bound(params.confidence);
            rep.scalar("gap_hat_" + fs[f].label(), gap);
            rep.scalar("gap_lower_" + fs[f].label(), lower);
            if (gap > 0 && lower > 0)
            {
                any_gap = true;
                best_gap = std::max(best_gap, gap);
            }
        }

        // Both sides use Haar conditioned on y <= y_max
        MeanAccumulator m2;
        for (auto const& p : pts)
        {
            double v = fs[f](p) - haar[f].value;
            m2.add(v * v);
        }
        double norm2 = m2.mean();
        double norm2_se = m2.std_error();
        double c0 = c[f][0].mean(), c0_se = c[f][0].std_error();
        double z = (c0 - norm2) / std::hypot(c0_se, norm2_se);
        cz.add({fs[f].label(), c0, c0_se, norm2, norm2_se, z});
        worst_c0 = std::max(worst_c0, std::abs(z));
        c0_ok = c0_ok && std::abs(z) <= params.c0_sigmas;
    }
    rep.scalar("gap_hat_max", any_gap ? best_gap : std::numeric_limits<double>::quiet_NaN());
    rep.verdict("gap_positive", any_gap, any_gap ? best_gap : 0.0, 0.0,
                "largest gap_hat whose one-sided lower bound is positive (lower-bound-style)");
    rep.verdict("c0_matches_norm", c0_ok, worst_c0, params.c0_sigmas);
    return rep;
}

}  // namespace homwalk
