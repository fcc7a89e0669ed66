// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
//
// One PASS/FAIL line per primary acceptance criterion. Tolerances are pinned
// here; each criterion also has a runtime limit.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/core.h>

#include "homwalk/config.hpp"
#include "homwalk/errors.hpp"
#include "support/lattice_oracles.hpp"
#include "support/random_elements.hpp"

using namespace homwalk;
namespace fs = std::filesystem;

namespace
{
struct Outcome
{
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(std::string const& name, double limit_s, std::function<Outcome()> const& body)
{
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try
    {
        o = body();
    }
    catch (std::exception const& e)
    {
        o = {false, fmt::format("error: {}", e.what())};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = secs <= limit_s;
    bool pass = o.pass && in_time;
    failures += !pass;
    fmt::print("{} {}: {} [{:.1f}s, limit {:.0f}s{}]\n", pass ? "PASS" : "FAIL", name, o.detail,
               secs, limit_s, in_time ? "" : ", too slow");
    std::fflush(stdout);
}

ExperimentReport defaults(std::string const& experiment)
{
    return run_report(parse_config("{}", experiment));
}

Verdict const& need(ExperimentReport const& rep, std::string const& name)
{
    auto const* v = rep.find_verdict(name);
    if (!v)
        throw Error(fmt::format("{} report has no verdict {}", rep.name, name));
    return *v;
}

std::string slurp(fs::path const& p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

// Small configs that still exercise every parallel kernel of each experiment
std::vector<std::pair<std::string, std::string>> small_configs()
{
    return {
        {"walk", R"({"grids": {"n": [200]}})"},
        {"diameter", R"({"grids": {"r": [0.4, 0.3, 0.2]}})"},
        {"hitting", R"({"trials": 3000, "params": {"haar_points": 2}})"},
        {"density", R"({"trials": 30, "grids": {"A": [4, 6]}})"},
        {"nondiv", R"({"trials": 3000, "params": {"holdout_trials": 1000}})"},
        {"contraction", R"({"trials": 40, "params": {"points": 10, "holdout_points": 5,
                            "log_lipschitz_samples": 500}})"},
        {"flatten", R"({"grids": {"n": [0, 4], "delta": [0.0625, 0.03125]},
                        "params": {"top_atoms": 20, "random_atoms": 20}})"},
        {"dimension", R"({"grids": {"n": [6]}, "params": {"centers": 20}})"},
        {"smoothed", R"({"grids": {"n": [4]}, "params": {"haar_samples": 20000, "functions": 4}})"},
        {"equidist", R"({"trials": 500, "grids": {"n": [0, 2, 4, 8], "beta": [1]},
                         "params": {"functions": 4, "haar_samples": 20000,
                                    "birkhoff_length": 2000, "birkhoff_trajectories": 3}})"},
        {"gap", R"({"trials": 2, "grids": {"n": [6]},
                    "params": {"haar_count": 1000, "haar_samples": 20000}})"},
    };
}
}  // namespace

int main()
{
    criterion("geometry oracle", 60, [] {
        auto rng = make_rng(test::test_seed(9), Purpose::pairs, 0);
        int dist_ok = 0, height_ok = 0;
        double worst_height = 0;
        for (int i = 0; i < 100; ++i)
        {
            SpacePoint p = reduce(test::random_element(rng, 0.9));
            SpacePoint q = reduce(test::random_element(rng, 0.9));
            double d = dist_x(p, q);
            dist_ok += d == test::brute_dist_x(p, q, 4 * lambda_entry_bound(p, q, d));
            GroupElement g = test::random_element(rng, 0.7);
            double brute = test::brute_shortest_vector(g, 50);
            double err = std::abs(height(reduce(g)) - std::max(1.0, 1 / brute));
            worst_height = std::max(worst_height, err);
            height_ok += err <= 1e-9;
        }
        return Outcome{dist_ok == 100 && height_ok == 100,
                       fmt::format("dist_X exact on {}/100 pairs, height within 1e-9 on {}/100 "
                                   "(worst {:.2e})",
                                   dist_ok, height_ok, worst_height)};
    });

    criterion("probability spot checks", 300, [] {
        std::size_t checks = 0, passed = 0;
        for (auto const& e : experiment_names())
        {
            auto rep = spot_check_report(parse_config("{}", e));
            checks += std::size_t(rep.find_scalar("spot_checks"));
            passed += std::size_t(rep.find_scalar("spot_checks_passed"));
        }
        double frac = double(passed) / double(checks);
        return Outcome{checks >= 100 && frac >= 0.95,
                       fmt::format("{}/{} within 3 sigma of exact convolution ({:.3f} >= 0.95)",
                                   passed, checks, frac)};
    });

    criterion("height axioms", 600, [] {
        auto rep = defaults("contraction");
        auto const& ll = need(rep, "log_lipschitz");
        auto const& a = need(rep, "a_hat_below_one_N100");
        return Outcome{ll.pass && ll.value == 0 && a.pass,
                       fmt::format("{} log-Lipschitz violations in 1e4 samples; a_hat(100) = "
                                   "{:.4f}, 95% upper bound {:.4f} < 1",
                                   ll.value, rep.find_scalar("a_hat_N100"), a.value)};
    });

    criterion("quantitative non-divergence", 600, [] {
        auto rep = defaults("nondiv");
        auto const& s = need(rep, "ratio_spread_across_n");
        auto const& h = need(rep, "holdout_below_C_hat");
        return Outcome{s.pass, fmt::format("max/min of tail h / ht(x0) across n = {:.3f} <= 4; "
                                           "holdout below C_hat: {}",
                                           s.value, h.pass ? "yes" : "no")};
    });

    criterion("diameter", 900, [] {
        auto rep = defaults("diameter");
        auto const* fit = rep.find_fit("diam_vs_log_inv_r");
        auto const* net = rep.find_fit("net_size_vs_r");
        bool ok = !rep.partial && fit && net && need(rep, "diam_r2").pass
                  && need(rep, "diam_slope_positive").pass && need(rep, "net_exponent").pass;
        return Outcome{ok, fmt::format("R^2 {:.4f} >= 0.9, slope {:.3f} > 0, net exponent "
                                       "{:.3f} within 0.4 of -3{}",
                                       fit ? fit->fit.r2 : 0.0, fit ? fit->fit.slope : 0.0,
                                       net ? net->fit.slope : 0.0,
                                       rep.partial ? " (partial)" : "")};
    });

    criterion("high dimension", 600, [] {
        auto rep = defaults("dimension");
        auto const& v = need(rep, "median_slope");
        return Outcome{v.pass, fmt::format("median local-dimension slope {:.3f} >= 2.5 over {} "
                                           "centers (q25 {:.3f}, q75 {:.3f})",
                                           v.value, rep.find_scalar("centers"),
                                           rep.find_scalar("slope_q25"),
                                           rep.find_scalar("slope_q75"))};
    });

    criterion("equidistribution", 1200, [] {
        auto rep = defaults("equidist");
        auto const& t = need(rep, "theta_positive_any_beta");
        auto const& b = need(rep, "birkhoff_within_sigma");
        return Outcome{t.pass && b.pass,
                       fmt::format("best theta_hat {:.4f} with positive 95% lower bound: {}; "
                                   "Birkhoff at N = 1e5 worst |z| {:.2f} <= 3",
                                   t.value, t.pass ? "yes" : "no", b.value)};
    });

    criterion("spectral gap", 600, [] {
        auto rep = defaults("gap");
        auto const& g = need(rep, "gap_positive");
        auto const& c = need(rep, "c0_matches_norm");
        return Outcome{g.pass && c.pass,
                       fmt::format("gap_hat {:.4f} with positive 95% lower bound: {}; c0 worst "
                                   "|z| {:.2f} <= 3",
                                   g.value, g.pass ? "yes" : "no", c.value)};
    });

    criterion("determinism", 600, [] {
        auto root = fs::temp_directory_path() / "homwalk_acceptance_determinism";
        fs::remove_all(root);
        std::size_t files = 0, same = 0;
        std::vector<std::string> differing;
        for (auto const& [e, text] : small_configs())
        {
            auto cfg = parse_config(text, e);
            std::vector<fs::path> dirs;
            for (int threads : {1, 3, 1})
            {
                auto c = cfg;
                c.set_threads(threads);
                auto dir = root / fmt::format("{}_{}_{}", e, threads, dirs.size());
                if (run(c, dir, RunOptions{true}) == 1)
                    throw Error(fmt::format("{} run failed", e));
                dirs.push_back(dir);
            }
            for (auto const& entry : fs::directory_iterator(dirs[0]))
            {
                if (entry.path().extension() != ".csv")
                    continue;
                auto ref = slurp(entry.path());
                for (std::size_t k = 1; k < dirs.size(); ++k)
                {
                    ++files;
                    if (slurp(dirs[k] / entry.path().filename()) == ref)
                        ++same;
                    else
                        differing.push_back(entry.path().filename().string());
                }
            }
        }
        fs::remove_all(root);
        std::string diff;
        for (auto const& d : differing)
            diff += " " + d;
        return Outcome{files > 0 && same == files,
                       fmt::format("{}/{} CSV reruns byte-identical across 1 and 3 threads, 11 "
                                   "experiments{}",
                                   same, files, diff.empty() ? "" : "; differ:" + diff)};
    });

    fmt::print("{} of 9 primary criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
