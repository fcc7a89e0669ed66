// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
//
// Default-config runs against frozen values. Runs are deterministic, so the
// tolerance only absorbs floating-point differences between builds.
#include <cmath>
#include <functional>

#include <doctest.h>

#include "homwalk/config.hpp"
#include "support/fixtures.hpp"

using namespace homwalk;
using namespace homwalk::test;

namespace
{
constexpr double kRel = 1e-9;

ExperimentReport defaults(char const* experiment)
{
    return run_report(parse_config("{}", experiment));
}

double value_at(ExperimentReport const& rep, char const* table, char const* column,
                std::function<bool(std::vector<Cell> const&)> const& where)
{
    for (auto const& t : rep.tables)
    {
        if (t.name != table)
            continue;
        std::size_t c = 0;
        while (t.columns[c] != column)
            ++c;
        for (auto const& row : t.rows)
            if (where(row))
                return std::get<double>(row[c]);
    }
    FAIL("no matching row in " << table);
    return 0;
}
}  // namespace

TEST_CASE("diameter slope fixture")
{
    auto rep = defaults("diameter");
    auto const* fit = rep.find_fit("diam_vs_log_inv_r");
    REQUIRE(fit != nullptr);
    CHECK(fit->fit.slope == doctest::Approx(kDiameterSlope).epsilon(kRel));
    CHECK(fit->fit.r2 == doctest::Approx(kDiameterR2).epsilon(kRel));
    CHECK(fit->fit.r2 >= 0.9);
    CHECK(rep.find_fit("net_size_vs_r")->fit.slope == doctest::Approx(kNetExponent).epsilon(kRel));
}

TEST_CASE("hitting fixture uses the diameter slope")
{
    auto cfg = parse_config("{}", "hitting");
    // c_hat is the frozen diameter slope rounded to two decimals
    CHECK(cfg.doc()["params"]["c_hat"] == doctest::Approx(kDiameterSlope).epsilon(0.01));
    auto rep = run_report(cfg);
    CHECK(rep.find_scalar("min_prob_N7") == doctest::Approx(kHittingMinProbN7).epsilon(kRel));
    CHECK(rep.find_scalar("min_prob_N7") > 0);
}

TEST_CASE("density fixture")
{
    auto rep = defaults("density");
    CHECK(rep.find_scalar("failure_fraction_A4") == kDensityFailureA4);
    CHECK(rep.find_scalar("failure_fraction_A5") == doctest::Approx(kDensityFailureA5));
    REQUIRE(rep.find_verdict("survival_decay") != nullptr);
    CHECK(rep.find_verdict("survival_decay")->pass);
}

TEST_CASE("non-divergence fixture")
{
    auto rep = defaults("nondiv");
    CHECK(rep.find_scalar("spread_h16") == doctest::Approx(kNondivSpreadH16).epsilon(kRel));
    // Markov-shape ratio stable across n within a factor 2 for h >= 2
    for (char const* h : {"spread_h2", "spread_h4", "spread_h8", "spread_h16"})
        CHECK(rep.find_scalar(h) <= 2);
}

TEST_CASE("contraction fixture")
{
    auto rep = defaults("contraction");
    double a10 = rep.find_scalar("a_hat_N10"), a100 = rep.find_scalar("a_hat_N100");
    CHECK(a10 == doctest::Approx(kContractionAHatN10).epsilon(kRel));
    CHECK(a100 == doctest::Approx(kContractionAHatN100).epsilon(kRel));
    CHECK(a100 < 1);
    CHECK(a10 >= a100);
}

TEST_CASE("flattening fixture")
{
    auto rep = defaults("flatten");
    auto gamma = [&](std::int64_t n) {
        return value_at(rep, "flatten", "gamma_hat", [n](std::vector<Cell> const& row) {
            return std::get<std::int64_t>(row[0]) == n && std::get<double>(row[1]) == 0.0078125;
        });
    };
    CHECK(gamma(4) == doctest::Approx(kFlattenGammaN4).epsilon(kRel));
    CHECK(gamma(6) == doctest::Approx(kFlattenGammaN6).epsilon(kRel));
    CHECK(gamma(8) == doctest::Approx(kFlattenGammaN8).epsilon(kRel));
    REQUIRE(rep.find_verdict("gamma_decreasing") != nullptr);
    CHECK(rep.find_verdict("gamma_decreasing")->pass);
}

TEST_CASE("dimension fixture")
{
    auto rep = defaults("dimension");
    CHECK(rep.find_scalar("slope_median")
          == doctest::Approx(kDimensionMedianSlope).epsilon(kRel));
}

TEST_CASE("smoothed density fixture")
{
    auto rep = defaults("smoothed");
    CHECK(rep.find_scalar("integral_h") == doctest::Approx(kSmoothedIntegral).epsilon(kRel));
    REQUIRE(rep.find_verdict("residual_within_bound") != nullptr);
    CHECK(rep.find_verdict("residual_within_bound")->pass);
}

TEST_CASE("equidistribution fixture")
{
    auto rep = defaults("equidist");
    CHECK(rep.find_scalar("theta_hat_beta0.5") == doctest::Approx(kThetaHatBeta05).epsilon(kRel));
    CHECK(rep.find_scalar("theta_hat_beta1") == doctest::Approx(kThetaHatBeta1).epsilon(kRel));
    CHECK(rep.find_scalar("theta_hat_beta2") == doctest::Approx(kThetaHatBeta2).epsilon(kRel));
}

TEST_CASE("spectral gap fixture")
{
    auto rep = defaults("gap");
    CHECK(rep.find_scalar("gap_hat_max") == doctest::Approx(kGapHatMax).epsilon(kRel));
}
