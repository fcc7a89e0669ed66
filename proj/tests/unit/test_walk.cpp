// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "homwalk/errors.hpp"
#include "homwalk/stats.hpp"
#include "homwalk/walk.hpp"
#include "support/random_elements.hpp"

using namespace homwalk;
using namespace homwalk::test;

namespace
{
// Pushforward atoms grouped by coinciding points of X
std::vector<SpaceAtom> distinct_atoms(FiniteSupportMeasure const& mu, SpacePoint const& x0)
{
    std::vector<SpaceAtom> out;
    for (auto const& a : pushforward(mu, x0))
    {
        auto it = std::find_if(out.begin(), out.end(), [&](SpaceAtom const& b) {
            return dist_x(a.p, b.p) < 1e-7;
        });
        if (it == out.end())
            out.push_back(a);
        else
            it->w += a.w;
    }
    return out;
}

double nearest_atom(std::vector<SpaceAtom> const& atoms, SpacePoint const& p,
                    std::size_t* which = nullptr)
{
    double best = kNoDistance;
    for (std::size_t i = 0; i < atoms.size(); ++i)
    {
        double d = dist_x(atoms[i].p, p);
        if (d < best)
        {
            best = d;
            if (which)
                *which = i;
        }
    }
    return best;
}
}  // namespace

TEST_CASE("trajectory determinism and replay")
{
    auto mu = generator_preset("unipotents-rot35");
    auto x0 = base_point();
    auto a = sample_trajectory(mu, x0, 40, test_seed(30), 5);
    auto b = sample_trajectory(mu, x0, 40, test_seed(30), 5);
    CHECK(a.increments == b.increments);
    auto r = replay(mu, a);
    REQUIRE(r.size() == 41);
    for (std::size_t k = 0; k < r.size(); ++k)
    {
        CHECK(r[k].rep == a.points[k].rep);
        CHECK(a.heights[k] == height(a.points[k]));
    }
    auto rng = make_rng(test_seed(30), Purpose::walk, 5);
    CHECK(walk_endpoint(mu, x0, 40, rng).rep == a.points.back().rep);
    auto c = sample_trajectory(mu, x0, 40, test_seed(30), 6);
    CHECK(c.increments != a.increments);
}

TEST_CASE("streams are uncorrelated")
{
    auto mu = generator_preset("unipotents-rot35");
    int trials = 2000, n = 20;
    std::size_t same = 0, total = 0;
    std::vector<std::uint32_t> prev;
    for (int t = 0; t < trials; ++t)
    {
        auto tr = sample_trajectory(mu, base_point(), n, test_seed(31), t);
        if (!prev.empty())
        {
            for (int k = 0; k < n; ++k)
                same += tr.increments[k] == prev[k];
            total += n;
        }
        prev = tr.increments;
    }
    // Neighbouring streams agree at a step with probability 1/6
    auto ci = wilson_interval(same, total, 4.0);
    CHECK(ci.lo <= 1.0 / 6);
    CHECK(ci.hi >= 1.0 / 6);
}

TEST_CASE("two-step law matches the convolution")
{
    auto mu = generator_preset("unipotents-rot35");
    auto x0 = base_point();
    auto atoms = distinct_atoms(convolution_power(mu, 2), x0);
    std::size_t samples = 60000;
    std::vector<std::size_t> slot(samples);
    parallel_trials(samples, [&](std::size_t t) {
        auto rng = make_rng(test_seed(32), Purpose::walk, t);
        auto y = walk_endpoint(mu, x0, 2, rng);
        std::size_t i = atoms.size();
        double d = nearest_atom(atoms, y, &i);
        slot[t] = d < 1e-7 ? i : atoms.size();
    });
    std::vector<double> count(atoms.size() + 1, 0);
    for (auto s : slot)
        count[s] += 1;
    CHECK(count.back() == 0);
    double chi2 = 0;
    for (std::size_t i = 0; i < atoms.size(); ++i)
    {
        double e = atoms[i].w * samples;
        chi2 += (count[i] - e) * (count[i] - e) / e;
    }
    double p = chi2_sf(chi2, static_cast<double>(atoms.size() - 1));
    MESSAGE("chi2 " << chi2 << " cells " << atoms.size() << " p " << p);
    CHECK(p > 1e-3);
}

TEST_CASE("orbit bfs")
{
    auto mu = generator_preset("unipotents-rot35");
    auto x0 = base_point();
    BfsOptions opts;
    opts.max_layers = 4;
    opts.dedup_r = 1e-6;
    auto res = orbit_ball_bfs(mu, x0, opts);
    REQUIRE(res.layers.size() == 5);
    CHECK(res.layers[0].size() == 1);
    CHECK(res.layers[1].size() <= mu.size());

    for (int k = 1; k <= 3; ++k)
    {
        auto atoms = distinct_atoms(convolution_power(mu, k), x0);
        // Layer points are images of words of length k
        for (auto const& p : res.layers[k])
            CHECK(nearest_atom(atoms, p) < 1e-7);
        // Every image appears in a layer of the same parity
        std::vector<SpacePoint> same;
        for (int j = k; j >= 0; j -= 2)
            same.insert(same.end(), res.layers[j].begin(), res.layers[j].end());
        for (auto const& a : atoms)
        {
            double best = kNoDistance;
            for (auto const& p : same)
                best = std::min(best, dist_x(a.p, p));
            CHECK(best < opts.dedup_r);
        }
    }

    // Serial and parallel expansion agree exactly
    auto serial_opts = opts;
    serial_opts.parallel = false;
    auto ser = orbit_ball_bfs(mu, x0, serial_opts);
    REQUIRE(ser.layers.size() == res.layers.size());
    for (std::size_t k = 0; k < ser.layers.size(); ++k)
    {
        REQUIRE(ser.layers[k].size() == res.layers[k].size());
        for (std::size_t i = 0; i < ser.layers[k].size(); ++i)
            CHECK(ser.layers[k][i].rep == res.layers[k][i].rep);
    }

    // Coarse dedup keeps fewer points
    opts.dedup_r = 2.0;
    auto coarse = orbit_ball_bfs(mu, x0, opts);
    CHECK(coarse.stats.back().stored < res.stats.back().stored);
    for (auto const& st : coarse.stats)
        CHECK(st.generated == st.fresh + st.dedup_losses);

    // Parking stops expansion above the cap
    opts.h_cap = 1.0;
    opts.dedup_r = 1e-6;
    auto capped = orbit_ball_bfs(mu, x0, opts);
    for (std::size_t k = 1; k < capped.layers.size(); ++k)
        CHECK(capped.stats[k].generated
              == (capped.layers[k - 1].size() - capped.stats[k - 1].parked) * mu.size());
    CHECK(!capped.parked.empty());

    opts.h_cap = 1e300;
    opts.node_budget = 100;
    CHECK_THROWS_AS(orbit_ball_bfs(mu, x0, opts), NodeBudgetExceeded);
    opts.dedup_r = 0;
    CHECK_THROWS_AS(OrbitBfs(mu, x0, opts), InvalidRadius);
}
