// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#include <algorithm>
#include <cmath>
#include <map>

#include <doctest.h>

#include "homwalk/errors.hpp"
#include "homwalk/point_index.hpp"
#include "homwalk/stats.hpp"
#include "support/random_elements.hpp"

using namespace homwalk;
using namespace homwalk::test;

TEST_CASE("point index matches direct distances")
{
    auto pts = haar_sample(3000, 50, test_seed(11));
    PointIndex index(0.3);
    for (auto const& p : pts)
        index.insert(p);
    auto rng = make_rng(test_seed(12), Purpose::centers);
    for (int i = 0; i < 40; ++i)
    {
        SpacePoint q = haar_draw(50, rng);
        double D = rng.uniform(0.1, 1.2);
        std::map<std::uint32_t, double> got;
        index.query(q, D, [&](std::uint32_t id, double d) {
            auto [it, fresh] = got.emplace(id, d);
            if (!fresh)
                it->second = std::min(it->second, d);
            return true;
        });
        for (std::uint32_t id = 0; id < pts.size(); ++id)
        {
            double d = dist_x(pts[id], q);
            auto it = got.find(id);
            if (d <= D * (1 - 1e-9))
            {
                REQUIRE(it != got.end());
                CHECK(it->second == doctest::Approx(d).epsilon(1e-9));
            }
            else if (d > D * (1 + 1e-9))
            {
                CHECK(it == got.end());
            }
        }
    }
}

TEST_CASE("group index matches direct distances")
{
    auto rng = make_rng(test_seed(13), Purpose::pairs);
    std::vector<GroupElement> elems;
    GroupIndex index(0.05);
    for (int i = 0; i < 4000; ++i)
    {
        elems.push_back(random_element(rng, 0.4));
        index.insert(elems.back());
    }
    for (int i = 0; i < 40; ++i)
    {
        GroupElement g = random_element(rng, 0.4);
        double D = rng.uniform(0.01, 0.5);
        std::map<std::uint32_t, double> got;
        index.query(g, D, [&](std::uint32_t id, double d) {
            CHECK(got.emplace(id, d).second);
        });
        std::size_t expected = 0;
        for (std::uint32_t id = 0; id < elems.size(); ++id)
        {
            if (dist(elems[id], g) <= D)
            {
                ++expected;
                CHECK(got.count(id) == 1);
            }
        }
        CHECK(got.size() == expected);
    }
}

TEST_CASE("cell diameter")
{
    // Points sharing a quotient cell of side h are within 2.2 h
    double h = 0.02;
    CellGrid grid(h, CellGrid::Mode::quotient);
    auto pts = haar_sample(200000, 20, test_seed(14));
    std::map<std::uint64_t, std::vector<std::size_t>> cells;
    for (std::size_t i = 0; i < pts.size(); ++i)
        cells[grid.key(pts[i].x, pts[i].y, pts[i].theta)].push_back(i);
    int pairs = 0;
    for (auto const& [key, ids] : cells)
    {
        for (std::size_t a = 0; a + 1 < ids.size(); ++a)
        {
            ++pairs;
            CHECK(dist(pts[ids[a]].rep, pts[ids[a + 1]].rep) <= 2.2 * h);
        }
    }
    CHECK(pairs > 100);
}

TEST_CASE("net")
{
    CHECK_THROWS_AS(net(2, 0), InvalidRadius);
    // 2.5 exceeds the diameter of X(1)
    CHECK(net(1, 2.5).size() == 1);

    for (double r : {0.6, 0.4})
    {
        auto xi = net(1 / r, r);
        // Separation
        for (std::size_t i = 0; i < xi.size(); ++i)
            for (std::size_t j = i + 1; j < xi.size(); ++j)
                CHECK(dist_x(xi[i], xi[j]) >= r - 1e-9);
        // Covering on fresh Haar samples of X(1/r)
        PointIndex index(r);
        for (auto const& p : xi)
            index.insert(p);
        auto rng = make_rng(test_seed(15), Purpose::centers);
        int misses = 0;
        for (int i = 0; i < 10000; ++i)
        {
            SpacePoint p = haar_draw(y_limit(1 / r), rng);
            misses += index.nearest(p, r) == kNoDistance;
        }
        CHECK(misses == 0);
    }

    auto coarse = net(3, 0.5);
    auto fine = net(3, 0.25);
    CHECK(fine.size() >= coarse.size());

    // |net(1/r, r)| ~ r^{-3}
    std::vector<double> lx, ly;
    for (double r : {0.4, 0.3, 0.2, 0.15, 0.1})
    {
        lx.push_back(std::log(r));
        ly.push_back(std::log(static_cast<double>(net(1 / r, r).size())));
    }
    auto fit = ols(lx, ly);
    MESSAGE("net size exponent " << fit.slope);
    CHECK(std::abs(fit.slope + 3) <= 0.4);
}
