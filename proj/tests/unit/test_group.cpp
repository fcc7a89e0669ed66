// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#include <cmath>
#include <numbers>

#include <doctest.h>

#include "homwalk/errors.hpp"
#include "homwalk/group.hpp"
#include "support/random_elements.hpp"

using namespace homwalk;
using homwalk::test::naive_mul;
using homwalk::test::random_element;
using homwalk::test::test_seed;

namespace
{
// Sum of X^k / k! for k < 30
GroupElement series_exp(LieVector const& v)
{
    auto [p, q, r] = v.coef;
    GroupElement x{p, q, r, -p};
    GroupElement term = GroupElement::identity();
    GroupElement sum = term;
    for (int k = 1; k < 30; ++k)
    {
        term = naive_mul(term, x);
        term = {term.a / k, term.b / k, term.c / k, term.d / k};
        sum = {sum.a + term.a, sum.b + term.b, sum.c + term.c, sum.d + term.d};
    }
    return sum;
}

// g X g^{-1} for X = basis element, decomposed back into (H, E, F)
std::array<double, 3> conjugate_basis(GroupElement const& g, int which)
{
    GroupElement x = which == 0   ? GroupElement{1, 0, 0, -1}
                     : which == 1 ? GroupElement{0, 1, 0, 0}
                                  : GroupElement{0, 0, 1, 0};
    GroupElement y = naive_mul(naive_mul(g, x), g.inverse());
    return {y.a, y.b, y.c};
}
}  // namespace

TEST_CASE("mul")
{
    GroupElement g{2, 3, 1, 2};
    CHECK(mul(GroupElement::identity(), g) == g);
    CHECK(max_abs_diff(mul(upper_unipotent(1), upper_unipotent(1)),
                       upper_unipotent(2))
          == 0);

    auto rng = make_rng(test_seed(), Purpose::pairs);
    for (int i = 0; i < 100; ++i)
    {
        GroupElement a = random_element(rng, 1.0);
        GroupElement b = random_element(rng, 1.0);
        GroupElement p = mul(a, b);
        CHECK(max_abs_diff(p, naive_mul(a, b)) < 1e-12 * (1 + group_norm(p)));
        CHECK(std::abs(p.det() - 1) <= 1e-10);
    }
}

TEST_CASE("adjoint")
{
    auto id = adjoint(GroupElement::identity());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            CHECK(id[i][j] == (i == j ? 1.0 : 0.0));

    double t = 0.7;
    auto ad = adjoint(diagonal(t));
    CHECK(ad[0][0] == doctest::Approx(1));
    CHECK(ad[1][1] == doctest::Approx(std::exp(t)));
    CHECK(ad[2][2] == doctest::Approx(std::exp(-t)));
    CHECK(std::abs(ad[0][1]) + std::abs(ad[1][0]) + std::abs(ad[2][0]) < 1e-15);

    auto rng = make_rng(test_seed(), Purpose::pairs, 1);
    for (int i = 0; i < 200; ++i)
    {
        GroupElement g = random_element(rng, 0.8);
        GroupElement h = random_element(rng, 0.8);
        // Column j is Ad(g) applied to basis element j
        auto ag = adjoint(g);
        for (int j = 0; j < 3; ++j)
        {
            auto col = conjugate_basis(g, j);
            for (int k = 0; k < 3; ++k)
                CHECK(ag[k][j] == doctest::Approx(col[k]).epsilon(1e-12));
        }
        auto agh = adjoint(mul(g, h));
        auto ah = adjoint(h);
        for (int r = 0; r < 3; ++r)
        {
            for (int c = 0; c < 3; ++c)
            {
                double prod = 0;
                for (int k = 0; k < 3; ++k)
                    prod += ag[r][k] * ah[k][c];
                CHECK(std::abs(agh[r][c] - prod) < 1e-9 * (1 + std::abs(prod)));
            }
        }
    }
}

TEST_CASE("group_norm")
{
    CHECK(group_norm(GroupElement::identity()) == 1);
    for (double t : {-2.0, -0.3, 0.5, 3.0})
        CHECK(group_norm(diagonal(t)) == doctest::Approx(std::exp(std::abs(t))));

    auto rng = make_rng(test_seed(), Purpose::pairs, 2);
    for (int i = 0; i < 10000; ++i)
    {
        GroupElement g = random_element(rng, 1.0);
        GroupElement h = random_element(rng, 1.0);
        CHECK(group_norm(g) == doctest::Approx(group_norm(g.inverse())));
        // Submultiplicative up to the constant 3
        CHECK(group_norm(mul(g, h)) <= 3 * group_norm(g) * group_norm(h));
        // Frozen growth fit: |g| <= exp(E6 dist(g, I) + c6), E6 = 1
        CHECK(std::log(group_norm(g)) <= rho(g) + 1e-9);
    }
}

TEST_CASE("log and exp")
{
    LieVector zero = log_map(GroupElement::identity());
    CHECK(zero.norm() == 0);
    CHECK(max_abs_diff(exp_map({{0, 1.5, 0}}), upper_unipotent(1.5)) == 0);
    CHECK_THROWS_AS(log_map(diagonal(2.0)), LogDomainError);
    CHECK_THROWS_AS(log_map(rotation(std::numbers::pi)), LogDomainError);

    auto rng = make_rng(test_seed(), Purpose::pairs, 3);
    int tested = 0;
    while (tested < 1000)
    {
        LieVector v{{0.2 * rng.normal(), 0.2 * rng.normal(), 0.2 * rng.normal()}};
        GroupElement g = series_exp(v);
        CHECK(max_abs_diff(exp_map(v), g) < 1e-12);
        GroupElement gr = renormalized(g);
        double fro = std::sqrt((gr.a - 1) * (gr.a - 1) + gr.b * gr.b + gr.c * gr.c
                               + (gr.d - 1) * (gr.d - 1));
        if (fro >= 0.5)
            continue;
        ++tested;
        LieVector w = log_map(gr);
        CHECK(max_abs_diff(exp_map(w), gr) < 1e-9);
        for (int k = 0; k < 3; ++k)
            CHECK(w.coef[k] == doctest::Approx(v.coef[k]).epsilon(1e-9));
    }
    // Elliptic, parabolic, and tiny directions
    for (LieVector v : {LieVector{{0, 0.3, -0.3}}, LieVector{{0, 0, 0.4}},
                        LieVector{{1e-9, 2e-9, -3e-9}}, LieVector{{0.1, 0.1, -0.01}}})
    {
        CHECK(max_abs_diff(exp_map(log_map(exp_map(v))), exp_map(v)) < 1e-12);
    }
}

TEST_CASE("cartan")
{
    CHECK(cartan(GroupElement::identity()).a_param == 0);
    auto c = cartan(diagonal(2.0));
    CHECK(c.a_param == doctest::Approx(2));
    CHECK(max_abs_diff(compose(c), diagonal(2.0)) < 1e-12);
    auto c2 = cartan(diagonal(-2.0));
    CHECK(c2.a_param == doctest::Approx(2));
    CHECK(max_abs_diff(compose(c2), diagonal(-2.0)) < 1e-12);

    auto rng = make_rng(test_seed(), Purpose::pairs, 4);
    for (int i = 0; i < 1000; ++i)
    {
        GroupElement g = random_element(rng, 1.5);
        auto ct = cartan(g);
        CHECK(ct.a_param >= 0);
        CHECK(max_abs_diff(compose(ct), g) < 1e-8);
        CHECK(cartan_t(g) == doctest::Approx(ct.a_param).epsilon(1e-12));
        // Cartan parameter is the hyperbolic displacement of i
        double y = 1 / (g.c * g.c + g.d * g.d);
        double x = (g.a * g.c + g.b * g.d) * y;
        double dh = std::acosh(1 + (x * x + (y - 1) * (y - 1)) / (2 * y));
        CHECK(cartan_t(g) == doctest::Approx(dh).epsilon(1e-8));
    }
}

TEST_CASE("dist")
{
    auto rng = make_rng(test_seed(), Purpose::pairs, 5);
    GroupElement g = random_element(rng, 1.0);
    CHECK(dist(g, g) == 0);
    CHECK(rho(GroupElement{-1, 0, 0, -1}) == doctest::Approx(std::numbers::pi));

    // Closed forms along the symmetric and rotation directions
    for (double s : {0.01, 0.05, 0.1, 0.7})
    {
        CHECK(rho(exp_map({{s, 0, 0}})) == doctest::Approx(2 * s).epsilon(1e-12));
        CHECK(rho(rotation(s)) == doctest::Approx(s).epsilon(1e-12));
        CHECK(rho(exp_map({{0, s, s}})) == doctest::Approx(2 * s).epsilon(1e-12));
    }

    // First order: dist(exp(sv), I) = s N(v) + O(s^2)
    for (int i = 0; i < 1000; ++i)
    {
        LieVector v{{rng.normal(), rng.normal(), rng.normal()}};
        double n = v.norm();
        for (double& c : v.coef)
            c /= n;
        for (double s : {1e-4, 1e-3, 0.01, 0.1})
        {
            LieVector sv{{s * v.coef[0], s * v.coef[1], s * v.coef[2]}};
            double err = std::abs(rho(exp_map(sv)) - s * tangent_norm(v));
            CHECK(err <= 0.5 * s * s + 1e-13);
        }
    }

    for (int i = 0; i < 10000; ++i)
    {
        double scale = std::pow(10.0, rng.uniform(-2, 0.5));
        GroupElement a = random_element(rng, scale);
        GroupElement b = random_element(rng, scale);
        GroupElement c = random_element(rng, scale);
        GroupElement u = random_element(rng, 1.0);
        double dab = dist(a, b);
        // Exact in arithmetic; rounding grows with the entry sizes
        double cond = group_norm(a) * group_norm(b) * group_norm(u);
        CHECK(std::abs(dist(mul(a, u), mul(b, u)) - dab) <= 1e-10 + 1e-15 * cond);
        CHECK(dist(b, a) == doctest::Approx(dab).epsilon(1e-12));
        double dac = dist(a, c), dcb = dist(c, b);
        double D = std::max({dab, dac, dcb});
        CHECK(dab <= dac + dcb + homwalk::test::triangle_tolerance(D));
    }
}
