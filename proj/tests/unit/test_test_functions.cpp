// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "homwalk/test_functions.hpp"
#include "support/fixtures.hpp"
#include "support/random_elements.hpp"

using namespace homwalk;
using namespace homwalk::test;

TEST_CASE("declared Lipschitz bounds")
{
    auto fs = default_test_functions(10);
    fs.push_back(TestFunction::bump(point_from_iwasawa(0.2, 1.3, 0.4), 0.3));
    fs.push_back(TestFunction::iwasawa_smooth(3, 2, 3, 0.2, 1.0));
    auto rng = make_rng(test_seed(40), Purpose::pairs);
    for (auto const& f : fs)
    {
        double worst = 0;
        for (int i = 0; i < 10000; ++i)
        {
            // Concentrate points where f varies
            SpacePoint p = haar_draw(6.0, rng);
            SpacePoint q = reduce(mul(random_element(rng, 0.05 * rng.uniform()), p.rep));
            double fp = f(p), fq = f(q);
            CHECK(std::abs(fp) <= 1);
            double d = dist_x(p, q);
            if (d > 0)
                worst = std::max(worst, std::abs(fp - fq) / d);
        }
        INFO(f.label() << " observed " << worst << " declared " << f.lipschitz_bound());
        CHECK(worst <= f.lipschitz_bound());
    }
}

TEST_CASE("test function values")
{
    auto c = point_from_iwasawa(0.1, 1.4, 0.3);
    auto b = TestFunction::bump(c, 0.5);
    CHECK(b(c) == doctest::Approx(1));
    auto far = point_from_iwasawa(0.1, 5.0, 0.3);
    CHECK(b(far) == 0);
    CHECK(TestFunction::constant(0.25)(far) == 0.25);
    auto s = TestFunction::iwasawa_smooth(0, 0, 1);
    CHECK(s(point_from_iwasawa(0.45, 0.9, 0)) == 0);
    CHECK(s(point_from_iwasawa(0, std::exp(0.75), 0)) == doctest::Approx(1));
}

TEST_CASE("haar integrals")
{
    std::vector<TestFunction> fs{TestFunction::iwasawa_smooth(0, 0, 1),
                                 TestFunction::iwasawa_smooth(1, 0, 1),
                                 TestFunction::constant(0.5)};
    auto h = haar_integrals(fs, 200000, test_seed(41));
    CHECK(std::abs(h[0].value - kHaarIwasawa001) < 4 * h[0].std_error);
    // Full periods in x on y >= 1
    CHECK(std::abs(h[1].value) < 4 * h[1].std_error);
    CHECK(h[2].value == 0.5);
    CHECK_THROWS(haar_integrals({TestFunction::bump(point_from_iwasawa(0, 50, 0), 1)},
                                10, test_seed(41), 20));
}
