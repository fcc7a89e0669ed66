// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#pragma once

#include "homwalk/group.hpp"
#include "homwalk/rng.hpp"

namespace homwalk::test
{
inline Seed test_seed(std::uint64_t stream = 0)
{
    return Seed{{0x0123456789abcdefull, 0xfedcba9876543210ull}, stream};
}

//! exp of a Gaussian Lie vector with standard deviation `scale`.
inline GroupElement random_element(CounterRng& rng, double scale)
{
    return exp_map({{scale * rng.normal(), scale * rng.normal(),
                     scale * rng.normal()}});
}

//! Plain 2x2 product without renormalization.
inline GroupElement naive_mul(GroupElement const& g, GroupElement const& h)
{
    return {g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d,
            g.c * h.a + g.d * h.c, g.c * h.b + g.d * h.d};
}

//! Largest triangle defect of dist seen for triples at pairwise scale D.
inline double triangle_tolerance(double D)
{
    return D <= 2 ? 0.01 * D * D * D : 0.15 * D;
}

}  // namespace homwalk::test
