// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#include "homwalk/group.hpp"

#include <algorithm>
#include <numbers>

#include <fmt/core.h>

#include "homwalk/errors.hpp"

namespace homwalk
{
GroupElement renormalized(GroupElement g)
{
    double det = g.det();
    if (std::abs(det - 1) > 1e-12)
    {
        double s = 1 / std::sqrt(det);
        g.a *= s;
        g.b *= s;
        g.c *= s;
        g.d *= s;
    }
    return g;
}

GroupElement mul(GroupElement const& g, GroupElement const& h)
{
    return renormalized({g.a * h.a + g.b * h.c,
                         g.a * h.b + g.b * h.d,
                         g.c * h.a + g.d * h.c,
                         g.c * h.b + g.d * h.d});
}

bool operator==(GroupElement const& g, GroupElement const& h)
{
    return g.a == h.a && g.b == h.b && g.c == h.c && g.d == h.d;
}

double max_abs_diff(GroupElement const& g, GroupElement const& h)
{
    return std::max({std::abs(g.a - h.a),
                     std::abs(g.b - h.b),
                     std::abs(g.c - h.c),
                     std::abs(g.d - h.d)});
}

GroupElement upper_unipotent(double t)
{
    return {1, t, 0, 1};
}

GroupElement lower_unipotent(double t)
{
    return {1, 0, t, 1};
}

GroupElement rotation(double phi)
{
    double c = std::cos(phi);
    double s = std::sin(phi);
    return {c, -s, s, c};
}

GroupElement diagonal(double t)
{
    return {std::exp(t / 2), 0, 0, std::exp(-t / 2)};
}

double tangent_norm(LieVector const& v)
{
    auto [p, q, r] = v.coef;
    return std::sqrt(4 * p * p + (q + r) * (q + r) + (r - q) * (r - q) / 4);
}

Matrix3 adjoint(GroupElement const& g)
{
    auto [a, b, c, d] = g;
    // Columns are Ad(g)H, Ad(g)E, Ad(g)F expanded in (H, E, F)
    return {{{a * d + b * c, -a * c, b * d},
             {-2 * a * b, a * a, -b * b},
             {2 * c * d, -c * c, d * d}}};
}

double group_norm(GroupElement const& g)
{
    double result = 0;
    for (auto const& m : {adjoint(g), adjoint(g.inverse())})
    {
        for (auto const& row : m)
        {
            for (double v : row)
            {
                result = std::max(result, std::abs(v));
            }
        }
    }
    return result;
}

double operator_norm(GroupElement const& g)
{
    double e = (g.a + g.d) / 2, f = (g.a - g.d) / 2;
    double gg = (g.c + g.b) / 2, h = (g.c - g.b) / 2;
    return std::hypot(e, h) + std::hypot(f, gg);
}

LieVector log_map(GroupElement const& g)
{
    double fro = std::sqrt((g.a - 1) * (g.a - 1) + g.b * g.b + g.c * g.c
                           + (g.d - 1) * (g.d - 1));
    if (!(fro < 0.5))
    {
        throw LogDomainError(fmt::format(
            "log_map: |g - I|_F = {:.6g} is outside the principal domain 0.5",
            fro));
    }
    // g - (tr/2) I = (sinh s / s) X with s^2 = -det X; w = sinh^2 s
    double half_tr = (g.a + g.d) / 2;
    double m00 = (g.a - g.d) / 2;
    double w = m00 * m00 + g.b * g.c;
    double factor;
    if (std::abs(w) < 1e-8)
    {
        factor = 1 - w / 6 + 3 * w * w / 40;
    }
    else if (w > 0)
    {
        double s = std::sqrt(w);
        factor = std::asinh(s) / s;
    }
    else
    {
        double s = std::sqrt(-w);
        factor = std::atan2(s, half_tr) / s;
    }
    return {{factor * m00, factor * g.b, factor * g.c}};
}

GroupElement exp_map(LieVector const& v)
{
    auto [p, q, r] = v.coef;
    // X^2 = delta I
    double delta = p * p + q * r;
    double ch, sh;  // cosh(s), sinh(s)/s with s^2 = delta
    if (std::abs(delta) < 1e-6)
    {
        ch = 1 + delta / 2 * (1 + delta / 12 * (1 + delta / 30));
        sh = 1 + delta / 6 * (1 + delta / 20 * (1 + delta / 42));
    }
    else if (delta > 0)
    {
        double s = std::sqrt(delta);
        ch = std::cosh(s);
        sh = std::sinh(s) / s;
    }
    else
    {
        double s = std::sqrt(-delta);
        ch = std::cos(s);
        sh = std::sin(s) / s;
    }
    return renormalized({ch + sh * p, sh * q, sh * r, ch - sh * p});
}

CartanTriple cartan(GroupElement const& g)
{
    // g = E I + F diag(1,-1) + G (0 1; 1 0) + H (0 -1; 1 0); the E,H part is
    // a scaled rotation and the F,G part a scaled reflection.
    double e = (g.a + g.d) / 2, f = (g.a - g.d) / 2;
    double gg = (g.c + g.b) / 2, h = (g.c - g.b) / 2;
    double r = std::hypot(f, gg);
    double a1 = std::atan2(gg, f);
    double a2 = std::atan2(h, e);
    return {(a2 + a1) / 2, 2 * std::asinh(r), (a2 - a1) / 2};
}

GroupElement compose(CartanTriple const& c)
{
    return rotation(c.k1_angle) * diagonal(c.a_param) * rotation(c.k2_angle);
}

double cartan_t(GroupElement const& g)
{
    return 2 * std::asinh(std::hypot(g.a - g.d, g.b + g.c) / 2);
}

double polar_angle(GroupElement const& g)
{
    return std::atan2(g.c - g.b, g.a + g.d);
}

double rho(GroupElement const& u)
{
    return std::hypot(cartan_t(u), polar_angle(u));
}

double dist(GroupElement const& g, GroupElement const& h)
{
    return rho(mul(g, h.inverse()));
}

}  // namespace homwalk
