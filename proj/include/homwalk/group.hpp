// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#pragma once

#include <array>
#include <cmath>

namespace homwalk
{
//---------------------------------------------------------------------------//
/*!
 * Element of SL(2, R) stored row-major as (a b; c d).
 *
 * The inverse (d -b; -c a) is exact and O(1), so it is computed on demand
 * rather than stored.
 */
struct GroupElement
{
    double a{1}, b{0}, c{0}, d{1};

    double det() const { return a * d - b * c; }
    GroupElement inverse() const { return {d, -b, -c, a}; }

    static GroupElement identity() { return {}; }
};

//! Scale to unit determinant when drift exceeds 1e-12.
GroupElement renormalized(GroupElement g);

GroupElement mul(GroupElement const& g, GroupElement const& h);

inline GroupElement operator*(GroupElement const& g, GroupElement const& h)
{
    return mul(g, h);
}

bool operator==(GroupElement const& g, GroupElement const& h);

//! Max entrywise difference.
double max_abs_diff(GroupElement const& g, GroupElement const& h);

// Named one-parameter families
GroupElement upper_unipotent(double t);  // (1 t; 0 1)
GroupElement lower_unipotent(double t);  // (1 0; t 1)
GroupElement rotation(double phi);  // (cos -sin; sin cos)
GroupElement diagonal(double t);  // diag(e^{t/2}, e^{-t/2})

//---------------------------------------------------------------------------//
//! Coefficients in the basis H = (1 0; 0 -1), E = (0 1; 0 0), F = (0 0; 1 0).
struct LieVector
{
    std::array<double, 3> coef{0, 0, 0};

    double norm() const
    {
        return std::sqrt(coef[0] * coef[0] + coef[1] * coef[1]
                         + coef[2] * coef[2]);
    }
};

/*!
 * First-order size of exp(sX) under dist: dist(exp(sX), I) = s N(X) + O(s^2).
 *
 * N(pH + qE + rF)^2 = 4p^2 + (q + r)^2 + (r - q)^2 / 4, i.e. twice the top
 * eigenvalue of the symmetric part, combined with the rotation rate of the
 * skew part.
 */
double tangent_norm(LieVector const& v);

using Matrix3 = std::array<std::array<double, 3>, 3>;

//! Matrix of X -> gXg^{-1} in the basis (H, E, F).
Matrix3 adjoint(GroupElement const& g);

//! max |entries| of Ad(g) and Ad(g^{-1}).
double group_norm(GroupElement const& g);

//! Largest singular value.
double operator_norm(GroupElement const& g);

//! Principal logarithm; throws LogDomainError unless |g - I|_F < 0.5.
LieVector log_map(GroupElement const& g);

GroupElement exp_map(LieVector const& v);

//---------------------------------------------------------------------------//
//! g = rotation(k1) * diagonal(t) * rotation(k2) with t >= 0.
struct CartanTriple
{
    double k1_angle{0};
    double a_param{0};
    double k2_angle{0};
};

CartanTriple cartan(GroupElement const& g);
GroupElement compose(CartanTriple const& c);

//! Cartan parameter t = log(sigma_max / sigma_min), also d_H(i, g i).
double cartan_t(GroupElement const& g);

//! Signed angle of the rotation factor in the polar decomposition, (-pi, pi].
double polar_angle(GroupElement const& g);

/*!
 * Displacement of u from the identity: sqrt(t(u)^2 + polar_angle(u)^2).
 *
 * Invariant under u -> u^{-1} and under conjugation by rotations; rho(-I) is
 * pi.
 */
double rho(GroupElement const& u);

//! Right-invariant distance rho(g h^{-1}).
double dist(GroupElement const& g, GroupElement const& h);

}  // namespace homwalk
