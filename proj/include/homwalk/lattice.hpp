// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "group.hpp"
#include "rng.hpp"

namespace homwalk
{
//! Integer 2x2 matrix, used for elements of SL(2, Z).
struct IntMatrix
{
    std::int64_t a{1}, b{0}, c{0}, d{1};

    friend bool operator==(IntMatrix const&, IntMatrix const&) = default;
};

IntMatrix operator*(IntMatrix const& m, IntMatrix const& n);
GroupElement to_group(IntMatrix const& m);

//---------------------------------------------------------------------------//
/*!
 * A coset g SL(2,Z) held by its canonical reduced representative.
 *
 * The representative factors as rep = rotation(theta) * A(x, y) with
 * A = (1/sqrt(y), -x/sqrt(y); 0, sqrt(y)); its columns (v1, v2) form a
 * Gauss-reduced basis of the lattice rep Z^2 with v1 at angle theta in
 * [0, pi). The point z = rep^{-1} i = x + iy lies in the standard
 * fundamental domain, and |v1| = y^{-1/2} is the shortest vector length.
 */
struct SpacePoint
{
    GroupElement rep;
    double x{0};
    double y{1};
    double theta{0};
};

struct HeightParams
{
    double kappa{1};
};

//! Identity coset.
SpacePoint base_point();

//! Coset of rotation(theta) * A(x, y), reduced.
SpacePoint point_from_iwasawa(double x, double y, double theta);

struct Reduction
{
    SpacePoint point;
    IntMatrix lambda;  //!< point.rep = g * lambda up to rounding
};

Reduction reduce_tracked(GroupElement const& g);
SpacePoint reduce(GroupElement const& g);

//! Coset of g * rep(p).
inline SpacePoint act(GroupElement const& g, SpacePoint const& p)
{
    return reduce(mul(g, p.rep));
}

//! Length of the shortest nonzero vector of rep Z^2.
inline double shortest_vector(SpacePoint const& p)
{
    return 1 / std::sqrt(p.y);
}

//! max(1, s^{-kappa}) with s the shortest vector length.
double height(SpacePoint const& p, HeightParams const& params = {});

//! Largest y in X(h) = {ht <= h}.
double y_limit(double h_bound, HeightParams const& params = {});

//---------------------------------------------------------------------------//
// Quotient distance
//---------------------------------------------------------------------------//

inline constexpr double kNoDistance = std::numeric_limits<double>::infinity();

//! rho(rep_p * lambda * rep_q^{-1}) for one lattice element.
double coset_displacement(SpacePoint const& p, IntMatrix const& lambda,
                          GroupElement const& rep_q_inv);

/*!
 * Entry bound for lambda in d_X(p, q) when the answer is at most D.
 *
 * If rho(u) <= D then t(u) <= D and |u|_op <= e^{D/2}; with
 * lambda = rep_p^{-1} u rep_q every entry is at most
 * |rep_p|_op |rep_q|_op e^{D/2}.
 */
std::int64_t lambda_entry_bound(SpacePoint const& p, SpacePoint const& q,
                                double D);

/*!
 * Precomputed lattice images of one point for distance queries up to D.
 *
 * A lambda can realize d_X(p, q) <= D only if d_H(z_p, lambda z_q) <= D,
 * because the Cartan parameter of rep_p lambda rep_q^{-1} equals that
 * hyperbolic distance and is bounded by rho. With z_q = x + iy this forces
 * Im(lambda z_q) = y / |c z_q + d|^2 >= y_p e^{-D}, so the bottom rows
 * (c, d) are the lattice points in an ellipse, and for each row the
 * remaining freedom lambda -> T^k lambda is a horizontal shift restricted to
 * a window of width 2 sqrt(2 y_p Im(lambda z_q) (cosh D - 1)).
 */
class BallQuery
{
  public:
    struct Image
    {
        IntMatrix lambda;  //!< c >= 0 representative of its row class
        double wx, wy;  //!< lambda z_q
        double theta;  //!< angle of rep_q lambda^{-1} e1, folded to [0, pi)
    };

    //! Images usable against points whose y is at least y_floor.
    BallQuery(SpacePoint const& q, double D, double y_floor = kMinY);

    //! d_X(p, q) if it is at most D, else kNoDistance.
    double distance(SpacePoint const& p) const;

    //! Smallest displacement over the T^k shifts of one image, if <= D.
    double image_distance(Image const& img, SpacePoint const& p) const;

    SpacePoint const& center() const { return q_; }
    double radius() const { return D_; }
    std::vector<Image> const& images() const { return images_; }

    static constexpr double kMinY = 0.8660254037844386 * (1 - 1e-9);

  private:
    SpacePoint q_;
    GroupElement q_inv_;
    double D_;
    double cosh_m1_;
    std::vector<Image> images_;
};

//! d_X(p, q) = min over lambda of rho(rep_p lambda rep_q^{-1}).
double dist_x(SpacePoint const& p, SpacePoint const& q);

//! d_X(p, q) if it is at most cap, else kNoDistance.
double dist_x_capped(SpacePoint const& p, SpacePoint const& q, double cap);

/*!
 * Half the smallest displacement rho(rep lambda rep^{-1}) over lambda != I.
 *
 * lambda = -I displaces by exactly pi, so the result is at most pi / 2.
 */
double injectivity_radius(SpacePoint const& p);

//! Count of lambda in SL(2,Z) with rho(g lambda h) < R.
std::int64_t lattice_points_in_ball(double R, GroupElement const& g,
                                    GroupElement const& h);

//---------------------------------------------------------------------------//
// Haar measure
//---------------------------------------------------------------------------//

//! Total mass of {y > y_max}, (3/pi) / y_max.
double haar_truncation_deficit(double y_max);

/*!
 * Haar samples on {y <= y_max}, normalized so X has mass one.
 *
 * y has density proportional to y^{-2} by inverse CDF, x is uniform with
 * rejection into x^2 + y^2 >= 1, and theta is uniform in [0, pi).
 */
std::vector<SpacePoint>
haar_sample(std::size_t count, double y_max, Seed const& seed);

//! Same as haar_sample but from an explicit generator; y_max > sqrt(3)/2.
SpacePoint haar_draw(double y_max, CounterRng& rng);

struct VolumeEstimate
{
    double value;
    double std_error;
};

/*!
 * Haar measure of the ball {rho(u) < delta} in G.
 *
 * Normalization matches haar_sample: the density is 3/pi^2 dx dy/y^2
 * dtheta. In Cartan coordinates u = k(alpha) a(t) k(beta) the measure is
 * (3/pi^2) sinh(t) dt dalpha dbeta over [0, 2 pi)^2 and the ball depends
 * only on t and s = alpha + beta; the estimator samples t with density
 * proportional to sinh t and s uniformly, then counts t^2 + s^2 < delta^2.
 * Results are cached per delta.
 */
VolumeEstimate haar_ball_volume_estimate(double delta);

inline double haar_ball_volume(double delta)
{
    return haar_ball_volume_estimate(delta).value;
}

}  // namespace homwalk
