// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lattice.hpp"

namespace homwalk
{
//---------------------------------------------------------------------------//
/*!
 * Bounded Lipschitz functions on X with |f| <= 1.
 *
 * - bump: max(0, 1 - d_X(x, c) / R). Since d_X satisfies the triangle
 *   inequality only up to a small relative defect, the declared constant is
 *   1.05 / R.
 * - iwasawa_smooth: cos(2 pi k x) cos(2 m theta) s(eta) with eta = log y
 *   and s = sin^2(l pi (eta - eta_a) / (eta_b - eta_a)) on [eta_a, eta_b],
 *   zero outside. With eta_a >= 0 the support avoids the unit arc, so the
 *   function is continuous on X for even m. In the local frame
 *   (d eta, dx / y, d theta + dx / (2 y)) the gradient is bounded by
 *   sqrt((l pi / w)^2 + (2 pi k y_b + m)^2 + (2 m)^2), w = eta_b - eta_a.
 * - constant: f = c.
 */
class TestFunction
{
  public:
    static TestFunction bump(SpacePoint const& center, double radius);
    static TestFunction iwasawa_smooth(int k, int m, int l, double eta_a = 0,
                                       double eta_b = 1.5);
    static TestFunction constant(double c);

    double operator()(SpacePoint const& p) const;

    double lipschitz_bound() const { return lip_; }
    double sup_norm() const { return sup_; }
    std::string const& label() const { return label_; }

    //! f vanishes where y exceeds this value (infinite for constants).
    double support_y_max() const { return y_support_; }

  private:
    enum class Kind
    {
        bump,
        smooth,
        constant
    };
    TestFunction() = default;

    Kind kind_{Kind::constant};
    std::shared_ptr<BallQuery const> ball_;
    double radius_{0};
    int k_{0}, m_{0}, l_{0};
    double eta_a_{0}, eta_b_{0};
    double c_{0};
    double lip_{0};
    double sup_{0};
    double y_support_{0};
    std::string label_;
};

//! Alternating bumps at fixed points and Iwasawa modes; every further ten
//! use smaller bumps and higher modes.
std::vector<TestFunction> default_test_functions(std::size_t count,
                                                 double bump_radius = 1.2);

//---------------------------------------------------------------------------//
struct HaarIntegral
{
    double value;
    double std_error;
};

/*!
 * Integral against m_X from Haar samples on {y <= y_max}.
 *
 * The samples are conditioned on y <= y_max; the truncated mass is
 * 3 / (pi y_max), and f vanishes there when y_max exceeds support_y_max.
 */
std::vector<HaarIntegral> haar_integrals(std::vector<TestFunction> const& fs,
                                         std::size_t samples, Seed const& seed,
                                         double y_max = 1e3);

}  // namespace homwalk
