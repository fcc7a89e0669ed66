// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#pragma once

#include <cstddef>
#include <vector>

namespace homwalk
{
//! Ordinary least squares y = intercept + slope x.
struct OlsFit
{
    double slope{0};
    double intercept{0};
    double r2{0};
    double slope_se{0};
    double intercept_se{0};
    std::size_t n{0};
    double dof{0};  //!< residual degrees of freedom

    //! Two-sided interval slope +- t_{1-alpha/2, dof} slope_se.
    double slope_lower(double confidence = 0.95) const;
    double slope_upper(double confidence = 0.95) const;

    //! One-sided bounds slope -+ t_{confidence, dof} slope_se.
    double slope_lower_bound(double confidence = 0.95) const;
    double slope_upper_bound(double confidence = 0.95) const;
};

//! Requires at least 3 points; R^2 is 1 when y has no spread.
OlsFit ols(std::vector<double> const& x, std::vector<double> const& y);

/*!
 * Common slope with one intercept per group (within estimator).
 *
 * x and y are centered within each group and regressed through the origin;
 * residual degrees of freedom are n - groups - 1. The intercept field is
 * the mean of the per-group intercepts.
 */
OlsFit ols_grouped(std::vector<double> const& x, std::vector<double> const& y,
                   std::vector<int> const& group);

//! Two-sided Student t quantile t_{p, df}.
double t_quantile(double p, double df);

//! Upper tail of the chi-square distribution.
double chi2_sf(double stat, double df);

struct Interval
{
    double lo, hi;
};

//! Wilson score interval for k successes in n trials at the given z.
Interval wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054);

//! Running mean and variance (Welford).
class MeanAccumulator
{
  public:
    void add(double v);
    void merge(MeanAccumulator const& other);

    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const;  //!< unbiased
    double std_error() const;

  private:
    std::size_t n_{0};
    double mean_{0};
    double m2_{0};
};

}  // namespace homwalk
