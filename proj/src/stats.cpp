// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#include "homwalk/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <gsl/gsl_fit.h>

#include "homwalk/errors.hpp"

namespace homwalk
{
OlsFit ols(std::vector<double> const& x, std::vector<double> const& y)
{
    if (x.size() != y.size() || x.size() < 3)
        throw Error("ols: need at least 3 paired points");
    OlsFit f;
    f.n = x.size();
    double cov00, cov01, cov11, sumsq;
    gsl_fit_linear(x.data(), 1, y.data(), 1, x.size(), &f.intercept, &f.slope,
                   &cov00, &cov01, &cov11, &sumsq);
    f.slope_se = std::sqrt(cov11);
    f.intercept_se = std::sqrt(cov00);
    double mean = 0;
    for (double v : y)
        mean += v;
    mean /= static_cast<double>(y.size());
    double tss = 0;
    for (double v : y)
        tss += (v - mean) * (v - mean);
    f.r2 = tss > 0 ? 1 - sumsq / tss : 1.0;
    f.dof = static_cast<double>(f.n) - 2;
    return f;
}

OlsFit ols_grouped(std::vector<double> const& x, std::vector<double> const& y,
                   std::vector<int> const& group)
{
    if (x.size() != y.size() || x.size() != group.size())
        throw Error("ols_grouped: size mismatch");
    std::map<int, std::array<double, 3>> sums;  // count, sum x, sum y
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        auto& s = sums[group[i]];
        s[0] += 1;
        s[1] += x[i];
        s[2] += y[i];
    }
    double dof = static_cast<double>(x.size()) - static_cast<double>(sums.size()) - 1;
    if (dof < 1)
        throw Error("ols_grouped: not enough points for the number of groups");
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        auto const& s = sums[group[i]];
        double dx = x[i] - s[1] / s[0];
        double dy = y[i] - s[2] / s[0];
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0))
        throw Error("ols_grouped: no spread in x within groups");
    OlsFit f;
    f.n = x.size();
    f.dof = dof;
    f.slope = sxy / sxx;
    double rss = std::max(0.0, syy - f.slope * sxy);
    f.slope_se = std::sqrt(rss / dof / sxx);
    f.r2 = syy > 0 ? 1 - rss / syy : 1.0;
    for (auto const& [g, s] : sums)
        f.intercept += (s[2] - f.slope * s[1]) / s[0];
    f.intercept /= static_cast<double>(sums.size());
    f.intercept_se = std::numeric_limits<double>::quiet_NaN();
    return f;
}

double OlsFit::slope_lower(double confidence) const
{
    return slope - t_quantile(0.5 + confidence / 2, dof) * slope_se;
}

double OlsFit::slope_upper(double confidence) const
{
    return slope + t_quantile(0.5 + confidence / 2, dof) * slope_se;
}

double OlsFit::slope_lower_bound(double confidence) const
{
    return slope - t_quantile(confidence, dof) * slope_se;
}

double OlsFit::slope_upper_bound(double confidence) const
{
    return slope + t_quantile(confidence, dof) * slope_se;
}

double t_quantile(double p, double df)
{
    return boost::math::quantile(boost::math::students_t(df), p);
}

double chi2_sf(double stat, double df)
{
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), stat));
}

Interval wilson_interval(std::size_t k, std::size_t n, double z)
{
    if (n == 0)
        return {0, 1};
    double nn = static_cast<double>(n);
    double p = static_cast<double>(k) / nn;
    double z2 = z * z;
    double denom = 1 + z2 / nn;
    double center = (p + z2 / (2 * nn)) / denom;
    double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

void MeanAccumulator::add(double v)
{
    ++n_;
    double delta = v - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (v - mean_);
}

void MeanAccumulator::merge(MeanAccumulator const& o)
{
    if (o.n_ == 0)
        return;
    if (n_ == 0)
    {
        *this = o;
        return;
    }
    double n = static_cast<double>(n_ + o.n_);
    double delta = o.mean_ - mean_;
    mean_ += delta * static_cast<double>(o.n_) / n;
    m2_ += o.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
    n_ += o.n_;
}

double MeanAccumulator::variance() const
{
    return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double MeanAccumulator::std_error() const
{
    return n_ > 0 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

}  // namespace homwalk
