// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#include "homwalk/lattice.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>

#include <fmt/core.h>

#include "homwalk/errors.hpp"

namespace homwalk
{
namespace
{
constexpr double kPi = std::numbers::pi;
constexpr double kReduceTol = 1e-9;

struct Basis
{
    double v1x, v1y, v2x, v2y;
};

// Angle of v1 in [0, pi) after possibly negating the basis.
double fold_theta(Basis& b, bool& negated)
{
    double theta = std::atan2(b.v1y, b.v1x);
    negated = false;
    if (theta < 0 || theta >= kPi)
    {
        b = {-b.v1x, -b.v1y, -b.v2x, -b.v2y};
        theta = std::atan2(b.v1y, b.v1x);
        negated = true;
    }
    return theta + 0.0;
}

bool tolerance_reduced(Basis const& b, double& x, double& ratio)
{
    double n1 = b.v1x * b.v1x + b.v1y * b.v1y;
    double n2 = b.v2x * b.v2x + b.v2y * b.v2y;
    x = -(b.v1x * b.v2x + b.v1y * b.v2y) / n1;
    ratio = n2 / n1;
    return std::abs(x) <= 0.5 + kReduceTol && ratio >= 1 - kReduceTol;
}

// SL(2,Z) elements with entries in {-1, 0, 1}
std::vector<IntMatrix> const& small_lattice_elements()
{
    static std::vector<IntMatrix> const result = [] {
        std::vector<IntMatrix> out;
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b)
                for (int c = -1; c <= 1; ++c)
                    for (int d = -1; d <= 1; ++d)
                        if (a * d - b * c == 1)
                            out.push_back({a, b, c, d});
        return out;
    }();
    return result;
}

Basis apply(Basis const& b, IntMatrix const& w)
{
    auto a = static_cast<double>(w.a), bb = static_cast<double>(w.b);
    auto c = static_cast<double>(w.c), d = static_cast<double>(w.d);
    return {a * b.v1x + c * b.v2x,
            a * b.v1y + c * b.v2y,
            bb * b.v1x + d * b.v2x,
            bb * b.v1y + d * b.v2y};
}

IntMatrix negate(IntMatrix m)
{
    return {-m.a, -m.b, -m.c, -m.d};
}

// Returns g with a*d' - b*c' = gcd for (x, y) = (d', c')
std::int64_t ext_gcd(std::int64_t x, std::int64_t y, std::int64_t& s,
                     std::int64_t& t)
{
    std::int64_t s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (y != 0)
    {
        std::int64_t q = x / y;
        std::tie(x, y) = std::make_pair(y, x - q * y);
        std::tie(s0, s1) = std::make_pair(s1, s0 - q * s1);
        std::tie(t0, t1) = std::make_pair(t1, t0 - q * t1);
    }
    s = s0;
    t = t0;
    return x;
}

// A matrix (a b; c d) in SL(2,Z) with the given coprime bottom row
IntMatrix complete_row(std::int64_t c, std::int64_t d)
{
    std::int64_t s, t;
    std::int64_t g = ext_gcd(d, c, s, t);  // s d + t c = g = +-1
    if (g < 0)
    {
        s = -s;
        t = -t;
    }
    return {s, -t, c, d};
}

SpacePoint finish(Basis const& b)
{
    SpacePoint p;
    p.rep = renormalized({b.v1x, b.v2x, b.v1y, b.v2y});
    double n1 = p.rep.a * p.rep.a + p.rep.c * p.rep.c;
    p.y = 1 / n1;
    p.x = -(p.rep.a * p.rep.b + p.rep.c * p.rep.d) / n1;
    p.theta = std::atan2(p.rep.c, p.rep.a) + 0.0;
    return p;
}

double psi_from(GroupElement const& m, GroupElement const& q_inv)
{
    return rho(mul(m, q_inv));
}
}  // namespace

//---------------------------------------------------------------------------//
IntMatrix operator*(IntMatrix const& m, IntMatrix const& n)
{
    return {m.a * n.a + m.b * n.c,
            m.a * n.b + m.b * n.d,
            m.c * n.a + m.d * n.c,
            m.c * n.b + m.d * n.d};
}

GroupElement to_group(IntMatrix const& m)
{
    return {static_cast<double>(m.a),
            static_cast<double>(m.b),
            static_cast<double>(m.c),
            static_cast<double>(m.d)};
}

SpacePoint base_point()
{
    return reduce(GroupElement::identity());
}

SpacePoint point_from_iwasawa(double x, double y, double theta)
{
    double s = std::sqrt(y);
    return reduce(rotation(theta) * GroupElement{1 / s, -x / s, 0, s});
}

Reduction reduce_tracked(GroupElement const& g)
{
    Basis b{g.a, g.c, g.b, g.d};
    IntMatrix lam;
    double x, ratio;
    bool negated = false;
    bool ok = tolerance_reduced(b, x, ratio);
    double theta = std::atan2(b.v1y, b.v1x);
    if (!ok || theta < 0 || theta >= kPi)
    {
        for (int iter = 0; iter < 100000; ++iter)
        {
            double n1 = b.v1x * b.v1x + b.v1y * b.v1y;
            double n2 = b.v2x * b.v2x + b.v2y * b.v2y;
            if (n2 < n1)
            {
                // (v1, v2) <- (v2, -v1), i.e. right multiplication by S
                b = {b.v2x, b.v2y, -b.v1x, -b.v1y};
                lam = lam * IntMatrix{0, -1, 1, 0};
                continue;
            }
            double mu = std::round((b.v1x * b.v2x + b.v1y * b.v2y) / n1);
            if (mu == 0)
                break;
            b.v2x -= mu * b.v1x;
            b.v2y -= mu * b.v1y;
            lam = lam * IntMatrix{1, -static_cast<std::int64_t>(mu), 0, 1};
        }
        fold_theta(b, negated);
        if (negated)
            lam = negate(lam);
        tolerance_reduced(b, x, ratio);
    }

    if (std::abs(x) > 0.5 - kReduceTol || ratio < 1 + kReduceTol)
    {
        // Boundary of the fundamental domain: pick the candidate with the
        // smallest (theta, x) among all tolerance-reduced equivalents.
        Basis best = b;
        IntMatrix best_w;
        double best_theta = std::atan2(b.v1y, b.v1x) + 0.0;
        double best_x = x;
        for (IntMatrix const& w : small_lattice_elements())
        {
            Basis cand = apply(b, w);
            bool neg;
            double th = fold_theta(cand, neg);
            double cx, cr;
            if (!tolerance_reduced(cand, cx, cr))
                continue;
            if (th < best_theta || (th == best_theta && cx < best_x))
            {
                best = cand;
                best_w = neg ? negate(w) : w;
                best_theta = th;
                best_x = cx;
            }
        }
        b = best;
        lam = lam * best_w;
    }
    return {finish(b), lam};
}

SpacePoint reduce(GroupElement const& g)
{
    return reduce_tracked(g).point;
}

double height(SpacePoint const& p, HeightParams const& params)
{
    return std::max(1.0, std::pow(p.y, params.kappa / 2));
}

double y_limit(double h_bound, HeightParams const& params)
{
    return std::pow(h_bound, 2 / params.kappa);
}

//---------------------------------------------------------------------------//
double coset_displacement(SpacePoint const& p, IntMatrix const& lambda,
                          GroupElement const& rep_q_inv)
{
    return psi_from(mul(p.rep, to_group(lambda)), rep_q_inv);
}

std::int64_t lambda_entry_bound(SpacePoint const& p, SpacePoint const& q,
                                double D)
{
    double bound = operator_norm(p.rep) * operator_norm(q.rep)
                   * std::exp(D / 2);
    return static_cast<std::int64_t>(std::ceil(bound));
}

BallQuery::BallQuery(SpacePoint const& q, double D, double y_floor)
    : q_(q), q_inv_(q.rep.inverse()), D_(D), cosh_m1_(std::cosh(D) - 1)
{
    double dt = D * (1 + 1e-9) + 1e-12;
    double bound = q.y * std::exp(dt) / y_floor;
    auto c_max = static_cast<std::int64_t>(std::floor(std::sqrt(bound) / q.y));
    for (std::int64_t c = 0; c <= c_max; ++c)
    {
        double cy = static_cast<double>(c) * q.y;
        double rem = bound - cy * cy;
        if (rem < 0)
            continue;
        std::int64_t d_lo = 1, d_hi = 1;
        if (c == 0)
        {
            if (bound < 1)
                continue;
        }
        else
        {
            double mid = -static_cast<double>(c) * q.x;
            d_lo = static_cast<std::int64_t>(std::ceil(mid - std::sqrt(rem)));
            d_hi = static_cast<std::int64_t>(std::floor(mid + std::sqrt(rem)));
        }
        for (std::int64_t d = d_lo; d <= d_hi; ++d)
        {
            if (std::gcd(c, d) != 1)
                continue;
            IntMatrix lam = c == 0 ? IntMatrix{} : complete_row(c, d);
            auto a = static_cast<double>(lam.a), b = static_cast<double>(lam.b);
            auto cc = static_cast<double>(c), dd = static_cast<double>(d);
            double den_re = cc * q.x + dd, den_im = cc * q.y;
            double den = den_re * den_re + den_im * den_im;
            double num_re = a * q.x + b;
            Image img;
            img.lambda = lam;
            img.wx = (num_re * den_re + a * q.y * den_im) / den;
            img.wy = q.y / den;
            double ux = dd * q.rep.a - cc * q.rep.b;
            double uy = dd * q.rep.c - cc * q.rep.d;
            double th = std::atan2(uy, ux);
            if (th < 0)
                th += std::numbers::pi;
            if (th >= std::numbers::pi)
                th -= std::numbers::pi;
            img.theta = th;
            images_.push_back(img);
        }
    }
}

double BallQuery::image_distance(Image const& img, SpacePoint const& p) const
{
    double dt = D_ * (1 + 1e-9) + 1e-12;
    if (img.wy < p.y * std::exp(-dt) || img.wy > p.y * std::exp(dt))
        return kNoDistance;
    double w = std::sqrt(2 * p.y * img.wy * (cosh_m1_ * (1 + 1e-9) + 1e-15))
               + 1e-9;
    auto k_lo = static_cast<std::int64_t>(std::ceil(p.x - img.wx - w));
    auto k_hi = static_cast<std::int64_t>(std::floor(p.x - img.wx + w));
    double best = kNoDistance;
    for (std::int64_t k = k_lo; k <= k_hi; ++k)
    {
        IntMatrix lam{img.lambda.a + k * img.lambda.c,
                      img.lambda.b + k * img.lambda.d,
                      img.lambda.c,
                      img.lambda.d};
        GroupElement m = mul(p.rep, to_group(lam));
        best = std::min(best, psi_from(m, q_inv_));
        best = std::min(best, psi_from({-m.a, -m.b, -m.c, -m.d}, q_inv_));
    }
    return best <= D_ ? best : kNoDistance;
}

double BallQuery::distance(SpacePoint const& p) const
{
    double best = kNoDistance;
    for (Image const& img : images_)
        best = std::min(best, image_distance(img, p));
    return best;
}

double dist_x(SpacePoint const& p, SpacePoint const& q)
{
    GroupElement q_inv = q.rep.inverse();
    GroupElement m = p.rep;
    double d0 = std::min(psi_from(m, q_inv),
                         psi_from({-m.a, -m.b, -m.c, -m.d}, q_inv));
    double d = BallQuery(q, d0, std::min(p.y, BallQuery::kMinY)).distance(p);
    return std::min(d0, d);
}

double dist_x_capped(SpacePoint const& p, SpacePoint const& q, double cap)
{
    GroupElement q_inv = q.rep.inverse();
    GroupElement m = p.rep;
    double d0 = std::min(psi_from(m, q_inv),
                         psi_from({-m.a, -m.b, -m.c, -m.d}, q_inv));
    double D = std::min(cap, d0);
    double d = BallQuery(q, D, std::min(p.y, BallQuery::kMinY)).distance(p);
    d = std::min(d, d0);
    return d <= cap ? d : kNoDistance;
}

double injectivity_radius(SpacePoint const& p)
{
    GroupElement inv = p.rep.inverse();
    // Feasible start from a few short elements; -I always gives pi
    double best = kPi;
    for (IntMatrix const& w : small_lattice_elements())
    {
        if (w == IntMatrix{} || w == IntMatrix{-1, 0, 0, -1})
            continue;
        best = std::min(best, coset_displacement(p, w, inv));
    }
    BallQuery query(p, best, std::min(p.y, BallQuery::kMinY));
    double dt = best * (1 + 1e-9) + 1e-12;
    double cosh_m1 = std::cosh(best) - 1;
    for (auto const& img : query.images())
    {
        if (img.wy < p.y * std::exp(-dt) || img.wy > p.y * std::exp(dt))
            continue;
        double w = std::sqrt(2 * p.y * img.wy * (cosh_m1 * (1 + 1e-9) + 1e-15))
                   + 1e-9;
        auto k_lo = static_cast<std::int64_t>(std::ceil(p.x - img.wx - w));
        auto k_hi = static_cast<std::int64_t>(std::floor(p.x - img.wx + w));
        for (std::int64_t k = k_lo; k <= k_hi; ++k)
        {
            IntMatrix lam{img.lambda.a + k * img.lambda.c,
                          img.lambda.b + k * img.lambda.d,
                          img.lambda.c,
                          img.lambda.d};
            if (lam == IntMatrix{})
                continue;  // its negative is -I, already counted
            best = std::min(best, coset_displacement(p, lam, inv));
            best = std::min(best, coset_displacement(p, negate(lam), inv));
        }
    }
    return best / 2;
}

std::int64_t lattice_points_in_ball(double R, GroupElement const& g,
                                    GroupElement const& h)
{
    if (R <= 0)
        return 0;
    double bound_d = operator_norm(g) * operator_norm(h) * std::exp(R / 2);
    if (bound_d > 1e6)
        throw BudgetExceeded("lattice_points_in_ball: entry bound too large");
    auto L = static_cast<std::int64_t>(std::ceil(bound_d));
    double box = std::pow(2.0 * static_cast<double>(L) + 1, 3);
    if (box > 1e8)
    {
        throw BudgetExceeded(fmt::format(
            "lattice_points_in_ball: {:.3g} candidates exceed 1e8", box));
    }
    std::int64_t count = 0;
    for (std::int64_t a = -L; a <= L; ++a)
    {
        for (std::int64_t c = -L; c <= L; ++c)
        {
            if (std::gcd(a, c) != 1)
                continue;
            // Columns (a, c) and (b, d) with a d - b c = 1:
            // (b, d) = (b0 + k a, d0 + k c)
            std::int64_t s, t;
            std::int64_t gg = ext_gcd(a, c, s, t);  // s a + t c = gg
            if (gg < 0)
            {
                s = -s;
                t = -t;
            }
            std::int64_t b0 = -t, d0 = s;
            double k_lo = -1e18, k_hi = 1e18;
            auto restrict = [&](std::int64_t base, std::int64_t step) {
                if (step == 0)
                {
                    if (std::abs(base) > L)
                        k_hi = -1e18;
                    return;
                }
                double lo = (static_cast<double>(-L - base)) / step;
                double hi = (static_cast<double>(L - base)) / step;
                if (lo > hi)
                    std::swap(lo, hi);
                k_lo = std::max(k_lo, std::ceil(lo));
                k_hi = std::min(k_hi, std::floor(hi));
            };
            restrict(b0, a);
            restrict(d0, c);
            for (double kk = k_lo; kk <= k_hi; kk += 1)
            {
                auto k = static_cast<std::int64_t>(kk);
                IntMatrix lam{a, b0 + k * a, c, d0 + k * c};
                if (rho(mul(mul(g, to_group(lam)), h)) < R)
                    ++count;
            }
        }
    }
    return count;
}

//---------------------------------------------------------------------------//
double haar_truncation_deficit(double y_max)
{
    return 3 / kPi / y_max;
}

SpacePoint haar_draw(double y_max, CounterRng& rng)
{
    constexpr double y0 = 0.8660254037844386;
    double inv0 = 1 / y0, inv1 = 1 / y_max;
    for (;;)
    {
        double y = 1 / (inv0 - rng.uniform() * (inv0 - inv1));
        double x = rng.uniform(-0.5, 0.5);
        double theta = rng.uniform(0, kPi);
        if (x * x + y * y >= 1)
            return point_from_iwasawa(x, y, theta);
    }
}

std::vector<SpacePoint>
haar_sample(std::size_t count, double y_max, Seed const& seed)
{
    if (!(y_max > 2))
        throw InvalidRadius("haar_sample: y_max must exceed 2");
    std::vector<SpacePoint> out(count);
    constexpr std::size_t chunk = 4096;
    std::size_t n_chunks = (count + chunk - 1) / chunk;
#pragma omp parallel for schedule(static)
    for (std::size_t ci = 0; ci < n_chunks; ++ci)
    {
        CounterRng rng = make_rng(seed, Purpose::haar, ci);
        std::size_t end = std::min(count, (ci + 1) * chunk);
        for (std::size_t i = ci * chunk; i < end; ++i)
            out[i] = haar_draw(y_max, rng);
    }
    return out;
}

VolumeEstimate haar_ball_volume_estimate(double delta)
{
    if (!(delta > 0))
        throw InvalidRadius("haar_ball_volume: delta must be positive");
    static std::mutex mutex;
    static std::map<double, VolumeEstimate> cache;
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(delta); it != cache.end())
            return it->second;
    }
    constexpr std::size_t samples = 2'000'000;
    constexpr std::size_t chunk = 1 << 16;
    std::size_t n_chunks = (samples + chunk - 1) / chunk;
    double s_max = std::min(delta, kPi);
    double cm1 = std::cosh(delta) - 1;
    double d2 = delta * delta;
    std::vector<std::size_t> hits(n_chunks, 0);
    Seed seed{{0x5eed0f0b0a11u, 0x0c0ffee}, 0};
#pragma omp parallel for schedule(static)
    for (std::size_t ci = 0; ci < n_chunks; ++ci)
    {
        CounterRng rng = make_rng(seed, Purpose::volume, ci);
        std::size_t end = std::min(samples, (ci + 1) * chunk);
        std::size_t local = 0;
        for (std::size_t i = ci * chunk; i < end; ++i)
        {
            double t = std::acosh(1 + rng.uniform() * cm1);
            double s = rng.uniform(-s_max, s_max);
            local += (t * t + s * s < d2);
        }
        hits[ci] = local;
    }
    double p = static_cast<double>(std::accumulate(hits.begin(), hits.end(), std::size_t{0}))
               / samples;
    double scale = 12 * s_max / kPi * cm1;
    VolumeEstimate est{scale * p, scale * std::sqrt(p * (1 - p) / samples)};
    std::lock_guard lock(mutex);
    cache.emplace(delta, est);
    return est;
}

}  // namespace homwalk
