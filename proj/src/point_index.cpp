// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#include "homwalk/point_index.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "homwalk/errors.hpp"

namespace homwalk
{
namespace
{
constexpr double kPi = std::numbers::pi;
constexpr std::int64_t kOffset = std::int64_t{1} << 20;
constexpr std::uint64_t kMask = (std::uint64_t{1} << 21) - 1;

std::int64_t floor_div(double v)
{
    return static_cast<std::int64_t>(std::floor(v));
}

std::int64_t wrap(std::int64_t i, std::int64_t n)
{
    i %= n;
    return i < 0 ? i + n : i;
}

// Visit cell indices lo..hi modulo n, each at most once.
template<class F>
void for_each_wrapped(std::int64_t lo, std::int64_t hi, std::int64_t n, F&& f)
{
    if (hi - lo + 1 >= n)
    {
        for (std::int64_t i = 0; i < n; ++i)
            f(i);
        return;
    }
    for (std::int64_t i = lo; i <= hi; ++i)
        f(wrap(i, n));
}

double slack(double D)
{
    return D * (1 + 1e-9) + 1e-12;
}

double angle_window(double D)
{
    return std::sqrt(5.0) / 2 * slack(D) + 1e-12;
}
}  // namespace

//---------------------------------------------------------------------------//
CellGrid::CellGrid(double h, Mode mode)
    : h_(h)
    , mode_(mode)
    , eta0_(mode == Mode::quotient ? std::log(BallQuery::kMinY) : 0.0)
{
    if (!(h > 0))
        throw InvalidRadius("CellGrid: cell side must be positive");
    double period = mode == Mode::quotient ? kPi : 2 * kPi;
    n_theta_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(period / h)));
    theta_width_ = period / static_cast<double>(n_theta_);
}

std::int64_t CellGrid::eta_cell(double y) const
{
    return floor_div((std::log(y) - eta0_) / h_);
}

double CellGrid::eta_lo(std::int64_t e) const
{
    return eta0_ + static_cast<double>(e) * h_;
}

double CellGrid::x_width(std::int64_t e) const
{
    double w = h_ * std::exp(eta_lo(e));
    if (mode_ == Mode::group)
        return w;
    return 1 / static_cast<double>(x_count(e));
}

std::int64_t CellGrid::x_count(std::int64_t e) const
{
    double w = h_ * std::exp(eta_lo(e));
    return std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(1 / w)));
}

std::int64_t CellGrid::x_cell(std::int64_t e, double x) const
{
    if (mode_ == Mode::group)
        return floor_div(x / x_width(e));
    std::int64_t n = x_count(e);
    return wrap(floor_div((x + 0.5) * static_cast<double>(n)), n);
}

std::int64_t CellGrid::theta_cell(double theta) const
{
    double t = mode_ == Mode::group ? theta + kPi : theta;
    return wrap(floor_div(t / theta_width_), n_theta_);
}

std::uint64_t CellGrid::pack(std::int64_t e, std::int64_t xc, std::int64_t tc) const
{
    auto u = [](std::int64_t v) {
        return static_cast<std::uint64_t>(v + kOffset) & kMask;
    };
    return (u(e) << 42) | (u(xc) << 21) | u(tc);
}

std::uint64_t CellGrid::key(double x, double y, double theta) const
{
    std::int64_t e = eta_cell(y);
    return pack(e, x_cell(e, x), theta_cell(theta));
}

GroupCoords group_coords(GroupElement const& g)
{
    double n1 = g.a * g.a + g.c * g.c;
    return {-(g.a * g.b + g.c * g.d) / n1, 1 / n1, std::atan2(g.c, g.a)};
}

//---------------------------------------------------------------------------//
PointIndex::PointIndex(double cell_side)
    : grid_(cell_side, CellGrid::Mode::quotient)
{
}

std::uint32_t PointIndex::insert(SpacePoint const& p)
{
    auto id = static_cast<std::uint32_t>(points_.size());
    points_.push_back(p);
    cells_[grid_.key(p.x, p.y, p.theta)].push_back(id);
    return id;
}

void PointIndex::query(SpacePoint const& q, double D,
                       std::function<bool(std::uint32_t, double)> const& visit) const
{
    if (points_.empty())
        return;
    BallQuery bq(q, D);
    double Dp = slack(D);
    double cosh_m1 = (std::cosh(D) - 1) * (1 + 1e-9) + 1e-15;
    double tw = angle_window(D);
    for (auto const& img : bq.images())
    {
        double leta = std::log(img.wy);
        std::int64_t e_lo = std::max<std::int64_t>(
            0, floor_div((leta - Dp - grid_.eta_lo(0)) / grid_.side()));
        std::int64_t e_hi = floor_div((leta + Dp - grid_.eta_lo(0)) / grid_.side());
        std::int64_t nt = grid_.theta_count();
        double twidth = kPi / static_cast<double>(nt);
        std::int64_t t_lo = floor_div((img.theta - tw) / twidth);
        std::int64_t t_hi = floor_div((img.theta + tw) / twidth);
        for (std::int64_t e = e_lo; e <= e_hi; ++e)
        {
            double y_hi = std::exp(grid_.eta_lo(e + 1));
            double w = std::sqrt(2 * y_hi * img.wy * cosh_m1) + 1e-9;
            std::int64_t nx = grid_.x_count(e);
            auto fn = static_cast<double>(nx);
            std::int64_t x_lo = floor_div((img.wx - w + 0.5) * fn);
            std::int64_t x_hi = floor_div((img.wx + w + 0.5) * fn);
            bool stop = false;
            for_each_wrapped(x_lo, x_hi, nx, [&](std::int64_t xc) {
                if (stop)
                    return;
                for_each_wrapped(t_lo, t_hi, nt, [&](std::int64_t tc) {
                    if (stop)
                        return;
                    auto it = cells_.find(grid_.pack(e, xc, tc));
                    if (it == cells_.end())
                        return;
                    for (std::uint32_t id : it->second)
                    {
                        double d = bq.image_distance(img, points_[id]);
                        if (d != kNoDistance && !visit(id, d))
                        {
                            stop = true;
                            return;
                        }
                    }
                });
            });
            if (stop)
                return;
        }
    }
}

bool PointIndex::any_closer(SpacePoint const& q, double D) const
{
    bool found = false;
    query(q, D, [&](std::uint32_t, double d) {
        if (d < D)
        {
            found = true;
            return false;
        }
        return true;
    });
    return found;
}

double PointIndex::nearest(SpacePoint const& q, double D) const
{
    double best = kNoDistance;
    query(q, D, [&](std::uint32_t, double d) {
        best = std::min(best, d);
        return true;
    });
    return best;
}

//---------------------------------------------------------------------------//
GroupIndex::GroupIndex(double cell_side)
    : grid_(cell_side, CellGrid::Mode::group)
{
}

std::uint32_t GroupIndex::insert(GroupElement const& g)
{
    auto id = static_cast<std::uint32_t>(elems_.size());
    elems_.push_back(g);
    GroupCoords c = group_coords(g);
    coords_.push_back(c);
    cells_[grid_.key(c.x, c.y, c.theta)].push_back(id);
    return id;
}

void GroupIndex::query(GroupElement const& g, double D,
                       std::function<void(std::uint32_t, double)> const& visit) const
{
    // rho(g h^{-1}) <= D forces d_H(g^{-1} i, h^{-1} i) <= D and an angle
    // change of at most (sqrt 5 / 2) D between first columns.
    GroupCoords c = group_coords(g);
    double Dp = slack(D);
    double cosh_m1 = (std::cosh(D) - 1) * (1 + 1e-9) + 1e-15;
    double tw = angle_window(D);
    GroupElement g_inv = g.inverse();
    double leta = std::log(c.y);
    std::int64_t e_lo = floor_div((leta - Dp) / grid_.side());
    std::int64_t e_hi = floor_div((leta + Dp) / grid_.side());
    std::int64_t nt = grid_.theta_count();
    double twidth = 2 * kPi / static_cast<double>(nt);
    std::int64_t t_lo = floor_div((c.theta + kPi - tw) / twidth);
    std::int64_t t_hi = floor_div((c.theta + kPi + tw) / twidth);
    for (std::int64_t e = e_lo; e <= e_hi; ++e)
    {
        double y_hi = std::exp(grid_.eta_lo(e + 1));
        double w = std::sqrt(2 * y_hi * c.y * cosh_m1) + 1e-12;
        double xw = grid_.x_width(e);
        std::int64_t x_lo = floor_div((c.x - w) / xw);
        std::int64_t x_hi = floor_div((c.x + w) / xw);
        for (std::int64_t xc = x_lo; xc <= x_hi; ++xc)
        {
            for_each_wrapped(t_lo, t_hi, nt, [&](std::int64_t tc) {
                auto it = cells_.find(grid_.pack(e, xc, tc));
                if (it == cells_.end())
                    return;
                for (std::uint32_t id : it->second)
                {
                    // rho(g h^{-1}) = rho(h g^{-1})
                    double d = rho(mul(elems_[id], g_inv));
                    if (d <= D)
                        visit(id, d);
                }
            });
        }
    }
}

//---------------------------------------------------------------------------//
std::vector<SpacePoint>
net(double h_bound, double r, HeightParams const& params, Seed const& seed)
{
    if (!(r > 0))
        throw InvalidRadius("net: r must be positive");
    if (!(h_bound >= 1))
        throw InvalidRadius("net: height bound must be at least 1");
    double y_max = y_limit(h_bound, params);
    PointIndex index(r);

    auto try_insert = [&](SpacePoint const& p) {
        if (!index.any_closer(p, r))
            index.insert(p);
    };

    double s = r / 3;
    double eta_min = std::log(std::sqrt(3.0) / 2);
    double eta_max = std::log(y_max);
    auto n_theta = static_cast<std::int64_t>(std::ceil(kPi / s));
    for (double eta = eta_min + s / 2; eta <= eta_max + s / 2; eta += s)
    {
        double y = std::exp(std::min(eta, eta_max));
        auto n_x = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(1 / (s * y))));
        for (std::int64_t j = 0; j < n_x; ++j)
        {
            double x = -0.5 + (static_cast<double>(j) + 0.5) / static_cast<double>(n_x);
            if (x * x + y * y < 1)
                continue;
            for (std::int64_t k = 0; k < n_theta; ++k)
            {
                double th = (static_cast<double>(k) + 0.5) * kPi / static_cast<double>(n_theta);
                try_insert(point_from_iwasawa(x, y, th));
            }
        }
    }

    constexpr int batch = 10000;
    int clean = 0;
    for (std::uint64_t b = 0; clean < 4 && b < 200; ++b)
    {
        CounterRng rng = make_rng(seed, Purpose::net_repair, b);
        std::size_t before = index.size();
        for (int i = 0; i < batch; ++i)
        {
            SpacePoint p = haar_draw(y_max, rng);
            if (index.nearest(p, r) == kNoDistance)
                index.insert(p);
        }
        clean = index.size() == before ? clean + 1 : 0;
    }
    return index.points();
}

}  // namespace homwalk
