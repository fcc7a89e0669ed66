// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "lattice.hpp"

namespace homwalk
{
//---------------------------------------------------------------------------//
/*!
 * Cells of side h in the coordinates (log y, x / y, theta).
 *
 * Within a log-y band the x width is h * y_lo, so in the local frame
 * ds^2 = d(eta)^2 + d(xi)^2 + (d(theta) + xi / 2)^2 each cell has diameter
 * at most about 2.06 h. In quotient mode x wraps with period 1 and theta
 * with period pi; in group mode x is unbounded and theta wraps with period
 * 2 pi.
 */
class CellGrid
{
  public:
    enum class Mode
    {
        quotient,
        group
    };

    CellGrid(double h, Mode mode);

    double side() const { return h_; }
    Mode mode() const { return mode_; }

    std::int64_t eta_cell(double y) const;
    std::int64_t x_cell(std::int64_t eta_cell, double x) const;
    std::int64_t theta_cell(double theta) const;

    //! Cells across x in quotient mode.
    std::int64_t x_count(std::int64_t eta_cell) const;
    double x_width(std::int64_t eta_cell) const;
    std::int64_t theta_count() const { return n_theta_; }
    double eta_lo(std::int64_t eta_cell) const;

    std::uint64_t pack(std::int64_t e, std::int64_t xc, std::int64_t tc) const;
    std::uint64_t key(double x, double y, double theta) const;

  private:
    double h_;
    Mode mode_;
    double eta0_;
    std::int64_t n_theta_;
    double theta_width_;
};

//! Iwasawa coordinates of g^{-1} i and the angle of the first column.
struct GroupCoords
{
    double x, y, theta;
};
GroupCoords group_coords(GroupElement const& g);

//---------------------------------------------------------------------------//
/*!
 * Spatial hash of reduced points answering d_X ball queries exactly.
 *
 * A query enumerates the lattice images of the center (see BallQuery) and,
 * per image, the cells compatible with the constraints any lambda realizing
 * d_X <= D must meet: |log y_p - log y_w| <= D, the horizontal window, and
 * an angle window. The angle of rep_p e1 differs from that of the image
 * basis vector by at most |polar angle| + gd(t / 2) <= (sqrt 5 / 2) D.
 */
class PointIndex
{
  public:
    explicit PointIndex(double cell_side);

    std::uint32_t insert(SpacePoint const& p);
    std::size_t size() const { return points_.size(); }
    SpacePoint const& operator[](std::size_t i) const { return points_[i]; }
    std::vector<SpacePoint> const& points() const { return points_; }

    //! Calls visit(id, distance) for points with d_X <= D, possibly more
    //! than once per id; visit returns false to stop early.
    void query(SpacePoint const& q, double D,
               std::function<bool(std::uint32_t, double)> const& visit) const;

    //! True if some point lies within distance < D.
    bool any_closer(SpacePoint const& q, double D) const;

    //! Smallest d_X to an indexed point if at most D, else kNoDistance.
    double nearest(SpacePoint const& q, double D) const;

  private:
    CellGrid grid_;
    std::vector<SpacePoint> points_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

//---------------------------------------------------------------------------//
//! Spatial hash of group elements answering dist ball queries exactly.
class GroupIndex
{
  public:
    explicit GroupIndex(double cell_side);

    std::uint32_t insert(GroupElement const& g);
    std::size_t size() const { return elems_.size(); }
    GroupElement const& operator[](std::size_t i) const { return elems_[i]; }

    //! Calls visit(id, distance) once per element with dist <= D.
    void query(GroupElement const& g, double D,
               std::function<void(std::uint32_t, double)> const& visit) const;

  private:
    CellGrid grid_;
    std::vector<GroupElement> elems_;
    std::vector<GroupCoords> coords_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

//---------------------------------------------------------------------------//
/*!
 * Maximal r-separated subset of X(h_bound) = {ht <= h_bound}.
 *
 * Greedy insertion over an Iwasawa grid with spacing r/3 in log y, r y / 3
 * in x and r/3 in theta, visited in lexicographic (log y, x, theta) order,
 * followed by repair batches of 10^4 Haar samples of X(h_bound): each sample
 * farther than r from the net is inserted. Repair stops after four
 * consecutive batches insert nothing.
 */
std::vector<SpacePoint> net(double h_bound, double r,
                            HeightParams const& params = {},
                            Seed const& seed = {});

}  // namespace homwalk
