// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "lattice.hpp"
#include "measures.hpp"
#include "point_index.hpp"
#include "rng.hpp"

namespace homwalk
{
//---------------------------------------------------------------------------//
//! Y_0 = x0, Y_k = reduce(Z_k rep(Y_{k-1})) with Z_k the recorded atoms.
struct Trajectory
{
    SpacePoint start;
    std::vector<std::uint32_t> increments;
    std::vector<SpacePoint> points;  //!< Y_0 .. Y_n when cached
    std::vector<double> heights;  //!< ht(Y_k) when cached
};

//! One step with an atom drawn by inverse CDF.
inline SpacePoint walk_step(FiniteSupportMeasure const& mu, SpacePoint const& p,
                            CounterRng& rng, std::uint32_t* chosen = nullptr)
{
    std::size_t i = mu.sample_index(rng.uniform());
    if (chosen)
        *chosen = static_cast<std::uint32_t>(i);
    return reduce(mul(mu.atoms()[i].g, p.rep));
}

//! Trial `index` draws from the substream (seed, walk, index).
Trajectory sample_trajectory(FiniteSupportMeasure const& mu, SpacePoint const& x0,
                             int n, Seed const& seed, std::uint64_t index = 0,
                             HeightParams const& height = {});

//! Points obtained by applying the recorded increments to the start.
std::vector<SpacePoint> replay(FiniteSupportMeasure const& mu, Trajectory const& t);

//! Y_n for n steps from x0 using rng.
SpacePoint walk_endpoint(FiniteSupportMeasure const& mu, SpacePoint const& x0,
                         int n, CounterRng& rng);

/*!
 * Calls f(t) for t in [0, trials) across OpenMP threads.
 *
 * Callers write results into slot t and reduce in index order, so output
 * never depends on the thread count.
 */
void parallel_trials(std::size_t trials, std::function<void(std::size_t)> const& f);

//---------------------------------------------------------------------------//
struct BfsOptions
{
    int max_layers{10};
    double dedup_r{0.05};
    double h_cap{1e300};
    HeightParams height{};
    std::size_t node_budget{50'000'000};
    bool parallel{true};
};

struct BfsLayerStats
{
    int length;
    std::size_t generated;  //!< products formed from the previous layer
    std::size_t fresh;  //!< new points kept
    std::size_t dedup_losses;  //!< candidates dropped by deduplication
    std::size_t parked;  //!< fresh points above the height cap
    std::size_t stored;  //!< dedup keys held across both parities
};

/*!
 * Breadth-first enumeration of S^l x0.
 *
 * For symmetric S, S^l x0 contains S^{l-2} x0, so points are tracked per
 * parity class: layer l holds the points of S^l x0 not already seen in a
 * layer of the same parity, and S^l x0 is the union of layers l, l-2, ....
 * Expanding only the fresh points of layer l yields S^{l+1} x0 up to
 * points already seen. Points are deduplicated by cells of side
 * dedup_r / 2.2 (diameter below dedup_r); within a cell the point with the
 * smallest (x, y, theta) survives, so the kept set does not depend on
 * evaluation order. Points above the height cap are kept but not expanded.
 */
class OrbitBfs
{
  public:
    OrbitBfs(FiniteSupportMeasure const& s, SpacePoint const& x0, BfsOptions opts);

    //! Fresh points of the current layer, parked ones included.
    std::vector<SpacePoint> const& layer() const { return layer_; }
    int length() const { return length_; }
    BfsLayerStats const& stats() const { return stats_; }

    //! Advances one layer; false once max_layers is reached.
    bool advance();

  private:
    struct Candidate
    {
        std::uint64_t key;
        SpacePoint p;
    };

    std::vector<Candidate> expand() const;

    FiniteSupportMeasure s_;
    BfsOptions opts_;
    CellGrid grid_;
    std::vector<SpacePoint> layer_;
    std::vector<std::uint64_t> seen_[2];
    int length_{0};
    BfsLayerStats stats_{};
};

struct BfsResult
{
    std::vector<std::vector<SpacePoint>> layers;
    std::vector<BfsLayerStats> stats;
    std::vector<SpacePoint> parked;
};

//! All layers up to max_layers.
BfsResult orbit_ball_bfs(FiniteSupportMeasure const& s, SpacePoint const& x0,
                         BfsOptions const& opts);

}  // namespace homwalk
