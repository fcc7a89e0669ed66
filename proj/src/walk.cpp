// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#include "homwalk/walk.hpp"

#include <algorithm>
#include <iterator>
#include <tuple>

#include <fmt/core.h>

#include "homwalk/errors.hpp"

namespace homwalk
{
Trajectory sample_trajectory(FiniteSupportMeasure const& mu, SpacePoint const& x0,
                             int n, Seed const& seed, std::uint64_t index,
                             HeightParams const& height_params)
{
    Trajectory t;
    t.start = x0;
    t.increments.reserve(n);
    t.points.reserve(n + 1);
    t.heights.reserve(n + 1);
    t.points.push_back(x0);
    t.heights.push_back(height(x0, height_params));
    auto rng = make_rng(seed, Purpose::walk, index);
    SpacePoint p = x0;
    for (int k = 0; k < n; ++k)
    {
        std::uint32_t i;
        p = walk_step(mu, p, rng, &i);
        t.increments.push_back(i);
        t.points.push_back(p);
        t.heights.push_back(height(p, height_params));
    }
    return t;
}

std::vector<SpacePoint> replay(FiniteSupportMeasure const& mu, Trajectory const& t)
{
    std::vector<SpacePoint> out{t.start};
    SpacePoint p = t.start;
    for (auto i : t.increments)
    {
        p = reduce(mul(mu.atoms().at(i).g, p.rep));
        out.push_back(p);
    }
    return out;
}

SpacePoint walk_endpoint(FiniteSupportMeasure const& mu, SpacePoint const& x0,
                         int n, CounterRng& rng)
{
    SpacePoint p = x0;
    for (int k = 0; k < n; ++k)
        p = walk_step(mu, p, rng);
    return p;
}

void parallel_trials(std::size_t trials, std::function<void(std::size_t)> const& f)
{
    auto n = static_cast<std::int64_t>(trials);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t t = 0; t < n; ++t)
        f(static_cast<std::size_t>(t));
}

//---------------------------------------------------------------------------//
OrbitBfs::OrbitBfs(FiniteSupportMeasure const& s, SpacePoint const& x0, BfsOptions opts)
    : s_(s), opts_(opts), grid_(opts.dedup_r / 2.2, CellGrid::Mode::quotient)
{
    if (!(opts.dedup_r > 0))
        throw InvalidRadius(fmt::format("dedup radius must be positive, got {}", opts.dedup_r));
    layer_.push_back(x0);
    seen_[0].push_back(grid_.key(x0.x, x0.y, x0.theta));
    bool parked = height(x0, opts_.height) > opts_.h_cap;
    stats_ = {0, 1, 1, 0, parked ? 1u : 0u, 1};
}

std::vector<OrbitBfs::Candidate> OrbitBfs::expand() const
{
    auto const& atoms = s_.atoms();
    std::size_t m = atoms.size();
    std::vector<SpacePoint> active;
    active.reserve(layer_.size());
    for (auto const& p : layer_)
        if (height(p, opts_.height) <= opts_.h_cap)
            active.push_back(p);

    std::vector<Candidate> out(active.size() * m);
    auto n = static_cast<std::int64_t>(active.size());
    auto body = [&](std::int64_t i) {
        for (std::size_t j = 0; j < m; ++j)
        {
            SpacePoint q = reduce(mul(atoms[j].g, active[i].rep));
            out[i * m + j] = {grid_.key(q.x, q.y, q.theta), q};
        }
    };
    if (opts_.parallel)
    {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i)
            body(i);
    }
    else
    {
        for (std::int64_t i = 0; i < n; ++i)
            body(i);
    }
    return out;
}

bool OrbitBfs::advance()
{
    if (length_ >= opts_.max_layers)
        return false;
    std::size_t stored = seen_[0].size() + seen_[1].size();
    std::size_t expected = layer_.size() * s_.size();
    if (stored + expected > opts_.node_budget)
    {
        throw NodeBudgetExceeded(fmt::format(
            "layer {} would hold {} points, budget {}", length_ + 1, stored + expected,
            opts_.node_budget));
    }

    auto cand = expand();
    std::size_t generated = cand.size();
    // Total order: cell key, then coordinates
    std::sort(cand.begin(), cand.end(), [](Candidate const& a, Candidate const& b) {
        return std::tie(a.key, a.p.x, a.p.y, a.p.theta)
               < std::tie(b.key, b.p.x, b.p.y, b.p.theta);
    });
    cand.erase(std::unique(cand.begin(), cand.end(),
                           [](Candidate const& a, Candidate const& b) { return a.key == b.key; }),
               cand.end());

    auto& seen = seen_[(length_ + 1) % 2];
    std::vector<std::uint64_t> fresh_keys;
    std::vector<SpacePoint> fresh;
    auto it = seen.begin();
    for (auto const& c : cand)
    {
        it = std::lower_bound(it, seen.end(), c.key);
        if (it != seen.end() && *it == c.key)
            continue;
        fresh_keys.push_back(c.key);
        fresh.push_back(c.p);
    }
    std::vector<std::uint64_t> merged;
    merged.reserve(seen.size() + fresh_keys.size());
    std::merge(seen.begin(), seen.end(), fresh_keys.begin(), fresh_keys.end(),
               std::back_inserter(merged));
    seen.swap(merged);

    ++length_;
    std::size_t parked = 0;
    for (auto const& p : fresh)
        parked += height(p, opts_.height) > opts_.h_cap;
    layer_ = std::move(fresh);
    stats_ = {length_,   generated, layer_.size(), generated - layer_.size(),
              parked,    seen_[0].size() + seen_[1].size()};
    return true;
}

BfsResult orbit_ball_bfs(FiniteSupportMeasure const& s, SpacePoint const& x0,
                         BfsOptions const& opts)
{
    BfsResult res;
    OrbitBfs bfs(s, x0, opts);
    auto record = [&] {
        res.layers.push_back(bfs.layer());
        res.stats.push_back(bfs.stats());
        for (auto const& p : bfs.layer())
            if (height(p, opts.height) > opts.h_cap)
                res.parked.push_back(p);
    };
    record();
    while (bfs.advance())
        record();
    return res;
}

}  // namespace homwalk
