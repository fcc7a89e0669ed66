// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#pragma once

#include <optional>

#include "homwalk/config.hpp"

namespace homwalk::detail
{
struct Built
{
    FiniteSupportMeasure mu;
    std::optional<FiniteSupportMeasure> mu_d;
    SpacePoint x0;
    HeightParams height;
};

struct Typed
{
    Built b;
    SpotCheckParams spot;
};

//! Typed views of a validated config; throw ValidationError on problems.
Typed typed(RunConfig const& cfg);
WalkParams walk_params(RunConfig const& cfg, Built const& b);
DiameterParams diameter_params(RunConfig const& cfg, Built const& b);
HittingParams hitting_params(RunConfig const& cfg, Built const& b);
DensityParams density_params(RunConfig const& cfg, Built const& b);
NonDivergenceParams nondiv_params(RunConfig const& cfg, Built const& b);
ContractionParams contraction_params(RunConfig const& cfg, Built const& b);
FlatteningParams flatten_params(RunConfig const& cfg, Built const& b);
HighDimensionParams dimension_params(RunConfig const& cfg, Built const& b);
SmoothedParams smoothed_params(RunConfig const& cfg, Built const& b);
EquidistParams equidist_params(RunConfig const& cfg, Built const& b);
GapParams gap_params(RunConfig const& cfg, Built const& b);

}  // namespace homwalk::detail
