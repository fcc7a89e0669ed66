// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#pragma once

// Values frozen from the first verified run of each computation.
namespace homwalk::test
{
inline constexpr double kDioSupN2 = 0.33333333333333343;
inline constexpr double kDioSupN3 = 0.25925925925925924;

// (3/pi) int_0^{1.5} sin^2(pi eta / 1.5) e^{-eta} d eta, scipy quad
inline constexpr double kHaarIwasawa001 = 0.350927553229574;

// Dummy-variable regression of the grouped fixture in test_experiments.cpp,
// numpy lstsq on [x, one-hot(group)]
inline constexpr double kGroupedSlope = -0.3436000000000001;
inline constexpr double kGroupedSlopeSe = 0.009502841680255432;
inline constexpr double kGroupedR2 = 0.9924091321744394;

// Default-config runs (seed 5eed), frozen after the first verified run
inline constexpr double kDiameterSlope = 4.270494268708456;
inline constexpr double kDiameterR2 = 0.9960336284375592;
inline constexpr double kNetExponent = -3.061259487493822;
inline constexpr double kHittingMinProbN7 = 0.00652;
inline constexpr double kDensityFailureA4 = 1.0;
inline constexpr double kDensityFailureA5 = 0.425;
inline constexpr double kNondivSpreadH16 = 1.3013698630136987;
inline constexpr double kContractionAHatN10 = 0.6551835332125895;
inline constexpr double kContractionAHatN100 = 0.03320636504447189;
inline constexpr double kFlattenGammaN4 = 2.4005548558075329;
inline constexpr double kFlattenGammaN6 = 2.3039925471262968;
inline constexpr double kFlattenGammaN8 = 2.2354876391401568;
inline constexpr double kDimensionMedianSlope = 2.728072956146873;
inline constexpr double kSmoothedIntegral = 0.9981560961161691;
inline constexpr double kThetaHatBeta05 = 0.11064451920101784;
inline constexpr double kThetaHatBeta1 = 0.10961192296430287;
inline constexpr double kThetaHatBeta2 = 0.09682654356791118;
inline constexpr double kGapHatMax = 0.19375175351878324;
}  // namespace homwalk::test
