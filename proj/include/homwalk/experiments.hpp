// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lattice.hpp"
#include "measures.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "test_functions.hpp"
#include "walk.hpp"

namespace homwalk
{
//---------------------------------------------------------------------------//
// Shared pieces
//---------------------------------------------------------------------------//

//! Real-valued observable on X with a name, used for spot checks.
struct Observable
{
    std::string name;
    std::function<double(SpacePoint const&)> f;
};

struct SpotCheckParams
{
    std::vector<int> n_list{1, 2, 3};
    std::size_t trials{20000};
    double sigmas{3};
    double min_fraction{0.95};
    std::size_t max_atoms{6};
};

/*!
 * Monte Carlo means of observables at Y_n against exact sums over the
 * atoms of mu^{*n} pushed to x0.
 *
 * Each (observable, n) pair is one check; it passes when the difference is
 * within `sigmas` standard errors. Measures with more than max_atoms atoms
 * or n beyond 3 are rejected.
 */
void spot_check(FiniteSupportMeasure const& mu, SpacePoint const& x0,
                std::vector<Observable> const& obs, SpotCheckParams const& params,
                Seed const& seed, ExperimentReport& report);

//! Running Birkhoff averages (1/N) sum_{k<N} f(Y_k) at each checkpoint N.
std::vector<std::vector<double>> orbit_average(Trajectory const& t,
                                               std::vector<TestFunction> const& fs,
                                               std::vector<std::size_t> const& checkpoints);

//---------------------------------------------------------------------------//
// Walk
//---------------------------------------------------------------------------//

struct WalkParams
{
    int n{100};
    std::uint64_t index{0};
    HeightParams height{};
};

ExperimentReport walk_experiment(FiniteSupportMeasure const& mu, SpacePoint const& x0,
                                 WalkParams const& params, Seed const& seed);

//---------------------------------------------------------------------------//
// Orbit density
//---------------------------------------------------------------------------//

struct DiameterParams
{
    std::vector<double> r_grid{0.4, 0.3, 0.2, 0.15, 0.1, 0.07, 0.05};
    double dedup_factor{4};
    double h_cap_factor{2};
    int max_layers{40};
    std::size_t node_budget{50'000'000};
    HeightParams height{};
    double min_r2{0.9};
    double net_exponent{-3};
    double net_exponent_tol{0.4};
};

/*!
 * Smallest l with S^l x0 r-dense in X(1/r), for every r in the grid.
 *
 * One BFS with dedup radius min(r) / dedup_factor serves all radii: each
 * fresh point marks the points of net(1/r, r) within r, per parity class,
 * and diam_r is the first length whose class covers the whole net. Points
 * above h_cap_factor / min(r) are kept but not expanded.
 */
ExperimentReport diameter_estimate(FiniteSupportMeasure const& s, SpacePoint const& x0,
                                   DiameterParams const& params, Seed const& seed);

struct HittingParams
{
    std::vector<SpacePoint> x_list;  //!< empty: x0 plus haar_points samples
    std::size_t haar_points{4};
    SpacePoint target{};
    double r{0.2};
    std::vector<int> n_list;  //!< empty: ceil(c_hat log(1/r))
    double c_hat{4.27};
    std::size_t trials{100000};
    double min_prob{0};
};

ExperimentReport hitting_probability(FiniteSupportMeasure const& mu, SpacePoint const& x0,
                                     HittingParams const& params, Seed const& seed);

struct DensityParams
{
    double r{0.3};
    std::vector<double> a_list{4, 5, 6, 7, 8};
    std::size_t trials{200};
    HeightParams height{};
    std::size_t survival_points{20};
};

/*!
 * Probability that (Y_1, ..., Y_L), L = ceil(r^{-A}), is not r-dense in
 * X(1/r), judged against net(1/r, r), plus the survival function of the
 * first time each net point is hit.
 */
ExperimentReport density_probability(FiniteSupportMeasure const& mu, SpacePoint const& x0,
                                     DensityParams const& params, Seed const& seed);

//---------------------------------------------------------------------------//
// Heights
//---------------------------------------------------------------------------//

struct NonDivergenceParams
{
    std::vector<int> n_list{50, 100, 200};
    std::vector<double> h_grid{1, 2, 4, 8, 16};
    std::size_t trials{100000};
    std::size_t holdout_trials{50000};
    HeightParams height{};
    double max_spread{4};
    double holdout_sigmas{3};
};

/*!
 * Tail mu^{*n}{g : ht(g x0) >= h} against the Markov shape ht(x0) / h.
 *
 * The spread verdict compares, for each h, the largest and smallest of
 * tail h / ht(x0) across n. C_hat is the largest ratio on the training
 * trials; holdout trials from disjoint streams must stay below it.
 */
ExperimentReport non_divergence(FiniteSupportMeasure const& mu, SpacePoint const& x0,
                                NonDivergenceParams const& params, Seed const& seed);

struct ContractionParams
{
    std::vector<int> n_list{10, 25, 50, 100};
    double height_lo{1};
    double height_hi{30};
    std::size_t points{60};
    std::size_t holdout_points{40};
    std::size_t walk_trials{400};
    HeightParams height{};
    double slack{0.05};
    double min_satisfaction{0.99};
    double confidence{0.95};
};

/*!
 * Regression of E[ht(Y_N)] on ht(x) over start points with log-uniform
 * heights; the verdict requires the one-sided upper confidence bound of
 * the slope at the largest N to be below 1.
 *
 * The envelope intercept b_env is the largest train excess
 * mean + 2 se - a_hat ht(x); holdout points must satisfy
 * E ht(Y_N) <= (a_hat + slack) ht(x) + b_env (1 + slack).
 */
ExperimentReport contraction_check(FiniteSupportMeasure const& mu,
                                   ContractionParams const& params, Seed const& seed);

//! Ratios ht(g p) / ht(p) against exp(2 d(g, I) + margin) on random pairs.
struct LogLipschitzResult
{
    std::size_t samples;
    std::size_t violations;
    double worst_excess;  //!< max of |log ratio| - (2 d + margin)
};
LogLipschitzResult height_log_lipschitz(std::size_t samples, double margin,
                                        HeightParams const& height, Seed const& seed);

//---------------------------------------------------------------------------//
// Flattening and dimension
//---------------------------------------------------------------------------//

struct FlatteningParams
{
    std::vector<int> n_list{0, 4, 6, 8};
    std::vector<double> delta_grid{0.0625, 0.03125, 0.015625, 0.0078125};
    std::size_t top_atoms{200};
    std::size_t random_atoms{200};
    int perturbations{4};
    std::size_t atom_budget{kDefaultAtomBudget};
    double volume_tolerance{2};
};

/*!
 * sup_g mu^{*n}(B_delta(g)) / m_G(B_delta) over centers at the heaviest
 * atoms, random atoms and small perturbations of both, and the exponent
 * gamma_hat = log(sup) / log(1/delta).
 */
ExperimentReport flattening_estimate(FiniteSupportMeasure const& mu_d,
                                     FlatteningParams const& params, Seed const& seed);

struct HighDimensionParams
{
    int n{8};
    std::vector<double> delta_grid{0.0078125, 0.015625, 0.03125, 0.0625, 0.125};
    std::size_t centers{200};
    std::size_t max_draws{20'000'000};
    double y_max{1e3};
    std::size_t atom_budget{kDefaultAtomBudget};
    double min_median_slope{2.5};
};

/*!
 * Local dimension of nu_n = mu_d^{*n} pushed to X from x0.
 *
 * Centers are Haar samples conditioned on nu_n(B_delta_min(x)) > 0, the
 * part of X where the slope is defined; each center's slope is the OLS fit
 * of log nu_n(B_delta(x)) on log delta with masses from exact atom counts.
 */
ExperimentReport high_dimension(FiniteSupportMeasure const& mu_d, SpacePoint const& x0,
                                HighDimensionParams const& params, Seed const& seed);

/*!
 * h(x) = nu(B_delta(x)) / m_G(B_delta) when ht(x) <= e1 delta^{-kappa1 eta},
 * else 0, for pushforward atoms nu.
 */
std::vector<double> smoothed_density(std::vector<SpaceAtom> const& nu, double delta,
                                     double eta, double e1, double kappa1,
                                     std::vector<SpacePoint> const& eval_points,
                                     HeightParams const& height = {});

struct SmoothedParams
{
    int n{6};
    double delta{0.05};
    double eta{0.5};
    double e1{0.9};
    double kappa1{0.5};
    std::size_t haar_samples{1'000'000};
    double y_max{1e3};
    std::size_t functions{20};
    double c_hat{10};
    double mass_sigmas{3};
    std::size_t atom_budget{kDefaultAtomBudget};
};

ExperimentReport smoothed_density_check(FiniteSupportMeasure const& mu_d,
                                        SpacePoint const& x0, SmoothedParams const& params,
                                        Seed const& seed);

//---------------------------------------------------------------------------//
// Equidistribution and mixing
//---------------------------------------------------------------------------//

struct EquidistParams
{
    std::vector<double> beta_list{0.5, 1, 2};
    std::vector<int> n_grid{0, 1, 2, 3, 4, 5, 6, 7, 8, 10, 12, 15, 20, 30, 40, 60};
    std::size_t trials{20000};
    std::size_t functions{10};
    double bump_radius{1.2};
    std::size_t haar_samples{1'000'000};
    double y_max{1e3};
    double fit_sigmas{3};
    std::size_t min_fit_points{4};
    double confidence{0.95};
    std::size_t birkhoff_length{100000};
    std::size_t birkhoff_trajectories{20};
    double birkhoff_sigmas{3};
};

/*!
 * Error of the Monte Carlo mean of f(a b x0), a ~ mu^{*n}, b ~ mu_d^{*m},
 * m = round(beta n), against the Haar integral, and Birkhoff averages of
 * the mu-walk. Without mu_d only beta = 0 is run.
 *
 * For each beta the decay rate theta_hat is the common slope of
 * -log|error| in n with one intercept per function, over points with
 * |error| above fit_sigmas standard errors.
 */
ExperimentReport equidistribution_error(FiniteSupportMeasure const& mu,
                                        FiniteSupportMeasure const* mu_d,
                                        SpacePoint const& x0, EquidistParams const& params,
                                        Seed const& seed);

struct GapParams
{
    std::size_t functions{3};
    double bump_radius{1.2};
    int n_max{12};
    std::size_t haar_count{20000};
    std::size_t walk_trials{8};
    std::size_t haar_samples{400000};
    double y_max{1e3};
    double fit_sigmas{5};
    std::size_t min_fit_points{4};
    double confidence{0.95};
    double c0_sigmas{3};
};

/*!
 * Correlations c_n(f) = int (P^n f0) f0 dm_X with f0 = f - int f and P
 * the walk operator; gap_hat(f) is minus the slope of log|c_n| in n over
 * points with |c_n| above fit_sigmas standard errors. The largest
 * confident gap_hat is reported as a lower-bound-style decay estimate.
 */
ExperimentReport spectral_gap_estimate(FiniteSupportMeasure const& mu,
                                       GapParams const& params, Seed const& seed);

}  // namespace homwalk
