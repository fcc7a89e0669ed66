// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "group.hpp"
#include "lattice.hpp"

namespace homwalk
{
struct Atom
{
    GroupElement g;
    double w;
};

inline constexpr double kDefaultMergeTol = 1e-9;
inline constexpr std::size_t kDefaultAtomBudget = 10'000'000;

//---------------------------------------------------------------------------//
/*!
 * Probability measure on G with finitely many atoms.
 *
 * Atoms closer than merge_tol in dist are merged (weights added) on
 * construction. Atoms are kept sorted by a fixed linear projection of the
 * entries so merging and inverse lookups only scan a narrow window; the
 * order is total, which makes every derived quantity deterministic.
 */
class FiniteSupportMeasure
{
  public:
    //! Dirac mass at the identity.
    FiniteSupportMeasure();

    //! Weights must be positive and sum to 1 within 1e-9; they are rescaled
    //! to sum to 1.
    explicit FiniteSupportMeasure(std::vector<Atom> atoms,
                                  double merge_tol = kDefaultMergeTol);

    static FiniteSupportMeasure dirac(GroupElement const& g);
    static FiniteSupportMeasure uniform(std::vector<GroupElement> const& elems,
                                        double merge_tol = kDefaultMergeTol);

    std::vector<Atom> const& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    double merge_tol() const { return merge_tol_; }
    double total_mass() const;

    //! Atom index for a uniform variate u in [0, 1).
    std::size_t sample_index(double u) const;

    //! Index of an atom within merge_tol of g, or size().
    std::size_t find(GroupElement const& g) const;

    //! Measure of g^{-1} under this measure.
    FiniteSupportMeasure inverted() const;

  private:
    struct Trusted
    {
    };
    FiniteSupportMeasure(Trusted, std::vector<Atom> atoms, double merge_tol);

    std::vector<Atom> atoms_;
    std::vector<double> cdf_;
    double merge_tol_{kDefaultMergeTol};

    friend FiniteSupportMeasure convolve(FiniteSupportMeasure const&,
                                         FiniteSupportMeasure const&,
                                         std::size_t);
    friend FiniteSupportMeasure convolve_serial(FiniteSupportMeasure const&,
                                                FiniteSupportMeasure const&,
                                                std::size_t);
};

//! Sort key used for atom order and merge windows.
double atom_projection(GroupElement const& g);

//! Sorts and merges atoms closer than tol, first atom in order wins.
std::vector<Atom> merge_atoms(std::vector<Atom> atoms, double tol);

/*!
 * Distribution of g h with g ~ mu and h ~ nu.
 *
 * Products are formed in parallel into fixed slots, then sorted and merged
 * serially, so the result does not depend on the thread count. Throws
 * AtomBudgetExceeded if |mu| |nu| exceeds the budget.
 */
FiniteSupportMeasure convolve(FiniteSupportMeasure const& mu,
                              FiniteSupportMeasure const& nu,
                              std::size_t atom_budget = kDefaultAtomBudget);

//! Single-threaded reference for convolve.
FiniteSupportMeasure convolve_serial(FiniteSupportMeasure const& mu,
                                     FiniteSupportMeasure const& nu,
                                     std::size_t atom_budget = kDefaultAtomBudget);

//! mu^{*n}, with mu^{*0} the Dirac mass at the identity.
FiniteSupportMeasure convolution_power(FiniteSupportMeasure const& mu, int n,
                                       std::size_t atom_budget = kDefaultAtomBudget);

double total_variation(FiniteSupportMeasure const& mu,
                       FiniteSupportMeasure const& nu);

//! max over atoms of dist(g, I).
double support_radius(FiniteSupportMeasure const& mu);

bool is_symmetric(FiniteSupportMeasure const& mu);

//---------------------------------------------------------------------------//
/*!
 * Named generator sets, each the uniform measure on a symmetric set.
 *
 * - "identity": the Dirac mass at I (scale ignored).
 * - "unipotents-rot35": E12(+-s), E21(+-s), R(+-phi) with s = scale and
 *   cos phi = 3/5, sin phi = 4/5.
 * - "rot35-unipotent-scaled": E12(+-0.8 eps), E21(+-0.8 eps) and the
 *   rotations by +-2 atan(0.4 eps) with eps = scale; for rational eps all
 *   entries are rational and the support lies in B_eps.
 * - "diagonal": exp(+-(eps / 2) H), contained in the diagonal subgroup and
 *   at distance exactly eps from I.
 *
 * A name may carry its scale in parentheses, e.g.
 * "rot35-unipotent-scaled(0.05)", which overrides the scale argument.
 */
FiniteSupportMeasure generator_preset(std::string_view name, double scale = 1);

std::vector<std::string> const& preset_names();

//! Rotation by phi with cos phi = 3/5, sin phi = 4/5.
GroupElement rot35();

//---------------------------------------------------------------------------//
//! Atoms pushed to X: reduce(g rep(x0)) with the same weights.
struct SpaceAtom
{
    SpacePoint p;
    double w;
};

std::vector<SpaceAtom> pushforward(FiniteSupportMeasure const& mu,
                                   SpacePoint const& x0);

}  // namespace homwalk
