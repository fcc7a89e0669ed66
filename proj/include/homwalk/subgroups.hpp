// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#pragma once

#include <string>
#include <vector>

#include "group.hpp"
#include "measures.hpp"
#include "rng.hpp"

namespace homwalk
{
//---------------------------------------------------------------------------//
/*!
 * A connected closed subgroup c H0 c^{-1} of G.
 *
 * H0 is one of the diagonal subgroup A, the rotation subgroup K, the upper
 * or lower unipotent subgroups N and N-, the Borel subgroup AN, or a
 * one-parameter subgroup exp(R v).
 */
struct Subgroup
{
    enum class Kind
    {
        diagonal,
        rotation,
        upper_unipotent,
        lower_unipotent,
        borel,
        one_parameter
    };

    Kind kind{Kind::diagonal};
    GroupElement conj;
    LieVector direction;  //!< one_parameter only
    std::string label;
};

/*!
 * inf over h in H of dist(g, h).
 *
 * For unconjugated K this is exactly the Cartan parameter t(g), because
 * g k^{-1} is symmetric for k the product of the Cartan rotations. The other
 * cases minimize over the subgroup parameters: a coarse scan in
 * sinh-stretched coordinates followed by Brent refinement (nested for AN).
 */
double distance_to_subgroup(GroupElement const& g, Subgroup const& h);

//! The subgroup element at parameter s (and u for AN).
GroupElement subgroup_element(Subgroup const& h, double s, double u = 0);

/*!
 * Witness family: A, K, N, N-, AN, plus `conjugates` random conjugates of
 * each of A, K, N, AN and `one_parameter` random one-parameter subgroups.
 */
std::vector<Subgroup> subgroup_family(int conjugates, int one_parameter,
                                      Seed const& seed);

//---------------------------------------------------------------------------//
struct DiophantineRow
{
    int n;
    double radius;  //!< eps^{c1 n}
    double sup_mass;  //!< max over the family of mu^{*n}(B_radius(H))
    std::string argmax;
    double threshold;  //!< eps^{c2 n}
    bool pass;
};

/*!
 * Necessary-condition check of the (c1, c2, eps)-Diophantine property
 * against a finite subgroup family.
 */
struct DiophantineReport
{
    double support_radius;
    bool support_ok;  //!< supp in B_eps
    std::vector<DiophantineRow> rows;
};

DiophantineReport
diophantine_diagnostic(FiniteSupportMeasure const& mu_d, double c1, double c2,
                       double eps, std::vector<int> const& n_list,
                       std::vector<Subgroup> const& family,
                       std::size_t atom_budget = kDefaultAtomBudget);

}  // namespace homwalk
