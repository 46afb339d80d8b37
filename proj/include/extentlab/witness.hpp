#pragma once

#include <string>
#include <vector>

#include "extentlab/dictionary.hpp"
#include "extentlab/extent.hpp"
#include "extentlab/types.hpp"

namespace extentlab
{

inline constexpr double kActivityTolerance = 1e-6;
/// Singular values above kRankTolerance * sigma_max count toward rank.
inline constexpr double kRankTolerance = 1e-7;
inline constexpr double kSlackTolerance = 1e-6;
/// Normal-cone membership compares Re<x, y> to sqrt(xi) within this.
inline constexpr double kConeTolerance = 1e-6;
/// Interior membership requires the recomputed witness to match y within this.
inline constexpr double kWitnessMatchTolerance = 1e-5;

/// A_y = {s : |<s, y>| >= 1 - tol} with phases phi_s such that e^{i phi_s} <s, y> = |<s, y>|.
struct ActiveSet
{
    std::vector<Index> indices;
    std::vector<double> phases; // in (-pi, pi]
};

/// Throws FeasibilityError when some |<s, y>| exceeds 1 + tol.
ActiveSet active_set(const Dictionary &d, const ComplexVector &y, double activity_tol = kActivityTolerance);

/// Numerical rank of a set of columns, counting singular values above rank_tol * sigma_max.
Index column_rank(const ComplexMatrix &columns, double rank_tol = kRankTolerance);

/// y is an extreme point of M_D iff its active words span C^d.
bool is_extreme_point(const Dictionary &d, const ComplexVector &y, double activity_tol = kActivityTolerance,
                      double rank_tol = kRankTolerance);

struct SlacknessReport
{
    // (I): |<s,y> - c_s/|c_s|| on words with |c_s| > support_tol
    std::vector<double> aligned_violation;
    // (II): |c_s| on words with |<s,y>| < 1 - activity_tol
    std::vector<double> inactive_mass;
    double worst_aligned = 0;
    double worst_inactive = 0;

    double worst() const { return std::max(worst_aligned, worst_inactive); }
    bool satisfied(double tol) const { return worst() <= tol; }
};

/**
 * Per-word violations of the two complementary-slackness conditions between
 * coefficients c and a witness y. Throws FeasibilityError when y is not in
 * M_D within activity_tol.
 */
SlacknessReport check_complementary_slackness(const Dictionary &d, const ComplexVector &c, const ComplexVector &y,
                                              double activity_tol = kActivityTolerance,
                                              double support_tol = kSupportTolerance);

enum class Uniqueness
{
    unique,
    unknown,
};

std::string to_string(Uniqueness u);

/// `unique` when the support of the solution spans C^d; otherwise `unknown`.
Uniqueness witness_is_unique(const Dictionary &d, const ExtentSolution &solution, double rank_tol = kRankTolerance);

struct ConeMembership
{
    bool in_cone = false;
    bool in_interior = false;
    bool boundary_suspect = false; // verdict sits within tolerance of flipping
    double alignment = 0;          // Re<x, y> - sqrt(xi(x))
    double witness_distance = 0;   // ||y(x) - y||, infinite when no solve was needed
    std::string diagnostic;
};

/// Normal-cone and interior membership of x for witness y, by solving extent(d, x).
ConeMembership normal_cone_membership(const Dictionary &d, const ComplexVector &y, const ComplexVector &x,
                                      const ExtentOptions &options = {});
bool in_normal_cone(const Dictionary &d, const ComplexVector &y, const ComplexVector &x);
bool in_interior(const Dictionary &d, const ComplexVector &y, const ComplexVector &x);

/**
 * Predicts whether appending w strictly lowers the extent of the state
 * solved in `solution`: the witness is unique and |<w, y>| > 1 + slack_tol.
 */
bool word_addition_strictly_decreases(const Dictionary &d, const ExtentSolution &solution, const ComplexVector &w,
                                      double slack_tol = kSlackTolerance);

} // namespace extentlab
