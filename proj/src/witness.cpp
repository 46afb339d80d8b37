#include "extentlab/witness.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace extentlab
{

namespace
{

void require_dimension(const Dictionary &d, const ComplexVector &v, const char *what)
{
    if (v.size() != d.dimension())
        throw DimensionError(std::string(what) + " has length " + std::to_string(v.size()) +
                             " but the dictionary lives in C^" + std::to_string(d.dimension()));
}

/// <s, y> for every word, throwing when y leaves M_D by more than tol.
ComplexVector feasible_overlaps(const Dictionary &d, const ComplexVector &y, double tol)
{
    require_dimension(d, y, "witness");
    ComplexVector overlaps = d.matrix().adjoint() * y;
    for (Index s = 0; s < overlaps.size(); ++s)
    {
        if (std::abs(overlaps(s)) > 1.0 + tol)
        {
            std::ostringstream msg;
            msg << "witness is not dual feasible: |<s, y>| = " << std::abs(overlaps(s)) << " for word " << s;
            throw FeasibilityError(msg.str());
        }
    }
    return overlaps;
}

ComplexMatrix gather(const Dictionary &d, const std::vector<Index> &indices)
{
    ComplexMatrix cols(d.dimension(), static_cast<Index>(indices.size()));
    for (std::size_t j = 0; j < indices.size(); ++j)
        cols.col(static_cast<Index>(j)) = d.word(indices[j]);
    return cols;
}

} // namespace

ActiveSet active_set(const Dictionary &d, const ComplexVector &y, double activity_tol)
{
    const ComplexVector overlaps = feasible_overlaps(d, y, activity_tol);
    ActiveSet out;
    for (Index s = 0; s < overlaps.size(); ++s)
    {
        if (std::abs(overlaps(s)) >= 1.0 - activity_tol)
        {
            out.indices.push_back(s);
            double phi = -std::arg(overlaps(s));
            if (phi <= -M_PI)
                phi += 2 * M_PI;
            out.phases.push_back(phi);
        }
    }
    return out;
}

Index column_rank(const ComplexMatrix &columns, double rank_tol)
{
    if (columns.size() == 0)
        return 0;
    const Eigen::BDCSVD<ComplexMatrix> svd(columns);
    const Eigen::VectorXd &sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0)
        return 0;
    return (sv.array() > rank_tol * sv(0)).count();
}

bool is_extreme_point(const Dictionary &d, const ComplexVector &y, double activity_tol, double rank_tol)
{
    const ActiveSet active = active_set(d, y, activity_tol);
    return column_rank(gather(d, active.indices), rank_tol) == d.dimension();
}

SlacknessReport check_complementary_slackness(const Dictionary &d, const ComplexVector &c, const ComplexVector &y,
                                              double activity_tol, double support_tol)
{
    if (c.size() != d.size())
        throw DimensionError("coefficient vector has " + std::to_string(c.size()) + " entries for " +
                             std::to_string(d.size()) + " words");
    const ComplexVector overlaps = feasible_overlaps(d, y, activity_tol);

    SlacknessReport report;
    report.aligned_violation.assign(static_cast<std::size_t>(d.size()), 0.0);
    report.inactive_mass.assign(static_cast<std::size_t>(d.size()), 0.0);
    for (Index s = 0; s < d.size(); ++s)
    {
        const double mag = std::abs(c(s));
        const auto k = static_cast<std::size_t>(s);
        if (mag > support_tol)
            report.aligned_violation[k] = std::abs(overlaps(s) - c(s) / mag);
        if (std::abs(overlaps(s)) < 1.0 - activity_tol)
            report.inactive_mass[k] = mag;
        report.worst_aligned = std::max(report.worst_aligned, report.aligned_violation[k]);
        report.worst_inactive = std::max(report.worst_inactive, report.inactive_mass[k]);
    }
    return report;
}

std::string to_string(Uniqueness u)
{
    return u == Uniqueness::unique ? "unique" : "unknown";
}

Uniqueness witness_is_unique(const Dictionary &d, const ExtentSolution &solution, double rank_tol)
{
    if (solution.support.empty())
        return Uniqueness::unknown;
    return column_rank(gather(d, solution.support), rank_tol) == d.dimension() ? Uniqueness::unique
                                                                              : Uniqueness::unknown;
}

ConeMembership normal_cone_membership(const Dictionary &d, const ComplexVector &y, const ComplexVector &x,
                                      const ExtentOptions &options)
{
    require_dimension(d, y, "witness");
    require_dimension(d, x, "state");
    ConeMembership out;
    const ExtentSolution sol = extent(d, x, options);
    const double root_xi = std::sqrt(sol.xi);
    out.alignment = inner(x, y).real() - root_xi;
    out.in_cone = std::abs(out.alignment) <= kConeTolerance * std::max(1.0, root_xi);
    out.witness_distance = (sol.witness - y).norm();
    if (!out.in_cone)
    {
        out.boundary_suspect = std::abs(out.alignment) <= 10 * kConeTolerance * std::max(1.0, root_xi);
        out.diagnostic = out.boundary_suspect ? "boundary-suspect: alignment just outside tolerance" : "";
        return out;
    }

    const bool unique = witness_is_unique(d, sol) == Uniqueness::unique;
    const bool matches = out.witness_distance <= kWitnessMatchTolerance;
    out.in_interior = unique && matches;
    if (!out.in_interior)
    {
        // x lies in the cone but the interior test does not pass cleanly;
        // near the boundary the two verdicts cannot be separated numerically
        out.boundary_suspect = true;
        out.diagnostic = !unique ? "boundary-suspect: optimal support does not span, witness may not be unique"
                                 : "boundary-suspect: recomputed witness differs from y";
    }
    return out;
}

bool in_normal_cone(const Dictionary &d, const ComplexVector &y, const ComplexVector &x)
{
    return normal_cone_membership(d, y, x).in_cone;
}

bool in_interior(const Dictionary &d, const ComplexVector &y, const ComplexVector &x)
{
    return normal_cone_membership(d, y, x).in_interior;
}

bool word_addition_strictly_decreases(const Dictionary &d, const ExtentSolution &solution, const ComplexVector &w,
                                      double slack_tol)
{
    require_dimension(d, w, "word");
    if (std::abs(w.norm() - 1.0) > kNormTolerance)
        throw NormalizationError("added word must have unit norm");
    if (witness_is_unique(d, solution) != Uniqueness::unique)
        return false;
    return std::abs(inner(w, solution.witness)) > 1.0 + slack_tol;
}

} // namespace extentlab
