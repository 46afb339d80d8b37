#pragma once

#include <string>
#include <vector>

#include "extentlab/dictionary.hpp"
#include "extentlab/socp.hpp"
#include "extentlab/types.hpp"

namespace extentlab
{

/// |c_s| above this counts toward the support.
inline constexpr double kSupportTolerance = 1e-7;
/// Dictionaries with a larger condition number produce a warning.
inline constexpr double kConditioningWarning = 1e10;

struct ExtentOptions
{
    SolverOptions solver;
    double support_tolerance = kSupportTolerance;
};

struct ExtentSolution
{
    double xi = 0;                   // (sum_s |c_s|)^2
    ComplexVector coefficients;      // c_s per word
    ComplexVector witness;           // y, scaled into M_D
    double gap = 0;                  // relative duality gap of the solve
    std::vector<Index> support;      // {s : |c_s| > support_tolerance}
    double primal_objective = 0;     // sum_s |c_s| as reported by the solver
    double dual_objective = 0;       // Re <psi, y>
    double primal_residual = 0;
    double dual_residual = 0;
    int iterations = 0;
    SocpStatus status = SocpStatus::optimal;
    std::vector<std::string> warnings;
    std::vector<IterationLog> history;

    double l1_norm() const { return coefficients.cwiseAbs().sum(); }
};

/**
 * Extent of psi over d: min ||c||_1^2 subject to sum_s c_s s = psi.
 * psi = 0 returns xi = 0 without solving. Throws SolverError unless the
 * solve is certified optimal, RankError when d does not span.
 */
ExtentSolution extent(const Dictionary &d, const ComplexVector &psi, const ExtentOptions &options = {});

struct Fidelity
{
    double value = 0;
    Index index = -1;
};

/// max_s |<s, psi>|^2, ties broken toward the lowest index.
Fidelity fidelity(const Dictionary &d, const ComplexVector &psi);

/// (cos b, e^{i pi/4} sin b) with b = arccos(1/sqrt 3) / 2.
ComplexVector magic_t_state();

} // namespace extentlab
