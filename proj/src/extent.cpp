#include "extentlab/extent.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace extentlab
{

ExtentSolution extent(const Dictionary &d, const ComplexVector &psi, const ExtentOptions &options)
{
    if (psi.size() != d.dimension())
        throw DimensionError("state has length " + std::to_string(psi.size()) + " but the dictionary lives in C^" +
                             std::to_string(d.dimension()));
    if (!psi.allFinite())
        throw ValidationError("state has non-finite amplitudes");

    ExtentSolution out;
    if (psi.isZero(0.0))
    {
        if (!d.spans())
            throw RankError("dictionary does not span C^" + std::to_string(d.dimension()));
        out.coefficients = ComplexVector::Zero(d.size());
        out.witness = ComplexVector::Zero(d.dimension());
        return out;
    }

    const SocpProblem problem = build_extent_socp(d, psi);
    const double cond = d.condition_number();
    if (cond > kConditioningWarning)
    {
        std::ostringstream msg;
        msg << "dictionary is near-degenerate (condition number " << cond << ")";
        out.warnings.push_back(msg.str());
    }

    const SocpSolution sol = solve(problem, options.solver);
    out.status = sol.status;
    out.iterations = sol.iterations;
    out.history = sol.history;
    out.gap = sol.relative_gap;
    out.primal_residual = sol.primal_residual;
    out.dual_residual = sol.dual_residual;
    if (sol.status != SocpStatus::optimal)
    {
        std::ostringstream msg;
        msg << "extent solve ended with status " << to_string(sol.status) << " after " << sol.iterations
            << " iterations (gap " << sol.relative_gap << ", primal residual " << sol.primal_residual
            << ", dual residual " << sol.dual_residual << ")";
        throw SolverError(msg.str());
    }

    out.coefficients = sol.coefficients();
    out.witness = sol.witness();
    out.primal_objective = sol.primal_objective;
    out.dual_objective = sol.dual_objective;
    const double l1 = out.coefficients.cwiseAbs().sum();
    out.xi = l1 * l1;
    for (Index s = 0; s < d.size(); ++s)
        if (std::abs(out.coefficients(s)) > options.support_tolerance)
            out.support.push_back(s);
    return out;
}

Fidelity fidelity(const Dictionary &d, const ComplexVector &psi)
{
    if (psi.size() != d.dimension())
        throw DimensionError("state has length " + std::to_string(psi.size()) + " but the dictionary lives in C^" +
                             std::to_string(d.dimension()));
    Fidelity best;
    if (d.size() == 0)
        return best;
    const Eigen::VectorXd overlaps = (d.matrix().adjoint() * psi).cwiseAbs2();
    overlaps.maxCoeff(&best.index);
    best.value = overlaps(best.index);
    return best;
}

ComplexVector magic_t_state()
{
    const double beta = 0.5 * std::acos(1.0 / std::numbers::sqrt3);
    ComplexVector psi(2);
    psi << std::cos(beta), std::polar(std::sin(beta), std::numbers::pi / 4);
    return psi;
}

} // namespace extentlab
