#pragma once

#include <string>
#include <vector>

#include "extentlab/dictionary.hpp"
#include "extentlab/types.hpp"

namespace extentlab
{

/**
 * Real standard-form cone program for the extent:
 *
 *     min sum_s t_s   s.t.  sum_s A_s (c_s^R, c_s^I, t_s) = (psi^R, psi^I),
 *                           (c_s^R, c_s^I, t_s) in L^{2+1},
 *
 * with A_s = [s^R -s^I 0; s^I s^R 0]. Only the non-zero 2d x 2 part of each
 * A_s is stored: columns 2s and 2s+1 of `blocks`.
 */
struct SocpProblem
{
    Eigen::MatrixXd blocks;
    Eigen::VectorXd rhs;

    Index num_cones() const { return blocks.cols() / 2; }
    Index num_rows() const { return blocks.rows(); }

    /// Full 2d x 3m equality matrix, variables ordered (c^R, c^I, t) per word.
    Eigen::MatrixXd equality_matrix() const;
    /// Length-3m cost vector selecting every t slot.
    Eigen::VectorXd objective() const;
};

/// Throws DimensionError on length mismatch and RankError when d does not span C^d.
SocpProblem build_extent_socp(const Dictionary &d, const ComplexVector &psi);

enum class SocpStatus
{
    optimal,
    max_iters,
    infeasible_detected,
};

std::string to_string(SocpStatus status);

struct SolverOptions
{
    double gap_tolerance = 1e-7;         // relative duality gap
    double feasibility_tolerance = 1e-8; // primal and dual residuals
    int max_iterations = 200;
    double refine_gap = 1e-11;       // extra steps after convergence, best effort
    int max_refine_iterations = 10;
    bool polish = true; // Newton on the support after convergence
    double step_fraction = 0.99;
    bool record_history = false;
};

struct IterationLog
{
    int iteration = 0;
    double primal_objective = 0;
    double dual_objective = 0;
    double relative_gap = 0;
    double primal_residual = 0;
    double dual_residual = 0;
    double mu = 0;
    double sigma = 0;
    double step = 0;
};

struct SocpSolution
{
    // primal, one entry per cone
    Eigen::VectorXd c_real;
    Eigen::VectorXd c_imag;
    Eigen::VectorXd t;
    // dual (y^R, y^I), and the slacks z_s = (-<s,y>^R, -<s,y>^I, 1) as columns
    Eigen::VectorXd dual;
    Eigen::Matrix3Xd dual_slack;

    double primal_objective = 0;
    double dual_objective = 0;
    double relative_gap = 0;
    double primal_residual = 0;
    double dual_residual = 0;
    int iterations = 0;
    SocpStatus status = SocpStatus::max_iters;
    std::vector<IterationLog> history;

    ComplexVector coefficients() const;
    /// y = y^R + i y^I.
    ComplexVector witness() const;
};

/**
 * Primal-dual interior-point method with Nesterov-Todd scaling and
 * Mehrotra predictor-corrector steps. The returned dual vector is scaled
 * into M_D, so dual_objective is a valid lower bound. Throws SolverError on
 * numerical breakdown.
 */
SocpSolution solve(const SocpProblem &problem, const SolverOptions &options = {});

struct DualFeasibility
{
    bool feasible = false;
    double max_overlap = 0;
};

/// max_s |<s, y>| and whether it is at most 1 + tol.
DualFeasibility check_dual_feasibility(const Dictionary &d, const ComplexVector &y, double tol = 1e-8);

} // namespace extentlab
