#include "extentlab/socp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "extentlab/lorentz.hpp"

namespace extentlab
{

namespace
{

using Cones = Eigen::Matrix3Xd;

constexpr double kTiny = 1e-300;

/// A applied to per-cone (t, c^R, c^I) columns.
Eigen::VectorXd apply_a(const Eigen::MatrixXd &blocks, const Cones &v)
{
    const Eigen::Matrix2Xd c = v.bottomRows<2>();
    return blocks * Eigen::Map<const Eigen::VectorXd>(c.data(), c.size());
}

/// A^T y as per-cone columns; the t component is always zero.
Cones apply_at(const Eigen::MatrixXd &blocks, const Eigen::VectorXd &y)
{
    const Eigen::VectorXd flat = blocks.transpose() * y;
    Cones out(3, blocks.cols() / 2);
    out.row(0).setZero();
    out.bottomRows<2>() = Eigen::Map<const Eigen::Matrix2Xd>(flat.data(), 2, out.cols());
    return out;
}

Cones identity_cones(Index m)
{
    Cones e = Cones::Zero(3, m);
    e.row(0).setOnes();
    return e;
}

/// Largest step keeping every column of u + alpha du inside the cone.
double max_step(const Cones &u, const Cones &du)
{
    double alpha = std::numeric_limits<double>::infinity();
    for (Index s = 0; s < u.cols(); ++s)
        alpha = std::min(alpha, lorentz::max_step(u.col(s), du.col(s)));
    return alpha;
}

/// Per-iterate quantities, computed against the dual vector scaled into M_D.
struct Metrics
{
    double primal_objective = 0;
    double dual_objective = 0;
    double relative_gap = 0;
    double primal_residual = 0;
    double dual_residual = 0;
    double max_overlap = 0;
    double mu = 0;

    double merit(const SolverOptions &o) const
    {
        return std::max({relative_gap / o.gap_tolerance, primal_residual / o.feasibility_tolerance,
                         dual_residual / o.feasibility_tolerance});
    }
    bool converged(const SolverOptions &o) const { return merit(o) <= 1.0; }
};

Metrics measure(const SocpProblem &p, const Cones &x, const Eigen::VectorXd &y, const Cones &z)
{
    Metrics m;
    const Index cones = x.cols();
    const Eigen::VectorXd r_p = p.rhs - apply_a(p.blocks, x);
    const Cones at_y = apply_at(p.blocks, y);
    const Cones r_d = identity_cones(cones) - at_y - z;

    double overlap = 0;
    for (Index s = 0; s < cones; ++s)
        overlap = std::max(overlap, at_y.col(s).tail<2>().norm());
    m.max_overlap = overlap;

    m.primal_objective = x.row(0).sum();
    m.dual_objective = p.rhs.dot(y) / std::max(1.0, overlap);
    const double complementarity = x.cwiseProduct(z).sum();
    m.mu = complementarity / static_cast<double>(cones);
    const double scale = std::max({std::abs(m.primal_objective), std::abs(m.dual_objective), kTiny});
    m.relative_gap = std::max(std::abs(m.primal_objective - m.dual_objective), complementarity) / scale;
    m.primal_residual = r_p.lpNorm<Eigen::Infinity>() / (1.0 + p.rhs.lpNorm<Eigen::Infinity>());
    m.dual_residual = std::max(r_d.lpNorm<Eigen::Infinity>() / 2.0, overlap - 1.0);
    return m;
}

/// Cholesky of the normal matrix with escalating diagonal regularization.
class NormalSolver
{
public:
    explicit NormalSolver(const Eigen::MatrixXd &normal) : normal_(normal)
    {
        const double scale = std::max(1.0, normal.diagonal().cwiseAbs().maxCoeff());
        for (double reg = 1e-12; reg <= 1e-2; reg *= 100)
        {
            Eigen::MatrixXd shifted = normal;
            shifted.diagonal().array() += reg * scale;
            llt_.compute(shifted);
            if (llt_.info() == Eigen::Success)
                return;
        }
        throw SolverError("normal equations are not positive definite even after regularization");
    }

    Eigen::VectorXd solve(const Eigen::VectorXd &rhs) const
    {
        Eigen::VectorXd x = llt_.solve(rhs);
        for (int refine = 0; refine < 2; ++refine)
            x += llt_.solve(rhs - normal_ * x);
        return x;
    }

private:
    const Eigen::MatrixXd &normal_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
};

std::string describe(const Metrics &m, int iteration)
{
    std::ostringstream out;
    out.precision(3);
    out << "iteration " << iteration << ": gap " << m.relative_gap << ", primal residual " << m.primal_residual
        << ", dual residual " << m.dual_residual << ", mu " << m.mu;
    return out.str();
}

/// Newton on the optimality conditions restricted to the support of x:
///   sum_s r_s B_s B_s^T y = b,  |B_s^T y| = 1,
/// with c_s = r_s B_s^T y. On success the returned pair is exactly complementary.
bool polish(const SocpProblem &p, const Cones &x, const Eigen::VectorXd &y, double feas_tol, Cones &x_out,
            Eigen::VectorXd &y_out)
{
    const Eigen::MatrixXd &blocks = p.blocks;
    const Eigen::VectorXd &b = p.rhs;
    const Index m = p.num_cones();
    const Index rows = p.num_rows();
    const double total = x.bottomRows<2>().colwise().norm().sum();
    std::vector<Index> active;
    for (Index s = 0; s < m; ++s)
        if (x.col(s).tail<2>().norm() > 1e-6 * total)
            active.push_back(s);
    const Index k = static_cast<Index>(active.size());
    if (k == 0)
        return false;

    Eigen::VectorXd r(k);
    for (Index i = 0; i < k; ++i)
        r(i) = x.col(active[static_cast<std::size_t>(i)]).tail<2>().norm();
    Eigen::VectorXd v = y;
    Eigen::VectorXd residual(rows + k);
    Eigen::MatrixXd jac(rows + k, rows + k);
    auto evaluate = [&] {
        residual.head(rows) = -b;
        jac.setZero();
        for (Index i = 0; i < k; ++i)
        {
            const auto block = blocks.middleCols(2 * active[static_cast<std::size_t>(i)], 2);
            const Eigen::Vector2d u = block.transpose() * v;
            const Eigen::VectorXd bu = block * u;
            residual.head(rows) += r(i) * bu;
            residual(rows + i) = u.squaredNorm() - 1.0;
            jac.topLeftCorner(rows, rows) += r(i) * block * block.transpose();
            jac.col(rows + i).head(rows) = bu;
            jac.row(rows + i).head(rows) = 2.0 * bu.transpose();
        }
    };

    const double b_scale = 1.0 + b.lpNorm<Eigen::Infinity>();
    for (int it = 0; it < 8; ++it)
    {
        evaluate();
        if (residual.lpNorm<Eigen::Infinity>() <= 1e-15 * b_scale)
            break;
        const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(-residual);
        v += step.head(rows);
        r += step.tail(k);
    }
    evaluate();
    if (!residual.allFinite() || residual.lpNorm<Eigen::Infinity>() > 1e-3 * feas_tol * b_scale || r.minCoeff() <= 0)
        return false;
    if ((blocks.transpose() * v).reshaped(2, m).colwise().norm().maxCoeff() > 1.0 + feas_tol)
        return false;

    x_out = Cones::Zero(3, m);
    for (Index i = 0; i < k; ++i)
    {
        const Index s = active[static_cast<std::size_t>(i)];
        x_out(0, s) = r(i);
        x_out.col(s).tail<2>() = r(i) * (blocks.middleCols(2 * s, 2).transpose() * v);
    }
    y_out = v;
    return true;
}

} // namespace

Eigen::MatrixXd SocpProblem::equality_matrix() const
{
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(num_rows(), 3 * num_cones());
    for (Index s = 0; s < num_cones(); ++s)
        a.middleCols(3 * s, 2) = blocks.middleCols(2 * s, 2);
    return a;
}

Eigen::VectorXd SocpProblem::objective() const
{
    Eigen::VectorXd c = Eigen::VectorXd::Zero(3 * num_cones());
    for (Index s = 0; s < num_cones(); ++s)
        c(3 * s + 2) = 1.0;
    return c;
}

SocpProblem build_extent_socp(const Dictionary &d, const ComplexVector &psi)
{
    if (psi.size() != d.dimension())
        throw DimensionError("state has length " + std::to_string(psi.size()) + " but the dictionary lives in C^" +
                             std::to_string(d.dimension()));
    if (!d.spans())
        throw RankError("dictionary of " + std::to_string(d.size()) + " words does not span C^" +
                        std::to_string(d.dimension()));
    const Index dim = d.dimension();
    const Index m = d.size();
    const ComplexMatrix &w = d.matrix();

    SocpProblem p;
    p.blocks.resize(2 * dim, 2 * m);
    p.blocks.topRows(dim)(Eigen::all, Eigen::seqN(0, m, 2)) = w.real();
    p.blocks.bottomRows(dim)(Eigen::all, Eigen::seqN(0, m, 2)) = w.imag();
    p.blocks.topRows(dim)(Eigen::all, Eigen::seqN(1, m, 2)) = -w.imag();
    p.blocks.bottomRows(dim)(Eigen::all, Eigen::seqN(1, m, 2)) = w.real();
    p.rhs.resize(2 * dim);
    p.rhs << psi.real(), psi.imag();
    return p;
}

std::string to_string(SocpStatus status)
{
    switch (status)
    {
    case SocpStatus::optimal:
        return "optimal";
    case SocpStatus::max_iters:
        return "max_iters";
    case SocpStatus::infeasible_detected:
        return "infeasible_detected";
    }
    return "unknown";
}

ComplexVector SocpSolution::coefficients() const
{
    ComplexVector c(c_real.size());
    c.real() = c_real;
    c.imag() = c_imag;
    return c;
}

ComplexVector SocpSolution::witness() const
{
    const Index dim = dual.size() / 2;
    ComplexVector y(dim);
    y.real() = dual.head(dim);
    y.imag() = dual.tail(dim);
    return y;
}

SocpSolution solve(const SocpProblem &problem, const SolverOptions &options)
{
    const Eigen::MatrixXd &blocks = problem.blocks;
    const Eigen::VectorXd &b = problem.rhs;
    const Index m = problem.num_cones();
    const Index rows = problem.num_rows();
    if (m == 0 || rows == 0 || b.size() != rows)
        throw DimensionError("malformed cone program");

    SocpSolution sol;
    auto export_iterate = [&](const Cones &x, const Eigen::VectorXd &y, const Metrics &metrics) {
        sol.t = x.row(0).transpose();
        sol.c_real = x.row(1).transpose();
        sol.c_imag = x.row(2).transpose();
        sol.dual = y / std::max(1.0, metrics.max_overlap);
        sol.dual_slack = identity_cones(m) - apply_at(blocks, sol.dual);
        // report the slack in (c^R, c^I, t) order
        sol.dual_slack.row(0).swap(sol.dual_slack.row(1));
        sol.dual_slack.row(1).swap(sol.dual_slack.row(2));
        sol.primal_objective = metrics.primal_objective;
        sol.dual_objective = metrics.dual_objective;
        sol.relative_gap = metrics.relative_gap;
        sol.primal_residual = metrics.primal_residual;
        sol.dual_residual = metrics.dual_residual;
    };

    // Minimum-norm solution of the equality system, through the pseudo-inverse of B B^T.
    const Eigen::MatrixXd gram = blocks * blocks.transpose();
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const double cutoff = 1e-12 * std::max(eig.eigenvalues().maxCoeff(), kTiny);
    Eigen::VectorXd inv = eig.eigenvalues();
    for (Index i = 0; i < inv.size(); ++i)
        inv(i) = inv(i) > cutoff ? 1.0 / inv(i) : 0.0;
    const Eigen::VectorXd gram_pinv_b = eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose() * b;
    const Eigen::VectorXd c0 = blocks.transpose() * gram_pinv_b;
    const Eigen::VectorXd r0 = b - blocks * c0;
    const double b_scale = 1.0 + b.lpNorm<Eigen::Infinity>();
    if (r0.lpNorm<Eigen::Infinity>() > options.feasibility_tolerance * b_scale)
    {
        // r0 is orthogonal to the range of A and b.r0 = |r0|^2 > 0: a Farkas certificate
        sol.status = SocpStatus::infeasible_detected;
        sol.c_real = Eigen::VectorXd::Zero(m);
        sol.c_imag = Eigen::VectorXd::Zero(m);
        sol.t = Eigen::VectorXd::Zero(m);
        sol.dual = r0 / r0.norm();
        sol.dual_slack = Eigen::Matrix3Xd::Zero(3, m);
        sol.primal_residual = r0.lpNorm<Eigen::Infinity>() / b_scale;
        sol.primal_objective = std::numeric_limits<double>::infinity();
        sol.dual_objective = std::numeric_limits<double>::infinity();
        sol.relative_gap = std::numeric_limits<double>::infinity();
        return sol;
    }

    Cones x(3, m);
    x.bottomRows<2>() = Eigen::Map<const Eigen::Matrix2Xd>(c0.data(), 2, m);
    x.row(0) = x.bottomRows<2>().colwise().norm().array() + 1.0;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(rows);
    Cones z = identity_cones(m);

    Cones best_x = x;
    Eigen::VectorXd best_y = y;
    Metrics best_metrics = measure(problem, x, y, z);

    std::vector<lorentz::Matrix<double>> w(static_cast<std::size_t>(m));
    std::vector<lorentz::Matrix<double>> w_inv(static_cast<std::size_t>(m));
    Cones lambda(3, m);
    Eigen::MatrixXd weighted(rows, 2 * m);

    // Once the tolerances hold, keep stepping toward refine_gap: the witness phases on the
    // support only settle like sqrt(mu). The certified iterate with the smallest gap is returned.
    bool converged = false;
    int refine_steps = 0;
    Cones cert_x;
    Eigen::VectorXd cert_y;
    Metrics cert_metrics;
    int iteration = 0;
    for (;; ++iteration)
    {
        const Metrics metrics = measure(problem, x, y, z);
        if (metrics.merit(options) < best_metrics.merit(options) || iteration == 0)
        {
            best_metrics = metrics;
            best_x = x;
            best_y = y;
        }
        if (metrics.converged(options))
        {
            if (!converged || metrics.relative_gap < cert_metrics.relative_gap)
            {
                cert_metrics = metrics;
                cert_x = x;
                cert_y = y;
            }
            converged = true;
            if (metrics.relative_gap <= options.refine_gap || refine_steps++ >= options.max_refine_iterations)
                break;
        }
        else if (converged)
            break;
        if (iteration >= options.max_iterations)
            break;
        try
        {
            const Eigen::VectorXd r_p = b - apply_a(blocks, x);
            const Cones r_d = identity_cones(m) - apply_at(blocks, y) - z;

            for (Index s = 0; s < m; ++s)
            {
                if (!lorentz::in_interior(x.col(s)) || !lorentz::in_interior(z.col(s)))
                    throw SolverError("iterate left the cone interior at " + describe(metrics, iteration));
                const auto nt = lorentz::nt_scaling(x.col(s), z.col(s));
                w[static_cast<std::size_t>(s)] = nt.w;
                w_inv[static_cast<std::size_t>(s)] = nt.w_inv;
                lambda.col(s) = nt.lambda;
                const Eigen::Matrix2d w2 = (nt.w * nt.w).bottomRightCorner<2, 2>();
                weighted.middleCols(2 * s, 2) = blocks.middleCols(2 * s, 2) * w2;
            }
            const Eigen::MatrixXd normal = weighted * blocks.transpose();
            const NormalSolver normal_solver(normal);

            auto direction = [&](const Cones &r_c, Cones &dx, Eigen::VectorXd &dy, Cones &dz) {
                Cones scaled_rc(3, m);
                Cones u(3, m);
                for (Index s = 0; s < m; ++s)
                {
                    const auto &ws = w[static_cast<std::size_t>(s)];
                    scaled_rc.col(s) = lorentz::divide(lambda.col(s), r_c.col(s));
                    u.col(s) = ws * (scaled_rc.col(s) - ws * r_d.col(s));
                }
                dy = normal_solver.solve(r_p - apply_a(blocks, u));
                dz = r_d - apply_at(blocks, dy);
                dx.resize(3, m);
                for (Index s = 0; s < m; ++s)
                {
                    const auto &ws = w[static_cast<std::size_t>(s)];
                    dx.col(s) = ws * (scaled_rc.col(s) - ws * dz.col(s));
                }
            };

            // predictor
            Cones r_c(3, m);
            for (Index s = 0; s < m; ++s)
                r_c.col(s) = -lorentz::product(lambda.col(s), lambda.col(s));
            Cones dx_aff;
            Cones dz_aff;
            Eigen::VectorXd dy_aff;
            direction(r_c, dx_aff, dy_aff, dz_aff);
            const double alpha_aff = std::min({1.0, max_step(x, dx_aff), max_step(z, dz_aff)});
            const double mu = metrics.mu;
            const double mu_aff =
                (x + alpha_aff * dx_aff).cwiseProduct(z + alpha_aff * dz_aff).sum() / static_cast<double>(m);
            const double sigma = std::clamp(std::pow(mu_aff / mu, 3), 0.0, 1.0);

            // corrector
            for (Index s = 0; s < m; ++s)
            {
                const lorentz::Point<double> dxs = w_inv[static_cast<std::size_t>(s)] * dx_aff.col(s);
                const lorentz::Point<double> dzs = w[static_cast<std::size_t>(s)] * dz_aff.col(s);
                r_c.col(s) -= lorentz::product(dxs, dzs);
                r_c(0, s) += sigma * mu;
            }
            Cones dx;
            Cones dz;
            Eigen::VectorXd dy;
            direction(r_c, dx, dy, dz);
            const double alpha = std::min(1.0, options.step_fraction * std::min(max_step(x, dx), max_step(z, dz)));

            x += alpha * dx;
            y += alpha * dy;
            z += alpha * dz;
            if (!x.allFinite() || !y.allFinite() || !z.allFinite())
                throw SolverError("non-finite iterate after " + describe(metrics, iteration));

            if (options.record_history)
            {
                IterationLog log;
                log.iteration = iteration;
                log.primal_objective = metrics.primal_objective;
                log.dual_objective = metrics.dual_objective;
                log.relative_gap = metrics.relative_gap;
                log.primal_residual = metrics.primal_residual;
                log.dual_residual = metrics.dual_residual;
                log.mu = mu;
                log.sigma = sigma;
                log.step = alpha;
                sol.history.push_back(log);
            }
        }
        catch (const SolverError &)
        {
            if (!converged)
                throw;
            break;
        }
    }

    sol.iterations = iteration;
    if (converged)
    {
        sol.status = SocpStatus::optimal;
        Cones polished_x;
        Eigen::VectorXd polished_y;
        if (options.polish && polish(problem, cert_x, cert_y, options.feasibility_tolerance, polished_x, polished_y))
        {
            const Cones polished_z = identity_cones(m) - apply_at(blocks, polished_y);
            const Metrics polished = measure(problem, polished_x, polished_y, polished_z);
            if (polished.converged(options))
            {
                cert_x = polished_x;
                cert_y = polished_y;
                cert_metrics = polished;
            }
        }
        export_iterate(cert_x, cert_y, cert_metrics);
    }
    else
    {
        sol.status = SocpStatus::max_iters;
        export_iterate(best_x, best_y, best_metrics);
    }
    return sol;
}

DualFeasibility check_dual_feasibility(const Dictionary &d, const ComplexVector &y, double tol)
{
    if (y.size() != d.dimension())
        throw DimensionError("witness has length " + std::to_string(y.size()) + " but the dictionary lives in C^" +
                             std::to_string(d.dimension()));
    DualFeasibility out;
    out.max_overlap = d.size() > 0 ? (d.matrix().adjoint() * y).cwiseAbs().maxCoeff() : 0.0;
    out.feasible = out.max_overlap <= 1.0 + tol;
    return out;
}

} // namespace extentlab
