#include <doctest.h>

#include <cmath>
#include <numbers>

#include "extentlab/lorentz.hpp"
#include "extentlab/random.hpp"
#include "extentlab/socp.hpp"
#include "extentlab/stabilizer.hpp"
#include "oracles.hpp"

using namespace extentlab;

namespace
{

ComplexVector vec2(Complex a, Complex b)
{
    ComplexVector v(2);
    v << a, b;
    return v;
}

Dictionary random_dictionary(Index dim, Index words, RandomStream &rng)
{
    std::vector<ComplexVector> list;
    for (Index k = 0; k < dim; ++k)
        list.push_back(ComplexVector::Unit(dim, k));
    while (static_cast<Index>(list.size()) < words)
        list.push_back(haar_sample(dim, rng));
    return make_dictionary(list);
}

} // namespace

TEST_SUITE("socp")
{
    TEST_CASE("lorentz cone algebra")
    {
        using P = lorentz::Point<double>;
        const P e(1, 0, 0);
        const P u(2.0, 0.5, -1.0);
        CHECK((lorentz::product(e, u) - u).norm() < 1e-15);
        const P v = lorentz::divide(u, P(0.3, -0.2, 0.7));
        CHECK((lorentz::product(u, v) - P(0.3, -0.2, 0.7)).norm() < 1e-14);

        // step to the boundary
        const double alpha = lorentz::max_step(u, P(-1, 0, 0));
        CHECK(std::abs(lorentz::determinant(P(u + alpha * P(-1, 0, 0)))) < 1e-12);
        CHECK(std::isinf(lorentz::max_step(u, P(1, 0, 0))));
        CHECK(std::isinf(lorentz::max_step(u, P(0, 0, 0))));

        RandomStream rng(2);
        for (int t = 0; t < 20; ++t)
        {
            P x(0, rng.normal(), rng.normal());
            P z(0, rng.normal(), rng.normal());
            x(0) = x.tail<2>().norm() + 0.1 + rng.uniform();
            z(0) = z.tail<2>().norm() + 0.1 + rng.uniform();
            const auto nt = lorentz::nt_scaling(x, z);
            CHECK((nt.w - nt.w.transpose()).norm() < 1e-12);
            CHECK((nt.w * nt.w_inv - lorentz::Matrix<double>::Identity()).norm() < 1e-10);
            CHECK((nt.w_inv * x - nt.lambda).norm() < 1e-10 * x.norm());
            CHECK(lorentz::in_interior(nt.lambda));
        }
    }

    TEST_CASE("problem structure")
    {
        const Dictionary s1 = enumerate_stabilizer_states(1);
        const ComplexVector psi = vec2(0.6, 0.8);
        const SocpProblem p = build_extent_socp(s1, psi);
        const Eigen::MatrixXd a = p.equality_matrix();
        CHECK(a.rows() == 4);
        CHECK(a.cols() == 18);
        const Eigen::VectorXd c = p.objective();
        for (Index j = 0; j < c.size(); ++j)
            CHECK(c(j) == (j % 3 == 2 ? 1.0 : 0.0));
        CHECK(p.rhs == (Eigen::VectorXd(4) << 0.6, 0.8, 0, 0).finished());

        // (1, i)/sqrt2: s^R = (h, 0), s^I = (0, h)
        const double h = 1.0 / std::numbers::sqrt2;
        const Dictionary one = make_dictionary({vec2(h, Complex(0, h)), vec2(1, 0)});
        const Eigen::MatrixXd block = build_extent_socp(one, psi).equality_matrix().leftCols(3);
        Eigen::MatrixXd expected(4, 3);
        expected << h, 0, 0, //
            0, -h, 0,        //
            0, h, 0,         //
            h, 0, 0;
        CHECK((block - expected).norm() < 1e-15);
    }

    TEST_CASE("build errors")
    {
        const Dictionary e0 = make_dictionary({vec2(1, 0)});
        CHECK_THROWS_AS(build_extent_socp(e0, vec2(1, 0)), RankError);
        CHECK_THROWS_AS(build_extent_socp(enumerate_stabilizer_states(1), ComplexVector::Zero(3)), DimensionError);
    }

    TEST_CASE("computational basis instance")
    {
        const Dictionary d = make_dictionary({vec2(1, 0), vec2(0, 1)});
        const SocpSolution s = solve(build_extent_socp(d, vec2(0.6, 0.8)));
        REQUIRE(s.status == SocpStatus::optimal);
        CHECK(std::abs(s.primal_objective - 1.4) < 1e-7);
        CHECK(std::abs(s.dual_objective - 1.4) < 1e-7);
        CHECK((s.witness() - vec2(1, 1)).norm() < 1e-6);
        CHECK((s.coefficients() - vec2(0.6, 0.8)).norm() < 1e-7);
    }

    TEST_CASE("state equal to a word")
    {
        const Dictionary s2 = enumerate_stabilizer_states(2);
        const SocpSolution s = solve(build_extent_socp(s2, s2.word(17)));
        REQUIRE(s.status == SocpStatus::optimal);
        CHECK(std::abs(s.primal_objective - 1.0) < 1e-7);
    }

    TEST_CASE("random instances are certified and agree with the ADMM oracle")
    {
        RandomStream rng(1234);
        for (int t = 0; t < 20; ++t)
        {
            const Index dim = 2 + static_cast<Index>(rng.next_u64() % 3);
            const Index m = dim + 1 + static_cast<Index>(rng.next_u64() % (12 - dim));
            const Dictionary d = random_dictionary(dim, m, rng);
            const ComplexVector psi = haar_sample(dim, rng);
            SolverOptions opts;
            opts.record_history = true;
            const SocpSolution s = solve(build_extent_socp(d, psi), opts);
            REQUIRE(s.status == SocpStatus::optimal);
            CHECK(s.relative_gap <= 1e-7);
            CHECK(s.primal_residual <= 1e-8);
            CHECK(s.dual_residual <= 1e-8);
            CHECK(check_dual_feasibility(d, s.witness(), 1e-8).feasible);

            const oracle::L1Result ref = oracle::admm_l1(d.matrix(), psi);
            CHECK(ref.residual < 1e-9);
            CHECK(std::abs(s.primal_objective - ref.l1) <= 1e-4 * ref.l1);

            // weak duality on every iterate, up to the primal residual: b.y - sum t <= |r_p| |y|,
            // and |y| <= sqrt(dim) because the standard basis is in the dictionary
            const double rows = static_cast<double>(2 * dim);
            for (const auto &h : s.history)
                CHECK(h.dual_objective <= h.primal_objective + 1e-12 + std::sqrt(rows * static_cast<double>(dim)) *
                                                                          h.primal_residual * 2.0);

            // sum t_s = sum c^R <s,y>^R + c^I <s,y>^I at the optimum
            const ComplexVector overlaps = d.matrix().adjoint() * s.witness();
            double pairing = 0;
            for (Index k = 0; k < d.size(); ++k)
                pairing += s.c_real(k) * overlaps(k).real() + s.c_imag(k) * overlaps(k).imag();
            CHECK(std::abs(s.t.sum() - pairing) <= 1e-7 * s.t.sum());

            // slacks in (c^R, c^I, t) order: (-Re<s,y>, -Im<s,y>, 1)
            for (Index k = 0; k < d.size(); ++k)
            {
                CHECK(std::abs(s.dual_slack(0, k) + overlaps(k).real()) < 1e-12);
                CHECK(std::abs(s.dual_slack(1, k) + overlaps(k).imag()) < 1e-12);
                CHECK(s.dual_slack(2, k) == 1.0);
            }
        }
    }

    TEST_CASE("scaling the state scales the optimum and keeps the witness")
    {
        RandomStream rng(77);
        const Dictionary d = random_dictionary(3, 9, rng);
        const ComplexVector psi = haar_sample(3, rng);
        const SocpSolution base = solve(build_extent_socp(d, psi));
        for (double alpha : {0.25, 3.0, 40.0})
        {
            const SocpSolution scaled = solve(build_extent_socp(d, ComplexVector(alpha * psi)));
            REQUIRE(scaled.status == SocpStatus::optimal);
            CHECK(std::abs(scaled.primal_objective - alpha * base.primal_objective) <=
                  1e-6 * alpha * base.primal_objective);
            CHECK((scaled.witness() - base.witness()).norm() < 1e-5);
        }
    }

    TEST_CASE("iteration cap reports the best iterate")
    {
        const Dictionary s2 = enumerate_stabilizer_states(2);
        RandomStream rng(8);
        SolverOptions opts;
        opts.max_iterations = 2;
        const SocpSolution s = solve(build_extent_socp(s2, haar_sample(4, rng)), opts);
        CHECK(s.status == SocpStatus::max_iters);
        CHECK(s.iterations == 2);
        CHECK(s.relative_gap > opts.gap_tolerance);
        CHECK(s.c_real.size() == s2.size());
        CHECK(std::isfinite(s.primal_objective));
        CHECK(to_string(s.status) == "max_iters");
    }

    TEST_CASE("inconsistent equality systems are detected")
    {
        SocpProblem p;
        p.blocks = Eigen::MatrixXd(4, 2);
        p.blocks << 1, 0, 0, 1, 0, 0, 0, 0;
        p.rhs = Eigen::Vector4d(0.5, 0.1, 0.3, 0.0);
        const SocpSolution s = solve(p);
        CHECK(s.status == SocpStatus::infeasible_detected);
        CHECK(to_string(s.status) == "infeasible_detected");
        // certificate: A^T y = 0 and b.y > 0
        CHECK((p.blocks.transpose() * s.dual).norm() < 1e-12);
        CHECK(p.rhs.dot(s.dual) > 0);
    }

    TEST_CASE("dual feasibility check")
    {
        const Dictionary s1 = enumerate_stabilizer_states(1);
        const auto zero = check_dual_feasibility(s1, ComplexVector::Zero(2));
        CHECK(zero.feasible);
        CHECK(zero.max_overlap == 0.0);
        const auto twice = check_dual_feasibility(s1, ComplexVector(2.0 * s1.word(3)));
        CHECK_FALSE(twice.feasible);
        CHECK(std::abs(twice.max_overlap - 2.0) < 1e-12);

        RandomStream rng(4);
        const ComplexVector psi = haar_sample(2, rng);
        const double f = (s1.matrix().adjoint() * psi).cwiseAbs2().maxCoeff();
        const auto scaled = check_dual_feasibility(s1, ComplexVector(psi / std::sqrt(f)));
        CHECK(scaled.feasible);
        CHECK(std::abs(scaled.max_overlap - 1.0) < 1e-12);
        CHECK_THROWS_AS(check_dual_feasibility(s1, ComplexVector::Zero(3)), DimensionError);
    }
}
