#pragma once

// Independent reference implementations used only by the tests. None of them
// calls into the library code under test beyond plain Eigen types.

#include <cmath>
#include <complex>
#include <cstdint>
#include <deque>
#include <functional>
#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include <Eigen/Dense>

namespace oracle
{

using Complex = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RayKey = std::vector<long long>;

/// Phase-normalize (largest-magnitude first entry above 1e-6 made real positive) and round to 1e-7.
inline RayKey ray_key(const Vec &v)
{
    Vec w = v;
    for (Eigen::Index j = 0; j < w.size(); ++j)
    {
        if (std::abs(w(j)) > 1e-6)
        {
            w *= std::conj(w(j)) / std::abs(w(j));
            break;
        }
    }
    RayKey key;
    key.reserve(static_cast<std::size_t>(2 * w.size()));
    for (Eigen::Index j = 0; j < w.size(); ++j)
    {
        key.push_back(std::llround(w(j).real() * 1e7));
        key.push_back(std::llround(w(j).imag() * 1e7));
    }
    return key;
}

inline int rank_gf2(std::vector<std::uint64_t> rows)
{
    int rank = 0;
    for (int bit = 63; bit >= 0; --bit)
    {
        const std::uint64_t mask = std::uint64_t{1} << bit;
        auto it = std::find_if(rows.begin() + rank, rows.end(), [&](std::uint64_t r) { return r & mask; });
        if (it == rows.end())
            continue;
        std::swap(*it, rows[static_cast<std::size_t>(rank)]);
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (i != static_cast<std::size_t>(rank) && (rows[i] & mask))
                rows[i] ^= rows[static_cast<std::size_t>(rank)];
        ++rank;
    }
    return rank;
}

/**
 * Every affine-form vector over every ordered independent basis, every offset,
 * every Z_4 linear part and every strictly upper-triangular quadratic part,
 * deduplicated as rays. Exponential; meant for n <= 3.
 */
inline std::set<RayKey> brute_force_stabilizer_rays(int n)
{
    const std::uint64_t dim = std::uint64_t{1} << n;
    std::set<RayKey> rays;
    std::vector<std::uint64_t> basis;

    auto emit_all = [&](int k) {
        const int pairs = k * (k - 1) / 2;
        for (std::uint64_t offset = 0; offset < dim; ++offset)
        {
            for (std::uint64_t lin = 0; lin < (std::uint64_t{1} << (2 * k)); ++lin)
            {
                for (std::uint64_t quad = 0; quad < (std::uint64_t{1} << pairs); ++quad)
                {
                    Vec v = Vec::Zero(static_cast<Eigen::Index>(dim));
                    for (std::uint64_t u = 0; u < (std::uint64_t{1} << k); ++u)
                    {
                        std::uint64_t x = offset;
                        int ipow = 0;
                        int sign = 0;
                        int p = 0;
                        for (int a = 0; a < k; ++a)
                        {
                            const int ua = static_cast<int>((u >> a) & 1);
                            if (ua)
                            {
                                x ^= basis[static_cast<std::size_t>(a)];
                                ipow += static_cast<int>((lin >> (2 * a)) & 3);
                            }
                            for (int b = a + 1; b < k; ++b, ++p)
                                if (ua && ((u >> b) & 1) && ((quad >> p) & 1))
                                    sign ^= 1;
                        }
                        static const Complex ipowers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
                        v(static_cast<Eigen::Index>(x)) = ipowers[ipow % 4] * (sign ? -1.0 : 1.0);
                    }
                    v /= std::sqrt(static_cast<double>(std::uint64_t{1} << k));
                    rays.insert(ray_key(v));
                }
            }
        }
    };

    // recursive ordered choice of independent basis vectors
    std::function<void(int)> choose = [&](int k) {
        emit_all(static_cast<int>(basis.size()));
        if (static_cast<int>(basis.size()) == k)
            return;
        for (std::uint64_t b = 1; b < dim; ++b)
        {
            basis.push_back(b);
            if (rank_gf2(basis) == static_cast<int>(basis.size()) && static_cast<int>(basis.size()) <= n)
                choose(k);
            basis.pop_back();
        }
    };
    // choose() emits at every depth, so forms of each k are visited many times; the set dedupes
    choose(n);
    return rays;
}

/// Orbit of |0...0> under H, S on every qubit and CNOT on every ordered pair (qubit 0 most significant).
inline std::set<RayKey> clifford_orbit_rays(int n, std::vector<Vec> *states = nullptr)
{
    const Eigen::Index dim = Eigen::Index{1} << n;
    auto bit = [n](int q) { return Eigen::Index{1} << (n - 1 - q); };
    std::vector<std::function<Vec(const Vec &)>> gates;
    for (int q = 0; q < n; ++q)
    {
        gates.push_back([=](const Vec &v) {
            Vec w(v.size());
            const double h = 1.0 / std::sqrt(2.0);
            for (Eigen::Index i = 0; i < v.size(); ++i)
                w(i) = (i & bit(q)) ? h * (v(i ^ bit(q)) - v(i)) : h * (v(i) + v(i ^ bit(q)));
            return w;
        });
        gates.push_back([=](const Vec &v) {
            Vec w = v;
            for (Eigen::Index i = 0; i < v.size(); ++i)
                if (i & bit(q))
                    w(i) *= Complex(0, 1);
            return w;
        });
        for (int t = 0; t < n; ++t)
        {
            if (t == q)
                continue;
            gates.push_back([=](const Vec &v) {
                Vec w(v.size());
                for (Eigen::Index i = 0; i < v.size(); ++i)
                    w((i & bit(q)) ? (i ^ bit(t)) : i) = v(i);
                return w;
            });
        }
    }

    std::set<RayKey> seen;
    std::deque<Vec> frontier;
    Vec start = Vec::Zero(dim);
    start(0) = 1;
    seen.insert(ray_key(start));
    frontier.push_back(start);
    if (states)
        states->push_back(start);
    while (!frontier.empty())
    {
        const Vec v = frontier.front();
        frontier.pop_front();
        for (const auto &g : gates)
        {
            Vec w = g(v);
            if (seen.insert(ray_key(w)).second)
            {
                if (states)
                    states->push_back(w);
                frontier.push_back(std::move(w));
            }
        }
    }
    return seen;
}

struct L1Result
{
    double l1 = 0;        // ||c||_1 of a feasible point, an upper bound on the minimum
    double residual = 0;  // ||W c - psi||
    int iterations = 0;
};

/**
 * min ||c||_1 subject to W c = psi by ADMM: alternate the exact projection
 * onto the affine set with complex soft-thresholding. The returned point is
 * projected back onto the affine set, so l1 is a rigorous upper bound.
 */
inline L1Result admm_l1(const Mat &words, const Vec &psi, int max_iters = 200000, double tol = 1e-11)
{
    const Eigen::Index m = words.cols();
    const Mat gram = words * words.adjoint();
    const Eigen::LDLT<Mat> gram_solver(gram);
    auto project = [&](const Vec &v) -> Vec { return v - words.adjoint() * gram_solver.solve(words * v - psi); };
    auto shrink = [](const Vec &v, double kappa) {
        Vec out(v.size());
        for (Eigen::Index j = 0; j < v.size(); ++j)
        {
            const double mag = std::abs(v(j));
            out(j) = mag > kappa ? v(j) * ((mag - kappa) / mag) : Complex(0);
        }
        return out;
    };

    // fixed penalty: adaptive rho stalled on redundant dictionaries
    const double rho = 10.0 / std::max(1e-12, psi.norm());
    Vec z = project(Vec::Zero(m));
    Vec u = Vec::Zero(m);
    L1Result out;
    for (int it = 1; it <= max_iters; ++it)
    {
        const Vec c = project(z - u);
        const Vec z_old = z;
        z = shrink(c + u, 1.0 / rho);
        u += c - z;
        const double primal = (c - z).norm();
        const double dual = rho * (z - z_old).norm();
        out.iterations = it;
        if (primal < tol && dual < tol)
            break;
    }
    const Vec c = project(z);
    out.l1 = c.cwiseAbs().sum();
    out.residual = (words * c - psi).norm();
    return out;
}

/// Closed-form extent over an orthonormal basis: (sum_k |<b_k, psi>|)^2.
inline double orthonormal_basis_extent(const Mat &basis, const Vec &psi)
{
    const double l1 = (basis.adjoint() * psi).cwiseAbs().sum();
    return l1 * l1;
}

} // namespace oracle
