#pragma once

#include <cmath>
#include <limits>

#include <Eigen/Dense>

/**
 * Algebra of the 3-dimensional Lorentz cone {(t, x1, x2) : ||(x1, x2)|| <= t},
 * stored head-first. Identity element e = (1, 0, 0).
 */
namespace extentlab::lorentz
{

template <typename Scalar>
using Point = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, 3, 3>;

/// u0^2 - |u_bar|^2, positive exactly on the interior.
template <typename Derived>
typename Derived::Scalar determinant(const Eigen::MatrixBase<Derived> &u)
{
    return u(0) * u(0) - u(1) * u(1) - u(2) * u(2);
}

template <typename Derived>
bool in_interior(const Eigen::MatrixBase<Derived> &u)
{
    return u(0) > 0 && determinant(u) > 0;
}

/// Jordan product u o v = (u.v, u0 v_bar + v0 u_bar).
template <typename DerivedU, typename DerivedV>
Point<typename DerivedU::Scalar> product(const Eigen::MatrixBase<DerivedU> &u, const Eigen::MatrixBase<DerivedV> &v)
{
    Point<typename DerivedU::Scalar> w;
    w(0) = u.dot(v);
    w.template tail<2>() = u(0) * v.template tail<2>() + v(0) * u.template tail<2>();
    return w;
}

/// Solves lambda o v = r for v; lambda must be interior.
template <typename DerivedL, typename DerivedR>
Point<typename DerivedL::Scalar> divide(const Eigen::MatrixBase<DerivedL> &lambda, const Eigen::MatrixBase<DerivedR> &r)
{
    using Scalar = typename DerivedL::Scalar;
    const Scalar rho = determinant(lambda);
    const Scalar zeta = lambda.template tail<2>().dot(r.template tail<2>());
    Point<Scalar> v;
    v(0) = (lambda(0) * r(0) - zeta) / rho;
    v.template tail<2>() =
        ((zeta / lambda(0) - r(0)) / rho) * lambda.template tail<2>() + r.template tail<2>() / lambda(0);
    return v;
}

/// Largest alpha >= 0 keeping u + alpha du in the cone (infinity if unbounded). u must be interior.
template <typename DerivedU, typename DerivedD>
typename DerivedU::Scalar max_step(const Eigen::MatrixBase<DerivedU> &u, const Eigen::MatrixBase<DerivedD> &du)
{
    using Scalar = typename DerivedU::Scalar;
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    // f(alpha) = a alpha^2 + 2 b alpha + c, the cone determinant along the ray
    const Scalar a = determinant(du);
    const Scalar b = u(0) * du(0) - u(1) * du(1) - u(2) * du(2);
    const Scalar c = determinant(u);
    if (a == Scalar(0))
        return b < 0 ? -c / (2 * b) : inf;
    const Scalar disc = b * b - a * c;
    if (disc < 0)
        return inf;
    // f(0) > 0 and the cone interior is a connected component of {f > 0}, so
    // the ray leaves the cone at the smallest positive root
    const Scalar root = std::sqrt(disc);
    const Scalar q = -(b + (b >= 0 ? root : -root));
    Scalar best = inf;
    for (Scalar r : {q / a, c / q})
        if (r > 0 && r < best)
            best = r;
    return best;
}

/**
 * Nesterov-Todd scaling for the primal-dual pair (x, z) in the interior:
 * symmetric positive definite W with W z = W^{-1} x = lambda.
 */
template <typename Scalar>
struct NtScaling
{
    Matrix<Scalar> w;
    Matrix<Scalar> w_inv;
    Point<Scalar> lambda;
};

template <typename Scalar>
Matrix<Scalar> hyperbolic_boost(const Point<Scalar> &v)
{
    // v has v0 > 0 and v0^2 - |v_bar|^2 = 1
    Matrix<Scalar> h;
    h(0, 0) = v(0);
    h.template block<1, 2>(0, 1) = v.template tail<2>().transpose();
    h.template block<2, 1>(1, 0) = v.template tail<2>();
    h.template block<2, 2>(1, 1) = Eigen::Matrix<Scalar, 2, 2>::Identity() +
                                   v.template tail<2>() * v.template tail<2>().transpose() / (Scalar(1) + v(0));
    return h;
}

template <typename DerivedX, typename DerivedZ>
NtScaling<typename DerivedX::Scalar> nt_scaling(const Eigen::MatrixBase<DerivedX> &x, const Eigen::MatrixBase<DerivedZ> &z)
{
    using Scalar = typename DerivedX::Scalar;
    const Scalar x_det = determinant(x);
    const Scalar z_det = determinant(z);
    const Point<Scalar> xn = x / std::sqrt(x_det);
    const Point<Scalar> zn = z / std::sqrt(z_det);
    const Scalar gamma = std::sqrt((Scalar(1) + xn.dot(zn)) / 2);
    Point<Scalar> wbar;
    wbar(0) = (xn(0) + zn(0)) / (2 * gamma);
    wbar.template tail<2>() = (xn.template tail<2>() - zn.template tail<2>()) / (2 * gamma);
    Point<Scalar> wbar_reflected = wbar;
    wbar_reflected.template tail<2>() *= Scalar(-1);
    const Scalar eta = std::sqrt(std::sqrt(x_det / z_det));

    NtScaling<Scalar> out;
    out.w = eta * hyperbolic_boost(wbar);
    out.w_inv = hyperbolic_boost(wbar_reflected) / eta;
    out.lambda = out.w * z;
    return out;
}

} // namespace extentlab::lorentz
