#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace extentlab
{

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

/// Base of every error the library throws. The CLI maps these to exit status 1.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error
{
public:
    using Error::Error;
};

class ValidationError : public Error
{
public:
    using Error::Error;
};

class NormalizationError : public ValidationError
{
public:
    using ValidationError::ValidationError;
};

class CapacityError : public Error
{
public:
    using Error::Error;
};

class StructureError : public Error
{
public:
    using Error::Error;
};

class RankError : public Error
{
public:
    using Error::Error;
};

class FeasibilityError : public Error
{
public:
    using Error::Error;
};

class SolverError : public Error
{
public:
    using Error::Error;
};

/// Malformed input. Carries the byte offset when the failure is syntactic.
class ParseError : public Error
{
public:
    explicit ParseError(const std::string &what) : Error(what) {}
    ParseError(const std::string &what, std::size_t byte_offset)
        : Error(what + " (at byte " + std::to_string(byte_offset) + ")"), byte_(byte_offset)
    {
    }

    std::optional<std::size_t> byte() const { return byte_; }

private:
    std::optional<std::size_t> byte_;
};

class VersionError : public Error
{
public:
    using Error::Error;
};

/// <a, b> = sum conj(a_j) b_j, antilinear in the first slot.
template <typename DerivedA, typename DerivedB>
Complex inner(const Eigen::MatrixBase<DerivedA> &a, const Eigen::MatrixBase<DerivedB> &b)
{
    return a.dot(b);
}

/// Kronecker product of two vectors, first factor most significant.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, 1> kron(const Eigen::MatrixBase<DerivedA> &a,
                                                                const Eigen::MatrixBase<DerivedB> &b)
{
    Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, 1> out(a.size() * b.size());
    for (Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

} // namespace extentlab
