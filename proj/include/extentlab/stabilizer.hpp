#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "extentlab/dictionary.hpp"
#include "extentlab/types.hpp"

namespace extentlab
{

/**
 * Amplitude parametrization of an n-qubit stabilizer state.
 *
 * The support is the affine subspace {offset ^ sum_j u_j basis[j] : u in F_2^k}
 * and the amplitude at u is
 *
 *     2^{-k/2} * i^{sum_j linear[j] u_j} * (-1)^{sum_{i<=j} Q_ij u_i u_j},
 *
 * with Q_ij bit j of quadratic[i]. Bit strings use the basis-index
 * convention of PauliOperator (qubit 0 is the most significant bit).
 */
struct AffineForm
{
    std::vector<std::uint64_t> basis;
    std::uint64_t offset = 0;
    std::vector<int> linear;
    std::vector<std::uint64_t> quadratic;

    int dimension() const { return static_cast<int>(basis.size()); }
};

/// Throws ValidationError when the form is malformed for n qubits.
void validate(const AffineForm &form, int num_qubits);

ComplexVector stabilizer_amplitudes(const AffineForm &form, int num_qubits);

/// Largest n materialized by default; n = 5 needs allow_large.
inline constexpr int kMaxDefaultQubits = 4;
inline constexpr int kMaxQubits = 5;

/// 2^n prod_{k=1..n} (2^k + 1).
std::uint64_t stabilizer_count(int num_qubits);

/**
 * Visits one canonical affine form per stabilizer ray, in the deterministic
 * order used by enumerate_stabilizer_states. Subspaces are in reduced row
 * echelon form and offsets are coset representatives, so no ray repeats.
 */
void for_each_stabilizer_form(int num_qubits, const std::function<void(const AffineForm &)> &visit);

/// STAB_n as a phase-canonical, ray-deduplicated dictionary. Throws CapacityError outside 1..4 (1..5 with allow_large).
Dictionary enumerate_stabilizer_states(int num_qubits, bool allow_large = false);

/**
 * max_s |<s, psi>|^2 over STAB_n without materializing the dictionary.
 * Works for n <= kMaxQubits.
 */
double stabilizer_fidelity(int num_qubits, const ComplexVector &psi);

/// Index groups of a StabilizerBasisPartition: disjoint, covering, each an orthonormal basis.
struct StabilizerBasisPartition
{
    std::vector<std::vector<Index>> groups;

    /// groups index per dictionary word.
    std::vector<Index> group_of(Index dictionary_size) const;
};

/**
 * Splits a full STAB_n dictionary into its 2^{-n} |STAB_n| orthonormal
 * stabilizer bases. A basis is the orbit of any member under X^a Z^b.
 * Throws StructureError when d is not closed under that action or the
 * orbits fail to be orthonormal.
 */
StabilizerBasisPartition group_into_bases(const Dictionary &d);

} // namespace extentlab
