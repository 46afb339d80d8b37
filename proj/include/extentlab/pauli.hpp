#pragma once

#include <cstdint>
#include <string_view>

#include "extentlab/types.hpp"

namespace extentlab
{

/**
 * n-qubit Pauli operator i^phase * X^x * Z^z in symplectic form.
 *
 * Bit j of the masks acts on the basis-index bit j, so qubit 0 (the leftmost
 * tensor factor) is the most significant bit. n is limited to 63.
 */
class PauliOperator
{
public:
    PauliOperator(int num_qubits, std::uint64_t x_bits, std::uint64_t z_bits, int phase = 0);

    /// Parses strings like "XIZ" or "-iYX"; qubit 0 first.
    static PauliOperator from_string(std::string_view text);

    int num_qubits() const { return num_qubits_; }
    std::uint64_t x_bits() const { return x_bits_; }
    std::uint64_t z_bits() const { return z_bits_; }
    int phase() const { return phase_; }

    /// Action on a state vector of length 2^n.
    ComplexVector apply(const ComplexVector &v) const;

private:
    int num_qubits_;
    std::uint64_t x_bits_;
    std::uint64_t z_bits_;
    int phase_;
};

/// Symplectic test: x_p.z_q + x_q.z_p == 0 over F_2. Throws DimensionError on qubit-count mismatch.
bool pauli_commutes(const PauliOperator &p, const PauliOperator &q);

} // namespace extentlab
