#include "extentlab/pauli.hpp"

#include <bit>
#include <string>

namespace extentlab
{

PauliOperator::PauliOperator(int num_qubits, std::uint64_t x_bits, std::uint64_t z_bits, int phase)
    : num_qubits_(num_qubits), x_bits_(x_bits), z_bits_(z_bits), phase_(((phase % 4) + 4) % 4)
{
    if (num_qubits < 1 || num_qubits > 63)
        throw ValidationError("Pauli operator needs between 1 and 63 qubits");
    const std::uint64_t mask = (std::uint64_t{1} << num_qubits) - 1;
    if ((x_bits & ~mask) || (z_bits & ~mask))
        throw ValidationError("Pauli bit string longer than qubit count");
}

PauliOperator PauliOperator::from_string(std::string_view text)
{
    int phase = 0;
    if (!text.empty() && (text.front() == '+' || text.front() == '-'))
    {
        if (text.front() == '-')
            phase = 2;
        text.remove_prefix(1);
    }
    if (!text.empty() && text.front() == 'i')
    {
        phase += 1;
        text.remove_prefix(1);
    }
    const int n = static_cast<int>(text.size());
    std::uint64_t x = 0;
    std::uint64_t z = 0;
    for (int q = 0; q < n; ++q)
    {
        const std::uint64_t bit = std::uint64_t{1} << (n - 1 - q);
        switch (text[q])
        {
        case 'I':
            break;
        case 'X':
            x |= bit;
            break;
        case 'Z':
            z |= bit;
            break;
        case 'Y':
            // Y = i X Z
            x |= bit;
            z |= bit;
            phase += 1;
            break;
        default:
            throw ValidationError("unknown Pauli letter '" + std::string(1, text[q]) + "'");
        }
    }
    return PauliOperator(n, x, z, phase);
}

ComplexVector PauliOperator::apply(const ComplexVector &v) const
{
    const Index dim = Index{1} << num_qubits_;
    if (v.size() != dim)
        throw DimensionError("Pauli operator acts on dimension " + std::to_string(dim) + ", got " +
                             std::to_string(v.size()));
    static const Complex powers_of_i[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    ComplexVector out(dim);
    for (Index b = 0; b < dim; ++b)
    {
        const auto basis = static_cast<std::uint64_t>(b);
        const int sign = std::popcount(basis & z_bits_) & 1;
        out(static_cast<Index>(basis ^ x_bits_)) = powers_of_i[(phase_ + 2 * sign) % 4] * v(b);
    }
    return out;
}

bool pauli_commutes(const PauliOperator &p, const PauliOperator &q)
{
    if (p.num_qubits() != q.num_qubits())
        throw DimensionError("Pauli operators act on different qubit counts");
    const int form = std::popcount(p.x_bits() & q.z_bits()) + std::popcount(q.x_bits() & p.z_bits());
    return (form & 1) == 0;
}

} // namespace extentlab
