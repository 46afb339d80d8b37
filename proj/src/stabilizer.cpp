#include "extentlab/stabilizer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "extentlab/pauli.hpp"

namespace extentlab
{

namespace
{

const Complex kPowersOfI[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

void check_qubits(int num_qubits, bool allow_large)
{
    const int limit = allow_large ? kMaxQubits : kMaxDefaultQubits;
    if (num_qubits < 1 || num_qubits > limit)
        throw CapacityError("stabilizer enumeration supports 1.." + std::to_string(limit) + " qubits, got " +
                            std::to_string(num_qubits) +
                            (num_qubits == kMaxQubits ? " (n = 5 needs the large-enumeration flag)" : ""));
}

/// Rank of a set of F_2 vectors.
int gf2_rank(std::vector<std::uint64_t> rows)
{
    int rank = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        if (rows[i] == 0)
            continue;
        ++rank;
        const std::uint64_t pivot = std::uint64_t{1} << (63 - std::countl_zero(rows[i]));
        for (std::size_t j = i + 1; j < rows.size(); ++j)
            if (rows[j] & pivot)
                rows[j] ^= rows[i];
    }
    return rank;
}

int parity(std::uint64_t x) { return std::popcount(x) & 1; }

/// Sign exponent sum_{i<=j} Q_ij u_i u_j mod 2.
int quadratic_parity(const std::vector<std::uint64_t> &quadratic, std::uint64_t u)
{
    int acc = 0;
    for (std::size_t i = 0; i < quadratic.size(); ++i)
        if ((u >> i) & 1)
            acc ^= parity(quadratic[i] & u);
    return acc;
}

/**
 * Calls visit(basis) for every k-dimensional subspace of F_2^n, each given by
 * its reduced row echelon basis. Pivot columns are taken from the most
 * significant bit downward.
 */
template <typename Visit>
void for_each_rref_subspace(int n, int k, Visit &&visit)
{
    std::vector<int> pivots(static_cast<std::size_t>(k));
    // choose pivot bit positions p_0 > p_1 > ... (most significant first)
    std::function<void(int, int)> choose = [&](int slot, int below) {
        if (slot == k)
        {
            std::uint64_t pivot_mask = 0;
            for (int p : pivots)
                pivot_mask |= std::uint64_t{1} << p;
            // free positions for row r: non-pivot bits lower than its pivot
            std::vector<std::vector<int>> free_bits(static_cast<std::size_t>(k));
            int total_free = 0;
            for (int r = 0; r < k; ++r)
            {
                for (int b = pivots[static_cast<std::size_t>(r)] - 1; b >= 0; --b)
                    if (!((pivot_mask >> b) & 1))
                        free_bits[static_cast<std::size_t>(r)].push_back(b);
                total_free += static_cast<int>(free_bits[static_cast<std::size_t>(r)].size());
            }
            std::vector<std::uint64_t> basis(static_cast<std::size_t>(k));
            for (std::uint64_t fill = 0; fill < (std::uint64_t{1} << total_free); ++fill)
            {
                int consumed = 0;
                for (int r = 0; r < k; ++r)
                {
                    std::uint64_t row = std::uint64_t{1} << pivots[static_cast<std::size_t>(r)];
                    for (int b : free_bits[static_cast<std::size_t>(r)])
                        if ((fill >> consumed++) & 1)
                            row |= std::uint64_t{1} << b;
                    basis[static_cast<std::size_t>(r)] = row;
                }
                visit(basis, pivot_mask);
            }
            return;
        }
        for (int p = below - 1; p >= k - slot - 1; --p)
        {
            pivots[static_cast<std::size_t>(slot)] = p;
            choose(slot + 1, p);
        }
    };
    choose(0, n);
}

/// Enumerates every offset whose bits at pivot positions are zero.
template <typename Visit>
void for_each_coset(int n, std::uint64_t pivot_mask, Visit &&visit)
{
    const std::uint64_t free_mask = ((std::uint64_t{1} << n) - 1) & ~pivot_mask;
    // subsets of free_mask in increasing numeric order
    std::uint64_t offset = 0;
    while (true)
    {
        visit(offset);
        if (offset == free_mask)
            break;
        offset = (offset - free_mask) & free_mask;
    }
}

/// Calls visit(linear, quadratic) for l in Z_4^k and strictly upper triangular Q.
template <typename Visit>
void for_each_phase_pattern(int k, Visit &&visit)
{
    std::vector<int> linear(static_cast<std::size_t>(k), 0);
    std::vector<std::uint64_t> quadratic(static_cast<std::size_t>(k), 0);
    const int upper_bits = k * (k - 1) / 2;
    const std::uint64_t linear_count = std::uint64_t{1} << (2 * k);
    for (std::uint64_t l = 0; l < linear_count; ++l)
    {
        for (int j = 0; j < k; ++j)
            linear[static_cast<std::size_t>(j)] = static_cast<int>((l >> (2 * j)) & 3);
        for (std::uint64_t q = 0; q < (std::uint64_t{1} << upper_bits); ++q)
        {
            int bit = 0;
            for (int i = 0; i < k; ++i)
            {
                std::uint64_t row = 0;
                for (int j = i + 1; j < k; ++j)
                    if ((q >> bit++) & 1)
                        row |= std::uint64_t{1} << j;
                quadratic[static_cast<std::size_t>(i)] = row;
            }
            visit(linear, quadratic);
        }
    }
}

std::vector<std::uint64_t> strict_upper_patterns(int k)
{
    const int upper_bits = k * (k - 1) / 2;
    std::vector<std::uint64_t> patterns;
    patterns.reserve(std::size_t{1} << upper_bits);
    for (std::uint64_t q = 0; q < (std::uint64_t{1} << upper_bits); ++q)
        patterns.push_back(q);
    return patterns;
}

} // namespace

void validate(const AffineForm &form, int num_qubits)
{
    if (num_qubits < 1 || num_qubits > 30)
        throw ValidationError("affine form needs between 1 and 30 qubits");
    const int k = form.dimension();
    if (k > num_qubits)
        throw ValidationError("affine subspace dimension exceeds qubit count");
    const std::uint64_t mask = (std::uint64_t{1} << num_qubits) - 1;
    if (form.offset & ~mask)
        throw ValidationError("offset has bits beyond the qubit count");
    for (std::uint64_t b : form.basis)
        if (b & ~mask)
            throw ValidationError("basis vector has bits beyond the qubit count");
    if (gf2_rank(form.basis) != k)
        throw ValidationError("affine basis vectors are not linearly independent over F_2");
    if (static_cast<int>(form.linear.size()) != k)
        throw ValidationError("linear phase needs one Z_4 coefficient per basis vector");
    for (int c : form.linear)
        if (c < 0 || c > 3)
            throw ValidationError("linear phase coefficients must lie in {0,1,2,3}");
    if (static_cast<int>(form.quadratic.size()) != k)
        throw ValidationError("quadratic form must be k x k");
    for (int i = 0; i < k; ++i)
    {
        const std::uint64_t lower = (std::uint64_t{1} << i) - 1;
        const std::uint64_t row = form.quadratic[static_cast<std::size_t>(i)];
        if ((row & lower) || (row >> k))
            throw ValidationError("quadratic form must be upper triangular");
    }
}

ComplexVector stabilizer_amplitudes(const AffineForm &form, int num_qubits)
{
    validate(form, num_qubits);
    const int k = form.dimension();
    ComplexVector amps = ComplexVector::Zero(Index{1} << num_qubits);
    const double scale = std::pow(2.0, -0.5 * k);
    for (std::uint64_t u = 0; u < (std::uint64_t{1} << k); ++u)
    {
        std::uint64_t x = form.offset;
        int power = 0;
        for (int j = 0; j < k; ++j)
            if ((u >> j) & 1)
            {
                x ^= form.basis[static_cast<std::size_t>(j)];
                power += form.linear[static_cast<std::size_t>(j)];
            }
        power += 2 * quadratic_parity(form.quadratic, u);
        amps(static_cast<Index>(x)) = scale * kPowersOfI[power & 3];
    }
    return amps;
}

std::uint64_t stabilizer_count(int num_qubits)
{
    std::uint64_t count = std::uint64_t{1} << num_qubits;
    for (int k = 1; k <= num_qubits; ++k)
        count *= (std::uint64_t{1} << k) + 1;
    return count;
}

void for_each_stabilizer_form(int num_qubits, const std::function<void(const AffineForm &)> &visit)
{
    check_qubits(num_qubits, true);
    AffineForm form;
    for (int k = 0; k <= num_qubits; ++k)
    {
        for_each_rref_subspace(num_qubits, k, [&](const std::vector<std::uint64_t> &basis, std::uint64_t pivots) {
            form.basis = basis;
            for_each_coset(num_qubits, pivots, [&](std::uint64_t offset) {
                form.offset = offset;
                for_each_phase_pattern(k, [&](const std::vector<int> &linear, const std::vector<std::uint64_t> &quad) {
                    form.linear = linear;
                    form.quadratic = quad;
                    visit(form);
                });
            });
        });
    }
}

Dictionary enumerate_stabilizer_states(int num_qubits, bool allow_large)
{
    check_qubits(num_qubits, allow_large);
    const Index dim = Index{1} << num_qubits;
    DictionaryBuilder builder(dim, static_cast<Index>(stabilizer_count(num_qubits)));
    for_each_stabilizer_form(num_qubits,
                             [&](const AffineForm &form) { builder.add(stabilizer_amplitudes(form, num_qubits)); });
    return std::move(builder).build();
}

double stabilizer_fidelity(int num_qubits, const ComplexVector &psi)
{
    check_qubits(num_qubits, true);
    const Index dim = Index{1} << num_qubits;
    if (psi.size() != dim)
        throw DimensionError("state has length " + std::to_string(psi.size()) + ", expected " + std::to_string(dim));

    double best = 0.0;
    std::vector<Complex> gathered;
    std::vector<Complex> work_a;
    std::vector<Complex> work_b;
    for (int k = 0; k <= num_qubits; ++k)
    {
        const std::size_t support = std::size_t{1} << k;
        const std::vector<std::uint64_t> patterns = strict_upper_patterns(k);
        gathered.resize(support);
        work_a.resize(std::size_t{1} << (2 * k));
        work_b.resize(std::size_t{1} << (2 * k));
        const double weight = std::pow(2.0, -static_cast<double>(k));

        for_each_rref_subspace(num_qubits, k, [&](const std::vector<std::uint64_t> &basis, std::uint64_t pivots) {
            for_each_coset(num_qubits, pivots, [&](std::uint64_t offset) {
                for (std::size_t u = 0; u < support; ++u)
                {
                    std::uint64_t x = offset;
                    for (int j = 0; j < k; ++j)
                        if ((u >> j) & 1)
                            x ^= basis[static_cast<std::size_t>(j)];
                    gathered[u] = psi(static_cast<Index>(x));
                }
                for (std::uint64_t q : patterns)
                {
                    // unpack strictly-upper bits into rows
                    std::vector<std::uint64_t> quad(static_cast<std::size_t>(k), 0);
                    int bit = 0;
                    for (int i = 0; i < k; ++i)
                        for (int j = i + 1; j < k; ++j)
                            if ((q >> bit++) & 1)
                                quad[static_cast<std::size_t>(i)] |= std::uint64_t{1} << j;

                    // Layout: index = (u bits of coordinates >= j) * 4^j + (l digits of coordinates < j).
                    std::size_t len = support;
                    for (std::size_t u = 0; u < support; ++u)
                        work_a[u] = quadratic_parity(quad, u) ? -gathered[u] : gathered[u];
                    std::size_t low = 1; // 4^j
                    for (int j = 0; j < k; ++j)
                    {
                        const std::size_t high = len / (2 * low);
                        for (std::size_t h = 0; h < high; ++h)
                            for (std::size_t r = 0; r < low; ++r)
                            {
                                const Complex a0 = work_a[(2 * h) * low + r];
                                const Complex a1 = work_a[(2 * h + 1) * low + r];
                                for (int l = 0; l < 4; ++l)
                                    work_b[(h * 4 + static_cast<std::size_t>(l)) * low + r] = a0 + kPowersOfI[l] * a1;
                            }
                        len = high * 4 * low;
                        low *= 4;
                        std::swap(work_a, work_b);
                    }
                    for (std::size_t l = 0; l < len; ++l)
                        best = std::max(best, weight * std::norm(work_a[l]));
                }
            });
        });
    }
    return best;
}

std::vector<Index> StabilizerBasisPartition::group_of(Index dictionary_size) const
{
    std::vector<Index> owner(static_cast<std::size_t>(dictionary_size), -1);
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (Index i : groups[g])
            owner[static_cast<std::size_t>(i)] = static_cast<Index>(g);
    return owner;
}

StabilizerBasisPartition group_into_bases(const Dictionary &d)
{
    const Index dim = d.dimension();
    if (dim < 2 || (dim & (dim - 1)) != 0)
        throw StructureError("dictionary dimension is not a power of two");
    const int n = std::countr_zero(static_cast<std::uint64_t>(dim));
    if (d.size() % dim != 0)
        throw StructureError("dictionary size is not a multiple of the dimension");

    StabilizerBasisPartition partition;
    std::vector<bool> assigned(static_cast<std::size_t>(d.size()), false);
    const std::uint64_t span = std::uint64_t{1} << n;
    for (Index seed = 0; seed < d.size(); ++seed)
    {
        if (assigned[static_cast<std::size_t>(seed)])
            continue;
        const ComplexVector s = d.word(seed);
        std::vector<Index> group;
        for (std::uint64_t a = 0; a < span; ++a)
            for (std::uint64_t b = 0; b < span; ++b)
            {
                const auto hit = d.find(PauliOperator(n, a, b).apply(s));
                if (!hit)
                    throw StructureError("Pauli image of word " + std::to_string(seed) + " is not in the dictionary");
                if (std::find(group.begin(), group.end(), *hit) == group.end())
                    group.push_back(*hit);
            }
        if (static_cast<Index>(group.size()) != dim)
            throw StructureError("Pauli orbit of word " + std::to_string(seed) + " has " +
                                 std::to_string(group.size()) + " rays, expected " + std::to_string(dim));
        std::sort(group.begin(), group.end());
        ComplexMatrix members(dim, dim);
        for (Index j = 0; j < dim; ++j)
        {
            const Index idx = group[static_cast<std::size_t>(j)];
            if (assigned[static_cast<std::size_t>(idx)])
                throw StructureError("orbits overlap; dictionary is not a union of stabilizer bases");
            assigned[static_cast<std::size_t>(idx)] = true;
            members.col(j) = d.word(idx);
        }
        const double gram_error = (members.adjoint() * members - ComplexMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
        if (gram_error > 1e-10)
            throw StructureError("Pauli orbit of word " + std::to_string(seed) + " is not orthonormal");
        partition.groups.push_back(std::move(group));
    }
    return partition;
}

} // namespace extentlab
