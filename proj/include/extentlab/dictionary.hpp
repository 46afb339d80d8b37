#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "extentlab/types.hpp"

namespace extentlab
{

/// Words must have unit norm within this tolerance.
inline constexpr double kNormTolerance = 1e-9;
/// Two canonical words are the same ray when every amplitude agrees within this.
inline constexpr double kRayTolerance = 1e-9;

/**
 * Rotates v by a global phase so that its first non-negligible amplitude is
 * real and positive. Idempotent, and equal for every e^{i phi} v.
 */
template <typename Derived>
ComplexVector canonical_phase(const Eigen::MatrixBase<Derived> &v)
{
    ComplexVector out = v;
    for (Index j = 0; j < out.size(); ++j)
    {
        const double mag = std::abs(out(j));
        if (mag > kRayTolerance)
        {
            if (out(j).imag() != 0.0 || out(j).real() < 0.0)
            {
                out *= std::conj(out(j)) / mag;
                out(j) = mag;
            }
            break;
        }
    }
    return out;
}

/// Hash lookup of canonical vectors, confirmed by an exact-tolerance comparison.
class RayIndex
{
public:
    void insert(Index id, std::uint64_t key) { buckets_[key].push_back(id); }

    /// Grid-quantized (1e-9) hash of a canonical vector.
    static std::uint64_t key_of(const ComplexVector &canonical);

    template <typename Matches>
    std::optional<Index> find(std::uint64_t key, Matches &&matches) const
    {
        auto it = buckets_.find(key);
        if (it == buckets_.end())
            return std::nullopt;
        for (Index id : it->second)
            if (matches(id))
                return id;
        return std::nullopt;
    }

private:
    std::unordered_map<std::uint64_t, std::vector<Index>> buckets_;
};

/**
 * Finite set of unit-norm words in C^d, stored one representative per ray
 * with canonical phase. Immutable after construction; operations that
 * change the word set return a new dictionary.
 */
class Dictionary
{
public:
    Dictionary() = default;

    Index dimension() const { return words_.rows(); }
    Index size() const { return words_.cols(); }

    /// d x m matrix whose columns are the words.
    const ComplexMatrix &matrix() const { return words_; }
    auto word(Index i) const { return words_.col(i); }
    const std::string &label(Index i) const { return labels_[static_cast<std::size_t>(i)]; }
    bool has_labels() const;

    /// Index of the word equal to v as a ray, if any. v need not be canonical.
    std::optional<Index> find(const ComplexVector &v) const;
    bool contains(const ComplexVector &v) const { return find(v).has_value(); }

    /// Numerical rank of the word matrix (singular values above rel_tol * sigma_max).
    Index rank(double rel_tol = 1e-10) const;
    /// sigma_max / sigma_min over the d singular values; infinity when rank deficient.
    double condition_number() const;
    /// Spanning is tested near machine precision so ill-conditioned bases still reach the solver,
    /// which reports them through a conditioning warning.
    bool spans() const { return size() > 0 && rank(1e-13) == dimension(); }

private:
    friend class DictionaryBuilder;

    ComplexMatrix words_;
    std::vector<std::string> labels_;
    RayIndex index_;
};

/// Accumulates words with ray-level deduplication.
class DictionaryBuilder
{
public:
    explicit DictionaryBuilder(Index dimension, Index expected_size = 0);

    /// Adds v (after norm check and phase canonicalization). Returns false when its ray is already present.
    bool add(const ComplexVector &v, std::string label = {});
    Index size() const { return static_cast<Index>(columns_.size()); }
    Dictionary build() &&;

private:
    bool add_canonical(ComplexVector canonical, std::string label);

    Index dimension_;
    std::vector<ComplexVector> columns_;
    std::vector<std::string> labels_;
    RayIndex index_;
};

/// Throws NormalizationError on non-unit vectors and ValidationError on an empty list.
Dictionary make_dictionary(const std::vector<ComplexVector> &vectors, const std::vector<std::string> &labels = {});

/// All products s1 (x) s2, d1 words varying slowest.
Dictionary tensor(const Dictionary &d1, const Dictionary &d2);

Dictionary conjugate(const Dictionary &d);
bool is_conjugation_closed(const Dictionary &d);

/// d0^{-n/2} sum_k e_k (x) e_k in C^{d0^{2n}}.
ComplexVector maximally_entangled(int local_dim, int factors);

/// d with w appended, unchanged if w's ray is already present.
Dictionary add_word(const Dictionary &d, const ComplexVector &w, std::string label = {});

// JSON persistence: {"version":1, "dim":d, "words":[{"label":str?, "amps":[[re,im],...]},...]}
inline constexpr int kDictionaryFormatVersion = 1;

std::string dictionary_to_json(const Dictionary &d);
Dictionary dictionary_from_json(const std::string &text);
void save_dictionary(const Dictionary &d, const std::filesystem::path &path);
Dictionary load_dictionary(const std::filesystem::path &path);

/// State file: {"amps":[[re,im],...]}.
ComplexVector state_from_json(const std::string &text);
std::string state_to_json(const ComplexVector &psi);
ComplexVector load_state(const std::filesystem::path &path);

} // namespace extentlab
