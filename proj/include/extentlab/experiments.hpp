#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "extentlab/dictionary.hpp"
#include "extentlab/extent.hpp"
#include "extentlab/random.hpp"
#include "extentlab/types.hpp"

namespace extentlab
{

inline constexpr int kSchemaVersion = 1;

/// Keys holding wall-clock data; everything else in a result is a pure function of the inputs.
inline const std::vector<std::string> kVolatileKeys = {"timestamp", "wall_time_s"};

/// Experiment ids used to derive per-trial random streams.
enum class ExperimentId : std::uint64_t
{
    concentration = 1,
    overlap_tail = 2,
    product = 3,
    add_phi = 4,
    optimality = 5,
};

/// One JSON object per trial (ordered by trial index) plus a summary object.
struct ExperimentResult
{
    std::vector<nlohmann::json> records;
    nlohmann::json summary;

    /// Records as JSON-lines, one compact object per line.
    std::string json_lines() const;
    /// Records as CSV over the scalar fields of the first record.
    std::string csv() const;
};

/// Copy of j with every volatile key removed, recursively.
nlohmann::json strip_volatile(const nlohmann::json &j);

nlohmann::json complex_to_json(Complex z);
nlohmann::json vector_to_json(const ComplexVector &v);

// ---------------------------------------------------------------- concentration

struct ConcentrationStats
{
    int num_qubits = 0;
    double epsilon = 0;
    int trials = 0;
    double threshold = 0;   // 1 / (sqrt(d) + epsilon)
    double frequency = 0;   // fraction of trials with F <= threshold
    double sigma = 0;       // binomial Monte-Carlo standard error
    double union_bound = 0; // max(0, 1 - |STAB_n| exp(-(d - 1) threshold)), a lower bound on the probability
    double mean_fidelity = 0;
};

/**
 * Samples Haar states in C^{2^n} and records the stabilizer fidelity, which is
 * streamed from the enumerator. Throws CapacityError outside 1 <= n <= 5.
 */
ConcentrationStats concentration_experiment(int num_qubits, double epsilon, int trials, std::uint64_t seed,
                                            ExperimentResult *result = nullptr);

struct TailPoint
{
    double x = 0;
    double empirical = 0; // fraction with |<e_0, psi>|^2 >= x
    double expected = 0;  // (1 - x)^{d - 1}
    double sigma = 0;
};

/// Monte-Carlo tail of |<e_0, psi>|^2 for Haar psi in C^d.
std::vector<TailPoint> overlap_tail_experiment(Index dimension, const std::vector<double> &xs, int trials,
                                               std::uint64_t seed, ExperimentResult *result = nullptr);

// ---------------------------------------------------------------- product

struct ProductStats
{
    int trials = 0;
    double max_deviation = 0; // max |xi_12 - xi_1 xi_2|
    double mean_deviation = 0;
};

/// Compares xi over d1 (x) d2 of psi1 (x) psi2 with the product of the factor extents.
ProductStats product_multiplicativity_experiment(const Dictionary &d1, const Dictionary &d2, int trials,
                                                 std::uint64_t seed, ExperimentResult *result = nullptr);

// ---------------------------------------------------------------- add-phi

enum class AddedWord
{
    maximally_entangled, // Phi
    witness,             // normalized product witness
};

enum class FactorDictionary
{
    stabilizer,        // STAB_n
    computational,     // {e_k}, the synthetic instance
};

struct AddPhiOptions
{
    int num_qubits = 1;
    int trials = 20;
    std::uint64_t seed = 0;
    FactorDictionary factor = FactorDictionary::stabilizer;
    AddedWord added = AddedWord::maximally_entangled;
    bool allow_large = false; // n = 3 builds a 1.17M-word product dictionary
};

struct AddPhiStats
{
    int trials = 0;
    int triggered = 0;          // predicate fired
    int strict_decreases = 0;   // re-solve dropped xi by more than the summed gaps
    int false_positives = 0;    // fired without a strict decrease
    int missed = 0;             // strict decrease without the predicate firing
    int chain_violations = 0;   // ||y||^2 >= xi >= 1/F failed
    int monotonicity_violations = 0;
    double max_ratio = 0;       // max ||y||^2 / sqrt(d)
};

/**
 * For each Haar psi: solve on the factor dictionary D, form y (x) y*, record
 * ||y||^2 / sqrt(d), solve psi (x) psi* on D (x) D and on D (x) D + {w}, and
 * compare the word-addition predicate with the re-solve outcome.
 */
AddPhiStats add_phi_experiment(const AddPhiOptions &options, ExperimentResult *result = nullptr);

// ---------------------------------------------------------------- optimality

struct OptimalityStats
{
    int trials = 0;
    int max_per_basis = 0;  // over all trials
    int violations = 0;     // trials with more than one support word in some basis
    int max_support = 0;
};

/// Solves Haar states over STAB_n and counts support words per orthonormal stabilizer basis.
OptimalityStats optimality_condition_check(int num_qubits, int trials, std::uint64_t seed,
                                           ExperimentResult *result = nullptr);

struct ImprovedDecomposition
{
    std::vector<Complex> coefficients; // on the three words below
    std::vector<ComplexVector> words;  // (1, sgn x)/sqrt2, (1, i sgn y)/sqrt2, (1, 0)
    double old_l1 = 0;                 // |a| + |z|
    double new_l1 = 0;                 // |a| (1 + (sqrt2 - 1)(|x| + |y|)), x + iy = z / a

    ComplexVector reconstruct() const;
};

/**
 * Replaces a e_0 + z e_1 by a three-term decomposition over a second and a
 * third single-qubit stabilizer basis. Requires a != 0 and |x| + |y| <= 1
 * for x + iy = z / a; throws ValidationError otherwise.
 */
ImprovedDecomposition improve_single_basis_pair(Complex a, Complex z);

} // namespace extentlab
