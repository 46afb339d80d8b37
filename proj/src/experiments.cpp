#include "extentlab/experiments.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "extentlab/parallel.hpp"
#include "extentlab/stabilizer.hpp"
#include "extentlab/witness.hpp"

namespace extentlab
{

namespace
{

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream out;
    out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return out.str();
}

json record_header(const char *experiment, std::uint64_t seed, int trial)
{
    return json{{"schema_version", kSchemaVersion}, {"experiment", experiment}, {"seed", seed}, {"trial", trial}};
}

json summary_header(const char *experiment, std::uint64_t seed, int trials)
{
    return json{{"schema_version", kSchemaVersion},
                {"experiment", experiment},
                {"seed", seed},
                {"trials", trials},
                {"timestamp", utc_timestamp()}};
}

void require_trials(int trials)
{
    if (trials < 1)
        throw ValidationError("trials must be at least 1");
}

/// Relative gaps bound the error of sqrt(xi); translate them to an absolute bound on xi.
double xi_uncertainty(const ExtentSolution &s)
{
    return 2.0 * s.gap * s.xi + 1e-9;
}

Dictionary computational_basis(Index dim)
{
    std::vector<ComplexVector> words;
    std::vector<std::string> labels;
    for (Index k = 0; k < dim; ++k)
    {
        words.push_back(ComplexVector::Unit(dim, k));
        labels.push_back("e" + std::to_string(k));
    }
    return make_dictionary(words, labels);
}

std::string csv_cell(const json &v)
{
    if (v.is_string())
        return v.get<std::string>();
    return v.dump();
}

} // namespace

std::string ExperimentResult::json_lines() const
{
    std::string out;
    for (const auto &r : records)
    {
        out += r.dump();
        out += '\n';
    }
    return out;
}

std::string ExperimentResult::csv() const
{
    if (records.empty())
        return {};
    std::vector<std::string> columns;
    for (const auto &[key, value] : records.front().items())
        if (value.is_primitive())
            columns.push_back(key);
    std::ostringstream out;
    for (std::size_t c = 0; c < columns.size(); ++c)
        out << (c ? "," : "") << columns[c];
    out << '\n';
    for (const auto &r : records)
    {
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << (c ? "," : "") << (r.contains(columns[c]) ? csv_cell(r.at(columns[c])) : "");
        out << '\n';
    }
    return out.str();
}

json strip_volatile(const json &j)
{
    if (j.is_object())
    {
        json out = json::object();
        for (const auto &[key, value] : j.items())
            if (std::find(kVolatileKeys.begin(), kVolatileKeys.end(), key) == kVolatileKeys.end())
                out[key] = strip_volatile(value);
        return out;
    }
    if (j.is_array())
    {
        json out = json::array();
        for (const auto &v : j)
            out.push_back(strip_volatile(v));
        return out;
    }
    return j;
}

json complex_to_json(Complex z)
{
    return json::array({z.real(), z.imag()});
}

json vector_to_json(const ComplexVector &v)
{
    json out = json::array();
    for (Index j = 0; j < v.size(); ++j)
        out.push_back(complex_to_json(v(j)));
    return out;
}

ConcentrationStats concentration_experiment(int num_qubits, double epsilon, int trials, std::uint64_t seed,
                                            ExperimentResult *result)
{
    if (num_qubits < 1 || num_qubits > kMaxQubits)
        throw CapacityError("concentration experiment supports 1 to " + std::to_string(kMaxQubits) + " qubits");
    if (!(epsilon > 0))
        throw ValidationError("epsilon must be positive");
    require_trials(trials);

    const Index dim = Index{1} << num_qubits;
    const double root_d = std::sqrt(static_cast<double>(dim));
    ConcentrationStats stats;
    stats.num_qubits = num_qubits;
    stats.epsilon = epsilon;
    stats.trials = trials;
    stats.threshold = 1.0 / (root_d + epsilon);
    const double count = static_cast<double>(stabilizer_count(num_qubits));
    stats.union_bound = std::max(0.0, 1.0 - count * std::exp(-static_cast<double>(dim - 1) * stats.threshold));

    std::vector<double> fidelities(static_cast<std::size_t>(trials));
    std::vector<json> records(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        const auto start = Clock::now();
        RandomStream stream = trial_stream(seed, static_cast<std::uint64_t>(ExperimentId::concentration), t);
        const ComplexVector psi = haar_sample(dim, stream);
        const double f = stabilizer_fidelity(num_qubits, psi);
        fidelities[t] = f;
        json r = record_header("concentration", seed, static_cast<int>(t));
        r["n"] = num_qubits;
        r["epsilon"] = epsilon;
        r["fidelity"] = f;
        r["event"] = f <= stats.threshold;
        r["wall_time_s"] = seconds_since(start);
        records[t] = std::move(r);
    });

    int hits = 0;
    double sum = 0;
    for (double f : fidelities)
    {
        hits += f <= stats.threshold ? 1 : 0;
        sum += f;
    }
    stats.frequency = hits / static_cast<double>(trials);
    stats.sigma = std::sqrt(stats.frequency * (1 - stats.frequency) / trials);
    stats.mean_fidelity = sum / trials;

    if (result)
    {
        result->records = std::move(records);
        result->summary = summary_header("concentration", seed, trials);
        result->summary["n"] = num_qubits;
        result->summary["epsilon"] = epsilon;
        result->summary["threshold"] = stats.threshold;
        result->summary["frequency"] = stats.frequency;
        result->summary["sigma"] = stats.sigma;
        result->summary["union_bound"] = stats.union_bound;
        result->summary["mean_fidelity"] = stats.mean_fidelity;
    }
    return stats;
}

std::vector<TailPoint> overlap_tail_experiment(Index dimension, const std::vector<double> &xs, int trials,
                                               std::uint64_t seed, ExperimentResult *result)
{
    require_trials(trials);
    std::vector<double> overlaps(static_cast<std::size_t>(trials));
    std::vector<json> records(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        const auto start = Clock::now();
        RandomStream stream = trial_stream(seed, static_cast<std::uint64_t>(ExperimentId::overlap_tail), t);
        const ComplexVector psi = haar_sample(dimension, stream);
        overlaps[t] = std::norm(psi(0));
        json r = record_header("overlap_tail", seed, static_cast<int>(t));
        r["dim"] = dimension;
        r["overlap"] = overlaps[t];
        r["wall_time_s"] = seconds_since(start);
        records[t] = std::move(r);
    });

    std::vector<TailPoint> points;
    for (double x : xs)
    {
        TailPoint p;
        p.x = x;
        int hits = 0;
        for (double o : overlaps)
            hits += o >= x ? 1 : 0;
        p.empirical = hits / static_cast<double>(trials);
        p.expected = std::pow(1.0 - x, static_cast<double>(dimension - 1));
        p.sigma = std::sqrt(p.expected * (1 - p.expected) / trials);
        points.push_back(p);
    }

    if (result)
    {
        result->records = std::move(records);
        result->summary = summary_header("overlap_tail", seed, trials);
        result->summary["dim"] = dimension;
        json tail = json::array();
        for (const auto &p : points)
            tail.push_back({{"x", p.x}, {"empirical", p.empirical}, {"expected", p.expected}, {"sigma", p.sigma}});
        result->summary["tail"] = tail;
    }
    return points;
}

ProductStats product_multiplicativity_experiment(const Dictionary &d1, const Dictionary &d2, int trials,
                                                 std::uint64_t seed, ExperimentResult *result)
{
    require_trials(trials);
    const Dictionary d12 = tensor(d1, d2);
    std::vector<double> deviations(static_cast<std::size_t>(trials));
    std::vector<json> records(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        const auto start = Clock::now();
        RandomStream stream = trial_stream(seed, static_cast<std::uint64_t>(ExperimentId::product), t);
        const ComplexVector psi1 = haar_sample(d1.dimension(), stream);
        const ComplexVector psi2 = haar_sample(d2.dimension(), stream);
        const ExtentSolution s1 = extent(d1, psi1);
        const ExtentSolution s2 = extent(d2, psi2);
        const ExtentSolution s12 = extent(d12, kron(psi1, psi2));
        deviations[t] = std::abs(s12.xi - s1.xi * s2.xi);
        json r = record_header("product", seed, static_cast<int>(t));
        r["xi_1"] = s1.xi;
        r["xi_2"] = s2.xi;
        r["xi_product"] = s12.xi;
        r["deviation"] = deviations[t];
        r["gap_product"] = s12.gap;
        r["wall_time_s"] = seconds_since(start);
        records[t] = std::move(r);
    });

    ProductStats stats;
    stats.trials = trials;
    for (double dev : deviations)
    {
        stats.max_deviation = std::max(stats.max_deviation, dev);
        stats.mean_deviation += dev / trials;
    }
    if (result)
    {
        result->records = std::move(records);
        result->summary = summary_header("product", seed, trials);
        result->summary["max_deviation"] = stats.max_deviation;
        result->summary["mean_deviation"] = stats.mean_deviation;
        result->summary["dictionary_sizes"] = {d1.size(), d2.size(), d12.size()};
    }
    return stats;
}

AddPhiStats add_phi_experiment(const AddPhiOptions &options, ExperimentResult *result)
{
    require_trials(options.trials);
    const int n = options.num_qubits;
    const int max_n = options.factor == FactorDictionary::stabilizer ? (options.allow_large ? 3 : 2) : 6;
    if (n < 1 || n > max_n)
        throw CapacityError("add-phi experiment supports 1 to " + std::to_string(max_n) + " qubits per factor" +
                            (options.allow_large ? "" : " without the large flag"));

    const Index dim = Index{1} << n;
    const Dictionary factor = options.factor == FactorDictionary::stabilizer ? enumerate_stabilizer_states(n)
                                                                             : computational_basis(dim);
    const Dictionary product = tensor(factor, factor);
    const ComplexVector phi = maximally_entangled(2, n);
    const double root_d = std::sqrt(static_cast<double>(dim));

    struct Outcome
    {
        bool fired = false;
        bool strict = false;
        bool chain_ok = true;
        bool monotone = true;
        double ratio = 0;
    };
    std::vector<Outcome> outcomes(static_cast<std::size_t>(options.trials));
    std::vector<json> records(static_cast<std::size_t>(options.trials));

    parallel_for(static_cast<std::size_t>(options.trials), [&](std::size_t t) {
        const auto start = Clock::now();
        RandomStream stream = trial_stream(options.seed, static_cast<std::uint64_t>(ExperimentId::add_phi), t);
        const ComplexVector psi = haar_sample(dim, stream);
        const ExtentSolution sol = extent(factor, psi);
        const double f = fidelity(factor, psi).value;
        const ComplexVector &y = sol.witness;
        const double y_norm2 = y.squaredNorm();
        const ComplexVector yy = kron(y, ComplexVector(y.conjugate()));
        const double phi_overlap = std::abs(inner(phi, yy));

        Outcome &o = outcomes[t];
        o.ratio = y_norm2 / root_d;
        const double tol = xi_uncertainty(sol);
        o.chain_ok = y_norm2 >= sol.xi - tol && sol.xi >= 1.0 / f - tol;

        const ComplexVector target = kron(psi, ComplexVector(psi.conjugate()));
        const ExtentSolution before = extent(product, target);
        ComplexVector w = phi;
        if (options.added == AddedWord::witness)
            w = before.witness / before.witness.norm();
        o.fired = word_addition_strictly_decreases(product, before, w);
        const ExtentSolution after = extent(add_word(product, w, "added"), target);
        const double drop = before.xi - after.xi;
        const double slack = xi_uncertainty(before) + xi_uncertainty(after);
        o.strict = drop > slack;
        o.monotone = drop >= -slack;

        json r = record_header("add_phi", options.seed, static_cast<int>(t));
        r["n"] = n;
        r["fidelity"] = f;
        r["xi"] = sol.xi;
        r["witness_norm2"] = y_norm2;
        r["witness_ratio"] = o.ratio;
        r["phi_overlap"] = phi_overlap;
        r["added_overlap"] = std::abs(inner(w, before.witness));
        r["xi_product"] = before.xi;
        r["xi_added"] = after.xi;
        r["drop"] = drop;
        r["uniqueness"] = to_string(witness_is_unique(product, before));
        r["triggered"] = o.fired;
        r["strict_decrease"] = o.strict;
        r["chain_ok"] = o.chain_ok;
        r["wall_time_s"] = seconds_since(start);
        records[t] = std::move(r);
    });

    AddPhiStats stats;
    stats.trials = options.trials;
    for (const Outcome &o : outcomes)
    {
        stats.triggered += o.fired;
        stats.strict_decreases += o.strict;
        stats.false_positives += o.fired && !o.strict;
        stats.missed += !o.fired && o.strict;
        stats.chain_violations += !o.chain_ok;
        stats.monotonicity_violations += !o.monotone;
        stats.max_ratio = std::max(stats.max_ratio, o.ratio);
    }
    if (result)
    {
        result->records = std::move(records);
        auto &s = result->summary;
        s = summary_header("add_phi", options.seed, options.trials);
        s["n"] = n;
        s["factor"] = options.factor == FactorDictionary::stabilizer ? "stabilizer" : "computational";
        s["added"] = options.added == AddedWord::maximally_entangled ? "phi" : "witness";
        s["triggered"] = stats.triggered;
        s["strict_decreases"] = stats.strict_decreases;
        s["false_positives"] = stats.false_positives;
        s["missed"] = stats.missed;
        s["chain_violations"] = stats.chain_violations;
        s["monotonicity_violations"] = stats.monotonicity_violations;
        s["max_witness_ratio"] = stats.max_ratio;
    }
    return stats;
}

OptimalityStats optimality_condition_check(int num_qubits, int trials, std::uint64_t seed,
                                           ExperimentResult *result)
{
    require_trials(trials);
    if (num_qubits < 1 || num_qubits > 3)
        throw CapacityError("optimality check supports 1 to 3 qubits");
    const Dictionary d = enumerate_stabilizer_states(num_qubits);
    const StabilizerBasisPartition partition = group_into_bases(d);
    const std::vector<Index> group_of = partition.group_of(d.size());
    const Index dim = d.dimension();

    std::vector<int> per_basis(static_cast<std::size_t>(trials));
    std::vector<int> support_sizes(static_cast<std::size_t>(trials));
    std::vector<json> records(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        const auto start = Clock::now();
        RandomStream stream = trial_stream(seed, static_cast<std::uint64_t>(ExperimentId::optimality), t);
        const ComplexVector psi = haar_sample(dim, stream);
        const ExtentSolution sol = extent(d, psi);
        std::vector<int> counts(partition.groups.size(), 0);
        for (Index s : sol.support)
            ++counts[static_cast<std::size_t>(group_of[static_cast<std::size_t>(s)])];
        const int worst = counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());
        per_basis[t] = worst;
        support_sizes[t] = static_cast<int>(sol.support.size());
        json r = record_header("optimality", seed, static_cast<int>(t));
        r["n"] = num_qubits;
        r["xi"] = sol.xi;
        r["gap"] = sol.gap;
        r["support_size"] = support_sizes[t];
        r["max_per_basis"] = worst;
        r["wall_time_s"] = seconds_since(start);
        records[t] = std::move(r);
    });

    OptimalityStats stats;
    stats.trials = trials;
    for (std::size_t t = 0; t < per_basis.size(); ++t)
    {
        stats.max_per_basis = std::max(stats.max_per_basis, per_basis[t]);
        stats.violations += per_basis[t] > 1;
        stats.max_support = std::max(stats.max_support, support_sizes[t]);
    }
    if (result)
    {
        result->records = std::move(records);
        result->summary = summary_header("optimality", seed, trials);
        result->summary["n"] = num_qubits;
        result->summary["max_per_basis"] = stats.max_per_basis;
        result->summary["violations"] = stats.violations;
        result->summary["max_support"] = stats.max_support;
    }
    return stats;
}

ComplexVector ImprovedDecomposition::reconstruct() const
{
    ComplexVector out = ComplexVector::Zero(2);
    for (std::size_t k = 0; k < words.size(); ++k)
        out += coefficients[k] * words[k];
    return out;
}

ImprovedDecomposition improve_single_basis_pair(Complex a, Complex z)
{
    if (a == Complex(0.0))
        throw ValidationError("the e_0 coefficient must be non-zero");
    const Complex r = z / a;
    const double x = r.real();
    const double y = r.imag();
    const double mass = std::abs(x) + std::abs(y);
    if (mass > 1.0 + 1e-12)
        throw ValidationError("improvement step needs |x| + |y| <= 1 after scaling");

    const double sx = x < 0 ? -1.0 : 1.0;
    const double sy = y < 0 ? -1.0 : 1.0;
    const double h = 1.0 / std::numbers::sqrt2;
    ImprovedDecomposition out;
    out.words = {ComplexVector(2), ComplexVector(2), ComplexVector(2)};
    out.words[0] << h, sx * h;
    out.words[1] << h, Complex(0.0, sy * h);
    out.words[2] << 1.0, 0.0;
    out.coefficients = {a * (std::numbers::sqrt2 * std::abs(x)), a * (std::numbers::sqrt2 * std::abs(y)),
                        a * std::max(0.0, 1.0 - mass)};
    out.old_l1 = std::abs(a) + std::abs(z);
    out.new_l1 = std::abs(a) * (1.0 + (std::numbers::sqrt2 - 1.0) * std::min(mass, 1.0));
    return out;
}

} // namespace extentlab
