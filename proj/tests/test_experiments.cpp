#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "extentlab/experiments.hpp"
#include "extentlab/parallel.hpp"
#include "extentlab/stabilizer.hpp"

using namespace extentlab;

namespace
{

std::string stripped_lines(const ExperimentResult &r)
{
    std::string out;
    for (const auto &rec : r.records)
        out += strip_volatile(rec).dump() + "\n";
    return out + strip_volatile(r.summary).dump() + "\n";
}

struct ThreadCap
{
    explicit ThreadCap(const char *value) { setenv("EXTENTLAB_THREADS", value, 1); }
    ~ThreadCap() { unsetenv("EXTENTLAB_THREADS"); }
};

} // namespace

TEST_SUITE("experiments")
{
    TEST_CASE("random streams are deterministic and split independently")
    {
        RandomStream a(42);
        RandomStream b(42);
        for (int i = 0; i < 100; ++i)
            CHECK(a.next_u64() == b.next_u64());
        const RandomStream root(7);
        RandomStream s1 = root.split(1, 0);
        RandomStream s2 = root.split(1, 1);
        RandomStream s3 = root.split(2, 0);
        CHECK(s1.next_u64() != s2.next_u64());
        CHECK(s1.key() != s3.key());
        // split does not depend on the parent's counter
        RandomStream advanced(7);
        advanced.next_u64();
        CHECK(advanced.split(1, 0).key() == root.split(1, 0).key());
        CHECK(trial_stream(3, 1, 4).key() == trial_stream(3, 1, 4).key());

        RandomStream u(1);
        double lo = 1, hi = 0;
        for (int i = 0; i < 1000; ++i)
        {
            const double x = u.uniform();
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        CHECK(lo >= 0.0);
        CHECK(hi < 1.0);
    }

    TEST_CASE("normal draws have unit variance")
    {
        RandomStream rng(9);
        double sum = 0, sum2 = 0;
        const int n = 200000;
        for (int i = 0; i < n; ++i)
        {
            const double x = rng.normal();
            sum += x;
            sum2 += x * x;
        }
        CHECK(std::abs(sum / n) < 5 / std::sqrt(n));
        CHECK(std::abs(sum2 / n - 1.0) < 5 * std::sqrt(2.0 / n));
    }

    TEST_CASE("Haar samples")
    {
        RandomStream rng(1);
        const ComplexVector psi = haar_sample(6, rng);
        CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
        RandomStream again(1);
        CHECK(haar_sample(6, again) == psi);
        CHECK_THROWS_AS(haar_sample(0, rng), DimensionError);

        // E|<e_0, psi>|^2 = 1/d, variance (d - 1)/(d^2 (d + 1))
        for (Index d : {2, 5})
        {
            const int n = 100000;
            double mean = 0;
            for (int i = 0; i < n; ++i)
                mean += std::norm(haar_sample(d, rng)(0)) / n;
            const double dd = static_cast<double>(d);
            const double sigma = std::sqrt((dd - 1) / (dd * dd * (dd + 1)) / n);
            CHECK(std::abs(mean - 1.0 / dd) < 3 * sigma);
        }
    }

    TEST_CASE("parallel_for visits every index once and propagates errors")
    {
        ThreadCap cap("3");
        CHECK(thread_count() == 3);
        std::vector<int> hits(1000, 0);
        parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
        CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
        CHECK_THROWS_AS(parallel_for(10,
                                     [](std::size_t i) {
                                         if (i == 5)
                                             throw SolverError("boom");
                                     }),
                        SolverError);
    }

    TEST_CASE("overlap tail at one qubit")
    {
        const auto points = overlap_tail_experiment(2, {0.25, 0.5, 0.75}, 20000, 42);
        for (const auto &p : points)
        {
            CHECK(p.expected == doctest::Approx(1 - p.x));
            CHECK(std::abs(p.empirical - p.expected) <= 3 * p.sigma);
        }
    }

    TEST_CASE("concentration experiment")
    {
        ExperimentResult r;
        const ConcentrationStats s = concentration_experiment(1, 0.1, 200, 3, &r);
        CHECK(s.threshold == doctest::Approx(1 / (std::numbers::sqrt2 + 0.1)));
        // F >= 1/2 always in C^2 while the threshold is about 0.66
        CHECK(s.frequency < 0.5);
        CHECK(r.records.size() == 200);
        CHECK(r.summary.at("frequency").get<double>() == s.frequency);
        for (const auto &rec : r.records)
            CHECK(rec.at("fidelity").get<double>() >= 0.5 - 1e-12);
        CHECK_THROWS_AS(concentration_experiment(6, 0.1, 1, 0), CapacityError);
        CHECK_THROWS_AS(concentration_experiment(2, 0.0, 1, 0), ValidationError);
        CHECK_THROWS_AS(concentration_experiment(2, 0.1, 0, 0), ValidationError);
    }

    TEST_CASE("product multiplicativity")
    {
        const Dictionary s1 = enumerate_stabilizer_states(1);
        ExperimentResult r;
        const ProductStats s = product_multiplicativity_experiment(s1, s1, 10, 5, &r);
        CHECK(s.max_deviation <= 1e-5);
        CHECK(r.records.size() == 10);

        const ComplexVector t = magic_t_state();
        const Dictionary prod = tensor(s1, s1);
        const double xi = extent(prod, kron(t, ComplexVector(t.conjugate()))).xi;
        const double single = 2.0 / (1.0 + 1.0 / std::numbers::sqrt3);
        CHECK(std::abs(xi - single * single) < 1e-5);
        CHECK(std::abs(xi - 1.6076951545867) < 1e-5);
        CHECK(std::abs(extent(prod, kron(ComplexVector(s1.word(2)), ComplexVector(s1.word(5)))).xi - 1.0) < 1e-6);
    }

    TEST_CASE("add-phi over stabilizer factors")
    {
        AddPhiOptions o;
        o.num_qubits = 1;
        o.trials = 20;
        o.seed = 1;
        ExperimentResult r;
        const AddPhiStats s = add_phi_experiment(o, &r);
        CHECK(s.chain_violations == 0);
        CHECK(s.monotonicity_violations == 0);
        CHECK(s.false_positives == 0);
        // ||y||^2 / sqrt2 < 1 at one qubit, so the trigger never fires
        CHECK(s.triggered == 0);
        CHECK(s.max_ratio < 1.0);
        for (const auto &rec : r.records)
            CHECK(rec.at("witness_norm2").get<double>() >= rec.at("xi").get<double>() - 1e-6);

        o.num_qubits = 4;
        CHECK_THROWS_AS(add_phi_experiment(o), CapacityError);
    }

    TEST_CASE("add-phi on the synthetic computational-basis instance")
    {
        AddPhiOptions o;
        o.num_qubits = 1;
        o.trials = 10;
        o.factor = FactorDictionary::computational;
        o.added = AddedWord::witness;
        const AddPhiStats s = add_phi_experiment(o);
        CHECK(s.triggered == 10);
        CHECK(s.strict_decreases == 10);
        CHECK(s.false_positives == 0);
        CHECK(s.monotonicity_violations == 0);
    }

    TEST_CASE("optimality condition")
    {
        ExperimentResult r;
        const OptimalityStats s = optimality_condition_check(1, 30, 2, &r);
        CHECK(s.max_per_basis == 1);
        CHECK(s.violations == 0);
        CHECK(s.max_support <= 3);

        const Dictionary s2 = enumerate_stabilizer_states(2);
        CHECK(extent(s2, s2.word(7)).support.size() == 1);
        CHECK_THROWS_AS(optimality_condition_check(4, 1, 0), CapacityError);
    }

    TEST_CASE("improvement step examples")
    {
        const ImprovedDecomposition a = improve_single_basis_pair(1.0, Complex(0.3, 0.4));
        CHECK(a.old_l1 == doctest::Approx(1.5));
        CHECK(std::abs(a.new_l1 - (0.3 + 0.7 * std::numbers::sqrt2)) < 1e-15);
        CHECK(std::abs(a.new_l1 - 1.2899494936611665) < 1e-12);
        ComplexVector target(2);
        target << 1.0, Complex(0.3, 0.4);
        CHECK((a.reconstruct() - target).norm() < 1e-15);
        double l1 = 0;
        for (Complex c : a.coefficients)
            l1 += std::abs(c);
        CHECK(std::abs(l1 - a.new_l1) < 1e-15);

        const ImprovedDecomposition zero = improve_single_basis_pair(1.0, 0.0);
        CHECK(zero.new_l1 == 1.0);
        CHECK(zero.old_l1 == 1.0);

        const ImprovedDecomposition half = improve_single_basis_pair(1.0, 0.5);
        CHECK(std::abs(half.new_l1 - (1 + 0.5 * (std::numbers::sqrt2 - 1))) < 1e-15);
        CHECK(half.new_l1 < 1.5);

        // negative parts pick the opposite words
        const ImprovedDecomposition neg = improve_single_basis_pair(1.0, Complex(-0.2, -0.3));
        target << 1.0, Complex(-0.2, -0.3);
        CHECK((neg.reconstruct() - target).norm() < 1e-15);

        // a common scale factor carries through
        const Complex scale = std::polar(2.0, 0.7);
        const ImprovedDecomposition scaled = improve_single_basis_pair(scale, scale * Complex(0.3, 0.4));
        target << scale, scale * Complex(0.3, 0.4);
        CHECK((scaled.reconstruct() - target).norm() < 1e-14);
        CHECK(std::abs(scaled.new_l1 - 2 * a.new_l1) < 1e-14);

        CHECK_THROWS_AS(improve_single_basis_pair(1.0, Complex(0.6, 0.6)), ValidationError);
        CHECK_THROWS_AS(improve_single_basis_pair(0.0, 0.5), ValidationError);
    }

    TEST_CASE("results are reproducible and independent of the thread count")
    {
        std::string serial;
        {
            ThreadCap cap("1");
            ExperimentResult r;
            concentration_experiment(2, 0.1, 40, 11, &r);
            serial = stripped_lines(r);
        }
        ThreadCap cap("4");
        ExperimentResult r;
        concentration_experiment(2, 0.1, 40, 11, &r);
        CHECK(stripped_lines(r) == serial);
        ExperimentResult other;
        concentration_experiment(2, 0.1, 40, 12, &other);
        CHECK(stripped_lines(other) != serial);
    }

    TEST_CASE("serialization helpers")
    {
        nlohmann::json j = {{"a", 1}, {"timestamp", "now"}, {"nested", {{"wall_time_s", 0.5}, {"b", 2}}}};
        const nlohmann::json s = strip_volatile(j);
        CHECK_FALSE(s.contains("timestamp"));
        CHECK_FALSE(s.at("nested").contains("wall_time_s"));
        CHECK(s.at("nested").at("b") == 2);
        CHECK(complex_to_json(Complex(1, -2)) == nlohmann::json::array({1.0, -2.0}));

        ExperimentResult r;
        r.records = {{{"x", 1}, {"y", "a"}}, {{"x", 2}, {"y", "b"}}};
        CHECK(r.csv() == "x,y\n1,a\n2,b\n");
        CHECK(r.json_lines() == "{\"x\":1,\"y\":\"a\"}\n{\"x\":2,\"y\":\"b\"}\n");
    }
}
