#include "extentlab/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "extentlab/dictionary.hpp"
#include "extentlab/experiments.hpp"
#include "extentlab/extent.hpp"
#include "extentlab/stabilizer.hpp"
#include "extentlab/witness.hpp"

namespace extentlab::cli
{

namespace
{

using json = nlohmann::json;

void add_dictionary_source(CLI::App &cmd, RunConfig &cfg)
{
    auto *dict = cmd.add_option("--dict", cfg.dict_path, "dictionary JSON file")->check(CLI::ExistingFile);
    auto *stab = cmd.add_option("--stab", cfg.stab_qubits, "use STAB_N")->check(CLI::Range(1, kMaxQubits));
    dict->excludes(stab);
    stab->excludes(dict);
    cmd.add_option("--state", cfg.state_path, "state JSON file {\"amps\": [[re, im], ...]}")
        ->required()
        ->check(CLI::ExistingFile);
    cmd.add_option("--gap", cfg.gap, "relative duality gap tolerance")->check(CLI::PositiveNumber);
    cmd.add_option("--support", cfg.support, "support threshold on |c_s|")->check(CLI::PositiveNumber);
    cmd.add_flag("--json", cfg.json, "full JSON document with coefficients and witness");
    cmd.add_flag("--verbose-solver", cfg.verbose_solver, "include per-iteration solver diagnostics");
    cmd.add_flag("--allow-large", cfg.allow_large, "permit --stab 5");
}

void add_experiment_options(CLI::App &cmd, RunConfig &cfg, int default_trials)
{
    cfg.trials = default_trials;
    cmd.add_option("--qubits", cfg.qubits, "qubits per factor")->check(CLI::Range(1, kMaxQubits));
    cmd.add_option("--trials", cfg.trials, "number of trials")->check(CLI::PositiveNumber);
    cmd.add_option("--seed", cfg.seed, "master seed");
    cmd.add_option("--out", cfg.out_path, "write JSON-lines records here instead of stdout");
    cmd.add_option("--csv", cfg.csv_path, "also write records as CSV");
}

Dictionary dictionary_for(const RunConfig &cfg)
{
    if (cfg.dict_path)
        return load_dictionary(*cfg.dict_path);
    return enumerate_stabilizer_states(*cfg.stab_qubits, cfg.allow_large);
}

ExtentOptions extent_options(const RunConfig &cfg)
{
    ExtentOptions o;
    o.solver.gap_tolerance = cfg.gap;
    o.solver.record_history = cfg.verbose_solver;
    o.support_tolerance = cfg.support;
    return o;
}

json history_to_json(const std::vector<IterationLog> &history)
{
    json out = json::array();
    for (const auto &h : history)
        out.push_back({{"iteration", h.iteration},
                       {"primal_objective", h.primal_objective},
                       {"dual_objective", h.dual_objective},
                       {"relative_gap", h.relative_gap},
                       {"primal_residual", h.primal_residual},
                       {"dual_residual", h.dual_residual},
                       {"mu", h.mu},
                       {"sigma", h.sigma},
                       {"step", h.step}});
    return out;
}

json solution_to_json(const Dictionary &d, const ComplexVector &psi, const ExtentSolution &sol, bool full,
                      bool verbose)
{
    const Fidelity f = fidelity(d, psi);
    json out{{"schema_version", kSchemaVersion},
             {"xi", sol.xi},
             {"gap", sol.gap},
             {"status", to_string(sol.status)},
             {"support", sol.support},
             {"fidelity", f.value},
             {"fidelity_index", f.index},
             {"lower_bound", f.value > 0 ? 1.0 / f.value : 0.0},
             {"dictionary_size", d.size()},
             {"dim", d.dimension()},
             {"warnings", sol.warnings}};
    if (full)
    {
        out["coefficients"] = vector_to_json(sol.coefficients);
        out["witness"] = vector_to_json(sol.witness);
        out["primal_objective"] = sol.primal_objective;
        out["dual_objective"] = sol.dual_objective;
        out["primal_residual"] = sol.primal_residual;
        out["dual_residual"] = sol.dual_residual;
        out["iterations"] = sol.iterations;
    }
    if (verbose)
        out["solver"] = {{"iterations", sol.iterations}, {"history", history_to_json(sol.history)}};
    return out;
}

void write_file(const std::string &path, const std::string &text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("cannot open " + path + " for writing");
    f << text;
    if (!f)
        throw Error("failed writing " + path);
}

void emit(const RunConfig &cfg, const ExperimentResult &result, std::ostream &out)
{
    if (!cfg.csv_path.empty())
        write_file(cfg.csv_path, result.csv());
    if (cfg.out_path.empty())
        out << result.json_lines();
    else
        write_file(cfg.out_path, result.json_lines());
    out << result.summary.dump() << '\n';
}

int run_extent(const RunConfig &cfg, std::ostream &out)
{
    const Dictionary d = dictionary_for(cfg);
    const ComplexVector psi = load_state(cfg.state_path);
    const ExtentSolution sol = extent(d, psi, extent_options(cfg));
    out << solution_to_json(d, psi, sol, cfg.json, cfg.verbose_solver).dump(cfg.json ? 2 : -1) << '\n';
    return kExitOk;
}

int run_witness(const RunConfig &cfg, std::ostream &out)
{
    const Dictionary d = dictionary_for(cfg);
    const ComplexVector psi = load_state(cfg.state_path);
    const ExtentSolution sol = extent(d, psi, extent_options(cfg));
    json doc = solution_to_json(d, psi, sol, true, cfg.verbose_solver);
    const ActiveSet active = active_set(d, sol.witness, cfg.activity);
    doc["active_set"] = {{"indices", active.indices}, {"phases", active.phases}};
    doc["extreme_point"] = is_extreme_point(d, sol.witness, cfg.activity);
    doc["uniqueness"] = to_string(witness_is_unique(d, sol));
    doc["witness_norm2"] = sol.witness.squaredNorm();
    if (cfg.check_slackness)
    {
        const SlacknessReport r = check_complementary_slackness(d, sol.coefficients, sol.witness, cfg.activity,
                                                                cfg.support);
        doc["slackness"] = {{"worst_aligned", r.worst_aligned},
                            {"worst_inactive", r.worst_inactive},
                            {"satisfied", r.satisfied(cfg.activity)}};
    }
    out << doc.dump(cfg.json ? 2 : -1) << '\n';
    return kExitOk;
}

} // namespace

ParseOutcome parse_args(const std::vector<std::string> &args)
{
    RunConfig cfg;
    CLI::App app{"Extent computation over finite dictionaries", "extentlab"};
    app.require_subcommand(1);

    auto *gen = app.add_subcommand("gen-dict", "enumerate STAB_N and save it as a dictionary file");
    gen->add_option("--qubits", cfg.qubits, "qubit count")->required()->check(CLI::Range(1, kMaxQubits));
    gen->add_option("--out", cfg.out_path, "output path")->required();
    gen->add_flag("--allow-large", cfg.allow_large, "permit 5 qubits");

    auto *ext = app.add_subcommand("extent", "extent of a state over a dictionary");
    add_dictionary_source(*ext, cfg);

    auto *wit = app.add_subcommand("witness", "optimal dual witness and its geometry");
    add_dictionary_source(*wit, cfg);
    wit->add_option("--activity", cfg.activity, "activity tolerance")->check(CLI::PositiveNumber);
    wit->add_flag("--check-slackness", cfg.check_slackness, "report complementary-slackness violations");

    auto *exp = app.add_subcommand("exp", "seeded experiments");
    exp->require_subcommand(1);
    auto *conc = exp->add_subcommand("concentration", "stabilizer fidelity of Haar states");
    add_experiment_options(*conc, cfg, 500);
    conc->add_option("--epsilon", cfg.epsilon, "epsilon > 0")->check(CLI::PositiveNumber);
    auto *prod = exp->add_subcommand("product", "multiplicativity over STAB_N (x) STAB_N");
    add_experiment_options(*prod, cfg, 100);
    auto *phi = exp->add_subcommand("add-phi", "extent drop from adding the maximally entangled state");
    add_experiment_options(*phi, cfg, 20);
    phi->add_flag("--big", cfg.allow_large, "permit 3 qubits per factor (1.17M words, memory heavy)");
    phi->add_flag("--synthetic", cfg.synthetic, "use the computational basis as factor dictionary");
    phi->add_flag("--add-witness", cfg.add_witness, "add the normalized product witness instead of Phi");
    auto *opt = exp->add_subcommand("optimality", "support words per stabilizer basis");
    add_experiment_options(*opt, cfg, 200);

    ParseOutcome outcome;
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try
    {
        app.parse(reversed);
    }
    catch (const CLI::CallForHelp &)
    {
        outcome.message = app.help();
        return outcome;
    }
    catch (const CLI::CallForAllHelp &)
    {
        outcome.message = app.help("", CLI::AppFormatMode::All);
        return outcome;
    }
    catch (const CLI::ParseError &e)
    {
        outcome.exit_code = kExitUsageError;
        outcome.message = e.what();
        return outcome;
    }

    if (gen->parsed())
        cfg.command = Command::gen_dict;
    else if (ext->parsed() || wit->parsed())
    {
        cfg.command = ext->parsed() ? Command::extent : Command::witness;
        if (!cfg.dict_path && !cfg.stab_qubits)
        {
            outcome.exit_code = kExitUsageError;
            outcome.message = "one of --dict or --stab is required";
            return outcome;
        }
        if (cfg.stab_qubits && *cfg.stab_qubits > kMaxDefaultQubits && !cfg.allow_large)
        {
            outcome.exit_code = kExitUsageError;
            outcome.message = "--stab 5 needs --allow-large";
            return outcome;
        }
    }
    else if (conc->parsed())
        cfg.command = Command::exp_concentration;
    else if (prod->parsed())
        cfg.command = Command::exp_product;
    else if (phi->parsed())
        cfg.command = Command::exp_add_phi;
    else
        cfg.command = Command::exp_optimality;
    outcome.config = cfg;
    return outcome;
}

int run(const RunConfig &cfg, std::ostream &out, std::ostream &err)
{
    try
    {
        switch (cfg.command)
        {
        case Command::gen_dict: {
            const Dictionary d = enumerate_stabilizer_states(cfg.qubits, cfg.allow_large);
            save_dictionary(d, cfg.out_path);
            out << json{{"schema_version", kSchemaVersion}, {"qubits", cfg.qubits}, {"words", d.size()},
                        {"path", cfg.out_path}}
                       .dump()
                << '\n';
            return kExitOk;
        }
        case Command::extent:
            return run_extent(cfg, out);
        case Command::witness:
            return run_witness(cfg, out);
        case Command::exp_concentration: {
            ExperimentResult result;
            concentration_experiment(cfg.qubits, cfg.epsilon, cfg.trials, cfg.seed, &result);
            emit(cfg, result, out);
            return kExitOk;
        }
        case Command::exp_product: {
            ExperimentResult result;
            const Dictionary d = enumerate_stabilizer_states(cfg.qubits);
            product_multiplicativity_experiment(d, d, cfg.trials, cfg.seed, &result);
            emit(cfg, result, out);
            return kExitOk;
        }
        case Command::exp_add_phi: {
            ExperimentResult result;
            AddPhiOptions o;
            o.num_qubits = cfg.qubits;
            o.trials = cfg.trials;
            o.seed = cfg.seed;
            o.allow_large = cfg.allow_large;
            o.factor = cfg.synthetic ? FactorDictionary::computational : FactorDictionary::stabilizer;
            o.added = cfg.add_witness ? AddedWord::witness : AddedWord::maximally_entangled;
            add_phi_experiment(o, &result);
            emit(cfg, result, out);
            return kExitOk;
        }
        case Command::exp_optimality: {
            ExperimentResult result;
            optimality_condition_check(cfg.qubits, cfg.trials, cfg.seed, &result);
            emit(cfg, result, out);
            return kExitOk;
        }
        }
    }
    catch (const ParseError &e)
    {
        err << "parse error: " << e.what() << '\n';
        return kExitDomainError;
    }
    catch (const Error &e)
    {
        err << "error: " << e.what() << '\n';
        return kExitDomainError;
    }
    return kExitDomainError;
}

int main_entry(int argc, char **argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    const ParseOutcome parsed = parse_args(args);
    if (!parsed.config)
    {
        (parsed.exit_code == kExitOk ? std::cout : std::cerr) << parsed.message << '\n';
        return parsed.exit_code;
    }
    return run(*parsed.config, std::cout, std::cerr);
}

} // namespace extentlab::cli
