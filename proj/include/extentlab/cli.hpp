#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace extentlab::cli
{

enum class Command
{
    gen_dict,
    extent,
    witness,
    exp_concentration,
    exp_product,
    exp_add_phi,
    exp_optimality,
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsageError = 2;

struct RunConfig
{
    Command command = Command::extent;

    // dictionary source: exactly one of these for extent and witness
    std::optional<std::string> dict_path;
    std::optional<int> stab_qubits;
    std::string state_path;

    double gap = 1e-7;
    double activity = 1e-6;
    double support = 1e-7;

    int qubits = 1;
    double epsilon = 0.1;
    int trials = 100;
    std::uint64_t seed = 0;
    bool allow_large = false;
    bool synthetic = false;
    bool add_witness = false;

    bool json = false;
    bool verbose_solver = false;
    bool check_slackness = false;
    std::string out_path;
    std::string csv_path;
};

/// Either a validated config, or an exit status with the text to print (help or a usage diagnostic).
struct ParseOutcome
{
    std::optional<RunConfig> config;
    int exit_code = kExitOk;
    std::string message;
};

/// Parses arguments without the program name.
ParseOutcome parse_args(const std::vector<std::string> &args);

/// Executes a config; JSON goes to out, diagnostics to err. Returns the exit status.
int run(const RunConfig &config, std::ostream &out, std::ostream &err);

/// parse_args followed by run, for main().
int main_entry(int argc, char **argv);

} // namespace extentlab::cli
