#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xorhalf/report.hpp"

namespace xorhalf {

/// Subcommands understood by run_experiment, in help order.
const std::vector<std::string>& experiment_commands();

struct ExperimentConfig {
    std::string command;
    std::vector<std::uint64_t> seeds{0};

    /// Where formulas come from: "random", "planted" or "file" (empty: command default).
    std::string source;
    std::string input_path;
    /// gen-random / gen-planted write <prefix>.<seed>.xnf when set.
    std::string emit_prefix;

    std::string preset;  // "", "case1", "case2"
    int n = 0;
    std::size_t m = 0;
    int k = 0;
    int q = 1;
    int d = 1;
    std::string eta = "0";
    std::optional<int> t;        // default: d
    std::string tau;             // default: 2 (no filtering)
    bool strict_paper_rho = false;
    bool streaming_freq = true;
    bool truncated_lift = false;

    // fit / distinguish
    double c = 0.25;
    int epochs = 50;

    // sq-sim
    std::string lambda = "1/16";
    std::string policy = "rounding";
    int queries = 100;
    bool transcript = false;

    /// Throws InvalidParameter on an unusable configuration.
    void validate() const;
};

/// "3", "0-9", "1,4,7-9" -> ascending list in written order.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

/// Runs the command once per seed (seeds in parallel, results merged in seed
/// order). Per-seed failures are recorded as `status = error`; configuration
/// errors throw.
Report run_experiment(const ExperimentConfig& config);

}  // namespace xorhalf
