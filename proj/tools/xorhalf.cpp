#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "xorhalf/errors.hpp"
#include "xorhalf/experiment.hpp"
#include "xorhalf/io.hpp"

namespace {

const char* summary(const std::string& cmd) {
    if (cmd == "gen-random") return "Generate uniformly random K-XOR formulas";
    if (cmd == "gen-planted") return "Generate planted formulas with an exact noise count";
    if (cmd == "value") return "Exhaustive maximum satisfied fraction (n <= 24)";
    if (cmd == "refute") return "Gaussian elimination over GF(2): assignment or certificate";
    if (cmd == "reduce") return "Run the five-stage reduction and evaluate the witness halfspace";
    if (cmd == "check-pseudorandom") return "Frequency test over partial tuples of size <= t";
    if (cmd == "realize-poly") return "Interpolate the degree-d sign realization of XOR_K";
    if (cmd == "fit") return "Perceptron on the lifted sample";
    if (cmd == "distinguish") return "Learner-to-distinguisher verdict on the lifted sample";
    if (cmd == "sq-sim") return "Statistical-query translation through the lift on sparse parities";
    return "";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Experiments on XOR formulas, halfspace reductions and statistical queries"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(xorhalf::kToolVersion));

    xorhalf::ExperimentConfig cfg;
    std::uint64_t seed = 0;
    std::string seeds;
    std::string out;
    std::string format = "text";
    bool no_streaming = false;

    for (const auto& name : xorhalf::experiment_commands()) {
        CLI::App* sub = app.add_subcommand(name, summary(name));
        sub->add_option("--seed", seed, "Single seed (default 0)");
        sub->add_option("--seeds", seeds, "Seed list such as 0-9 or 1,4,7");
        sub->add_option("--preset", cfg.preset, "Parameter schedule")->check(CLI::IsMember({"case1", "case2"}));
        sub->add_option("--n", cfg.n, "Number of variables");
        sub->add_option("--m", cfg.m, "Number of tuples");
        sub->add_option("--K", cfg.k, "Tuple arity (support size for sq-sim)");
        sub->add_option("--q", cfg.q, "Bundle size (odd)");
        sub->add_option("--d", cfg.d, "Lift degree");
        sub->add_option("--eta", cfg.eta, "Planted noise rate, e.g. 0.05 or 1/20");
        sub->add_option("--t", cfg.t, "Filter order (default d; 1 for check-pseudorandom)");
        sub->add_option("--tau", cfg.tau, "Filter threshold (default 2, which accepts every formula)");
        sub->add_option("--source", cfg.source, "Formula source")->check(CLI::IsMember({"random", "planted", "file"}));
        sub->add_option("--in", cfg.input_path, "Formula file (xnf)");
        sub->add_option("--emit", cfg.emit_prefix, "Write generated formulas to <prefix>.<seed>.xnf");
        sub->add_option("--out", out, "Report path (default stdout)");
        sub->add_option("--format", format, "Report format")->check(CLI::IsMember({"text", "json"}));
        sub->add_flag("--strict-paper-rho", cfg.strict_paper_rho, "Index the lift by all (u+1)^d digit strings");
        sub->add_flag("--streaming-freq", cfg.streaming_freq, "Tally only observed partial tuples (default)");
        sub->add_flag("--exact-freq", no_streaming, "Enumerate every partial tuple in the filter");
        sub->add_flag("--truncated", cfg.truncated_lift, "Keep a lazy lifted view past the memory budget");
        sub->add_option("--c", cfg.c, "Distinguisher exponent: threshold 1/2 - dim^-c");
        sub->add_option("--epochs", cfg.epochs, "Perceptron epochs");
        sub->add_option("--lambda", cfg.lambda, "SQ tolerance");
        sub->add_option("--policy", cfg.policy, "SQ answer policy")->check(CLI::IsMember({"rounding", "adversarial"}));
        sub->add_option("--queries", cfg.queries, "Number of random SQ queries");
        sub->add_flag("--transcript", cfg.transcript, "Include the SQ transcript in the report");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    for (CLI::App* sub : app.get_subcommands()) cfg.command = sub->get_name();
    if (no_streaming) cfg.streaming_freq = false;

    try {
        cfg.seeds = seeds.empty() ? std::vector<std::uint64_t>{seed} : xorhalf::parse_seed_list(seeds);
        const xorhalf::Report report = xorhalf::run_experiment(cfg);
        const std::string text = format == "json" ? report.to_json() : report.to_text();
        if (out.empty()) std::cout << text;
        else xorhalf::write_text_file(out, text);
    } catch (const std::exception& e) {
        std::cerr << "xorhalf: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
