#include "xorhalf/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <memory>
#include <set>
#include <sstream>

#include "xorhalf/errors.hpp"
#include "xorhalf/formula.hpp"
#include "xorhalf/io.hpp"
#include "xorhalf/learners.hpp"
#include "xorhalf/parallel.hpp"
#include "xorhalf/polyrealize.hpp"
#include "xorhalf/pseudorandom.hpp"
#include "xorhalf/reduction.hpp"
#include "xorhalf/sq.hpp"

namespace xorhalf {

const std::vector<std::string>& experiment_commands() {
    static const std::vector<std::string> names{"gen-random", "gen-planted", "value",  "refute",      "reduce",
                                                "check-pseudorandom", "realize-poly", "fit", "distinguish", "sq-sim"};
    return names;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string item;
    auto number = [&](const std::string& s) {
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
            throw InvalidParameter("bad seed '" + s + "' in '" + text + "'");
        }
        return std::stoull(s);
    };
    while (std::getline(ss, item, ',')) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) {
            out.push_back(number(item));
            continue;
        }
        const auto lo = number(item.substr(0, dash));
        const auto hi = number(item.substr(dash + 1));
        if (hi < lo) throw InvalidParameter("empty seed range '" + item + "'");
        if (hi - lo > 1'000'000) throw InvalidParameter("seed range '" + item + "' is too long");
        for (auto s = lo; s <= hi; ++s) out.push_back(s);
    }
    if (out.empty()) throw InvalidParameter("empty seed list");
    return out;
}

namespace {

struct Resolved {
    std::string source;
    Rational eta;
    Rational tau;
    Rational lambda;
    SqPolicy policy = SqPolicy::Rounding;
    Preset preset = Preset::None;
    std::optional<XorFormula> file_formula;
};

bool is_command(const std::string& c) {
    const auto& all = experiment_commands();
    return std::find(all.begin(), all.end(), c) != all.end();
}

std::string default_source(const ExperimentConfig& cfg) {
    if (cfg.command == "gen-random") return "random";
    if (cfg.command == "gen-planted") return "planted";
    if (!cfg.source.empty()) return cfg.source;
    if (!cfg.input_path.empty()) return "file";
    if (cfg.command == "check-pseudorandom" || cfg.command == "realize-poly") return "random";
    if (cfg.command == "sq-sim") return "none";
    return "planted";
}

bool uses_formula(const std::string& command) { return command != "sq-sim" && command != "realize-poly"; }

std::string assignment_str(const Assignment& a) {
    std::string s;
    for (auto v : a.values()) s.push_back(v > 0 ? '+' : '-');
    return s;
}

template <typename T>
std::string join(const std::vector<T>& v) {
    std::ostringstream os;
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

std::string fnv1a(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct SeedRecord {
    ReportSection section;
    std::vector<std::pair<std::string, Rational>> means;
    std::vector<std::pair<std::string, bool>> flags;

    void mean(const std::string& key, const Rational& v) { means.emplace_back(key, v); }
    void flag(const std::string& key, bool v) {
        section.put_bool(key, v);
        flags.emplace_back(key, v);
    }
};

struct Input {
    std::optional<XorFormula> formula;
    std::optional<PlantedInstance> planted;

    const XorFormula& j() const { return planted ? planted->formula : *formula; }
};

Input make_input(const ExperimentConfig& cfg, const Resolved& r, std::uint64_t seed) {
    Input in;
    if (r.source == "file") in.formula = *r.file_formula;
    else if (r.source == "planted") in.planted = gen_planted_formula(cfg.n, cfg.m, cfg.k, r.eta, seed);
    else in.formula = gen_random_formula(cfg.n, cfg.m, cfg.k, seed);
    return in;
}

PipelineParams pipeline_params(const ExperimentConfig& cfg, const Resolved& r, const XorFormula& j, std::uint64_t seed,
                               std::vector<std::string>& warnings) {
    PipelineParams p;
    p.n = j.n();
    p.k = j.k();
    p.q = cfg.q;
    p.d = cfg.d;
    p.eta = r.eta;
    p.tau = r.tau;
    p.t = cfg.t.value_or(cfg.d);
    p.seed = seed;
    p.streaming_freq = cfg.streaming_freq;
    p.lift.indexing = cfg.strict_paper_rho ? RhoIndexing::StrictPaper : RhoIndexing::Canonical;
    p.lift.truncated = cfg.truncated_lift;
    const auto w = apply_preset(r.preset, p);
    warnings.insert(warnings.end(), w.begin(), w.end());
    return p;
}

PipelineResult pipeline(const ExperimentConfig& cfg, const Resolved& r, const Input& in, std::uint64_t seed,
                        SeedRecord& rec) {
    std::vector<std::string> warnings;
    const PipelineParams p = pipeline_params(cfg, r, in.j(), seed, warnings);
    PipelineResult res = in.planted ? run_pipeline(*in.planted, p) : run_pipeline(in.j(), p);
    auto& s = rec.section;
    s.put_int("q", res.params.q);
    s.put_int("d", res.params.d);
    s.put_int("t", res.params.t);
    s.put_rat("tau", res.params.tau);
    s.put_rat("eta", res.params.eta);
    s.put_uint("bundles", res.bundles.m());
    s.put_uint("discarded", res.discarded.size());
    s.put_bool("filter.pass", res.filter.pass);
    s.put_rat("filter.max_deviation", res.filter.report.max_deviation);
    s.put_uint("lift.dim", res.binary.dim());
    s.put("lift.storage", res.binary.materialized() ? "packed" : "lazy");
    s.put("lift.indexing", cfg.strict_paper_rho ? "strict" : "canonical");
    if (res.eta_prime_bound) s.put_real("eta_prime", res.eta_prime_bound->value);
    if (!res.eta_prime_note.empty()) s.put("eta_prime.note", res.eta_prime_note);
    warnings.insert(warnings.end(), res.warnings.begin(), res.warnings.end());
    for (std::size_t i = 0; i < warnings.size(); ++i) s.put("warning." + std::to_string(i), warnings[i]);
    rec.flags.emplace_back("filter.pass", res.filter.pass);
    return res;
}

void record_witness(const PipelineResult& res, SeedRecord& rec) {
    if (!res.witness) return;
    auto& s = rec.section;
    const Fraction sum = *res.mismatch_fraction + *res.unbalanced_fraction;
    s.put_frac("witness_error", *res.witness_error);
    s.put_frac("mismatch_fraction", *res.mismatch_fraction);
    s.put_frac("unbalanced_fraction", *res.unbalanced_fraction);
    s.put_frac("decomposition_bound", sum);
    rec.flag("decomposition_holds", *res.witness_error <= sum);
    s.put_rat("witness.l1", res.witness->l1_norm());
    if (res.witness->min_margin()) s.put_rat("witness.min_margin", *res.witness->min_margin());
    rec.mean("witness_error", res.witness_error->to_rational());
    rec.mean("mismatch_fraction", res.mismatch_fraction->to_rational());
    rec.mean("unbalanced_fraction", res.unbalanced_fraction->to_rational());
}

void run_formula_command(const ExperimentConfig& cfg, const Resolved& r, std::uint64_t seed, SeedRecord& rec) {
    auto& s = rec.section;
    const Input in = make_input(cfg, r, seed);
    const XorFormula& j = in.j();
    s.put_int("n", j.n());
    s.put_uint("m", j.m());
    s.put_int("K", j.k());
    const std::string& c = cfg.command;

    if (c == "gen-random" || c == "gen-planted") {
        const std::string text = emit_xnf(j);
        if (in.planted) {
            s.put_rat("eta", in.planted->noise_rate);
            s.put_uint("flipped", in.planted->flipped_indices.size());
            s.put("planted", assignment_str(in.planted->planted));
            const Fraction v = val_xor(j, in.planted->planted);
            s.put_frac("planted_value", v);
            rec.mean("planted_value", v.to_rational());
        }
        s.put("digest", fnv1a(text));
        if (!cfg.emit_prefix.empty()) {
            const std::string path = cfg.emit_prefix + "." + std::to_string(seed) + ".xnf";
            write_text_file(path, text);
            s.put("file", path);
        }
        return;
    }
    if (c == "value") {
        const auto v = brute_force_value(j);
        s.put_frac("value", v.value);
        s.put("argmax", assignment_str(v.argmax));
        if (in.planted) s.put_frac("planted_value", val_xor(j, in.planted->planted));
        rec.mean("value", v.value.to_rational());
        rec.flag("satisfiable", v.value.num() == v.value.den());
        return;
    }
    if (c == "refute") {
        const auto g = gf2_refute(j);
        s.put("result", g.sat ? "SAT" : "UNSAT");
        s.put_uint("rank", g.rank);
        bool verified = false;
        if (g.sat) {
            const Fraction v = val_xor(j, *g.assignment);
            s.put("assignment", assignment_str(*g.assignment));
            s.put_frac("value", v);
            verified = v.num() == v.den();
        } else {
            s.put("certificate", join(g.certificate));
            verified = verify_certificate(j, g.certificate);
        }
        rec.flag("sat", g.sat);
        rec.flag("verified", verified);
        return;
    }
    if (c == "check-pseudorandom") {
        const int t = cfg.t.value_or(1);
        FrequencyOptions opts;
        opts.streaming = cfg.streaming_freq;
        const auto rep = pseudorandom_test(j, t, r.tau, opts);
        s.put_int("t", t);
        s.put_rat("tau", r.tau);
        s.put_rat("max_deviation", rep.max_deviation);
        s.put("worst_tuple", rep.worst_tuple.str());
        s.put_uint("tested", rep.tested_count);
        s.put("strategy", strategy_name(rep.strategy));
        const Bound b = bound_pseudorandom_failure(j.n(), j.k(), j.m(), to_double(r.tau));
        s.put_real("failure_bound", b.value);
        s.put_bool("failure_bound.vacuous", b.vacuous);
        rec.flag("pass", rep.pass);
        rec.mean("max_deviation", rep.max_deviation);
        return;
    }
    if (c == "reduce") {
        const auto res = pipeline(cfg, r, in, seed, rec);
        record_witness(res, rec);
        return;
    }
    if (c == "fit") {
        const auto res = pipeline(cfg, r, in, seed, rec);
        record_witness(res, rec);
        const auto fit = perceptron_fit(res.binary, cfg.epochs, seed);
        s.put_frac("training_error", fit.training_error);
        s.put_int("epochs_run", fit.epochs_run);
        s.put_int("mistakes", fit.mistakes);
        rec.flag("separated", fit.training_error.num() == 0);
        rec.mean("training_error", fit.training_error.to_rational());
        return;
    }
    if (c == "distinguish") {
        const auto res = pipeline(cfg, r, in, seed, rec);
        PerceptronLearner learner(cfg.epochs, seed);
        const auto v = distinguisher_wrapper(res.binary, learner, cfg.c, seed);
        s.put("learner", learner.name());
        s.put_real("c", cfg.c);
        s.put("verdict", verdict_name(v.label));
        s.put_frac("learner_error", v.error);
        s.put_rat("threshold", v.threshold);
        if (v.diagnostic) s.put("diagnostic", *v.diagnostic);
        rec.flag("almost_realizable", v.label == VerdictLabel::AlmostRealizable);
        rec.mean("learner_error", v.error.to_rational());
        return;
    }
    throw InvalidParameter("unhandled command '" + c + "'");
}

void run_realize_poly(const ExperimentConfig& cfg, std::uint64_t seed, SeedRecord& rec) {
    auto& s = rec.section;
    const auto real = interpolate_xor_poly(cfg.k, cfg.d);
    s.put_int("K", cfg.k);
    s.put_int("d", cfg.d);
    s.put("qpoly", real.qpoly.str());
    s.put_int("degree", real.qpoly.degree());
    s.put("nodes", join(real.node_set));
    s.put_rat("qpoly_at_K", real.qpoly(cfg.k));
    s.put_rat("uniform_unbalanced", uniform_unbalanced_probability(cfg.k, cfg.d));
    s.put_rat("uniform_disagreement", uniform_disagreement(real));
    try {
        const Bound b = xor_disagreement_bound(cfg.k, cfg.d, 0.0);
        s.put_real("disagreement_bound", b.value);
        s.put_bool("disagreement_bound.vacuous", b.vacuous);
    } catch (const PreconditionError& e) {
        s.put("disagreement_bound.note", e.what());
    }
    if (cfg.n > 0 && cfg.m > 0) {
        const XorFormula j = gen_random_formula(cfg.n, cfg.m, cfg.k, seed);
        Engine eng = make_engine(seed, StreamTag::Experiment, 2);
        std::vector<std::int8_t> v(static_cast<std::size_t>(cfg.n));
        for (auto& x : v) x = fair_coin(eng) ? -1 : 1;
        const Fraction a = agreement_on_formula(j, Assignment(std::move(v)), real);
        s.put_frac("agreement", a);
        rec.mean("agreement", a.to_rational());
    }
}

void run_sq_sim(const ExperimentConfig& cfg, const Resolved& r, std::uint64_t seed, SeedRecord& rec) {
    auto& s = rec.section;
    Engine pick = make_engine(seed, StreamTag::Experiment, 0);
    std::vector<int> vars(static_cast<std::size_t>(cfg.n));
    for (int v = 0; v < cfg.n; ++v) vars[static_cast<std::size_t>(v)] = v + 1;
    for (std::size_t i = vars.size(); i > 1; --i) std::swap(vars[i - 1], vars[uniform_below(pick, i)]);
    std::vector<int> support(vars.begin(), vars.begin() + cfg.k);
    std::sort(support.begin(), support.end());
    const SparseParityTarget target(cfg.n, support);

    auto base = std::make_shared<const ExplicitDistribution>(parity_distribution(target));
    const MonomialIndex idx(static_cast<std::uint64_t>(cfg.n), cfg.d,
                            cfg.strict_paper_rho ? RhoIndexing::StrictPaper : RhoIndexing::Canonical);
    const InstanceLift lift = psi_rho_lift(idx);
    auto lifted = std::make_shared<const ExplicitDistribution>(pushforward(*base, lift));
    SqOracle translated(base, r.lambda, r.policy, seed);
    SqOracle direct(lifted, r.lambda, r.policy, seed);

    s.put("support", join(support));
    s.put_uint("lift.dim", lifted->dim());
    s.put("policy", policy_name(r.policy));
    s.put_rat("lambda", r.lambda);

    Engine eng = make_engine(seed, StreamTag::Experiment, 1);
    std::int64_t agree = 0;
    Rational worst = 0;
    for (int i = 0; i < cfg.queries; ++i) {
        const Query q = random_query(static_cast<QueryFamily>(i % 3), lifted->dim(), eng);
        const Rational a = translated.query(translate_query(q, lift));
        const Rational b = direct.query(q);
        agree += a == b;
        const Rational dev = abs(b - direct.transcript().back().exact->to_rational());
        if (dev > worst) worst = dev;
    }
    const Fraction agreement(agree, std::max(cfg.queries, 1));
    s.put_int("queries", cfg.queries);
    s.put_frac("agreement", agreement);
    s.put_rat("max_abs_error", worst);
    rec.flag("all_agree", agree == cfg.queries);
    rec.flag("within_tolerance", worst <= r.lambda);
    rec.mean("agreement", agreement.to_rational());

    if (cfg.k <= cfg.d) {
        // the lifted coordinate holding the target monomial correlates perfectly with y
        std::vector<std::uint32_t> mono;
        for (int v : support) mono.push_back(static_cast<std::uint32_t>(v - 1));
        const std::uint64_t pos = idx.position(mono);
        const Rational e = direct.query(parity_query({2 * pos}, true));
        s.put_rat("target_correlation", e);
    }
    if (cfg.transcript) {
        for (const auto& t : direct.transcript()) {
            s.put("transcript." + std::to_string(t.id),
                  t.query + " " + rational_str(t.answer) + " " + (t.exact ? t.exact->str() : std::string("-")));
        }
    }
}

Resolved resolve(const ExperimentConfig& cfg) {
    cfg.validate();
    Resolved r;
    r.source = default_source(cfg);
    r.eta = parse_rational(cfg.eta);
    r.tau = cfg.tau.empty() ? Rational(2) : parse_rational(cfg.tau);
    r.lambda = parse_rational(cfg.lambda);
    r.policy = parse_policy(cfg.policy);
    r.preset = cfg.preset.empty() ? Preset::None : parse_preset(cfg.preset);
    if (r.lambda <= 0) throw InvalidParameter("lambda must be positive");
    if (r.tau <= 0) throw InvalidParameter("tau must be positive");
    if (r.eta < 0 || r.eta >= Rational(1, 2)) throw InvalidParameter("eta must lie in [0, 1/2)");
    if (cfg.command == "check-pseudorandom" && cfg.tau.empty()) throw InvalidParameter("check-pseudorandom needs --tau");
    if (uses_formula(cfg.command)) {
        if (r.source == "file") {
            if (cfg.input_path.empty()) throw InvalidParameter("source 'file' needs --in");
            r.file_formula = parse_xnf(read_text_file(cfg.input_path));
        } else if (r.source == "random" || r.source == "planted") {
            if (cfg.n < 1 || cfg.k < 1 || cfg.m < 1) throw InvalidParameter(cfg.command + " needs --n, --m and --K");
            if (cfg.k > cfg.n) throw InvalidParameter("K must not exceed n");
        } else {
            throw InvalidParameter("unknown source '" + r.source + "' (expected random, planted or file)");
        }
    }
    return r;
}

void provenance(const ExperimentConfig& cfg, const Resolved& r, ReportSection& p) {
    p.put("tool", kToolName);
    p.put("version", kToolVersion);
    p.put_int("report_format", kReportFormatVersion);
    p.put("command", cfg.command);
    p.put("seeds", join(cfg.seeds));
    p.put("config.source", r.source);
    if (!cfg.input_path.empty()) p.put("config.in", cfg.input_path);
    p.put("config.preset", cfg.preset.empty() ? "none" : cfg.preset);
    p.put_int("config.n", cfg.n);
    p.put_uint("config.m", cfg.m);
    p.put_int("config.K", cfg.k);
    p.put_int("config.q", cfg.q);
    p.put_int("config.d", cfg.d);
    p.put_rat("config.eta", r.eta);
    p.put("config.t", cfg.t ? std::to_string(*cfg.t) : "default");
    p.put_rat("config.tau", r.tau);
    p.put_bool("config.strict_paper_rho", cfg.strict_paper_rho);
    p.put_bool("config.streaming_freq", cfg.streaming_freq);
    p.put_bool("config.truncated_lift", cfg.truncated_lift);
    if (cfg.command == "fit" || cfg.command == "distinguish") {
        p.put_int("config.epochs", cfg.epochs);
        p.put_real("config.c", cfg.c);
    }
    if (cfg.command == "sq-sim") {
        p.put_rat("config.lambda", r.lambda);
        p.put("config.policy", policy_name(r.policy));
        p.put_int("config.queries", cfg.queries);
    }
}

void aggregate(const std::vector<SeedRecord>& recs, const std::vector<char>& ok, ReportSection& a) {
    const auto total = static_cast<std::int64_t>(recs.size());
    const auto good = static_cast<std::int64_t>(std::count(ok.begin(), ok.end(), char{1}));
    a.put_int("seeds", total);
    a.put_frac("ok", Fraction(good, total));
    std::vector<std::string> mean_keys, flag_keys;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        if (!ok[i]) continue;
        for (const auto& [k, v] : recs[i].means) {
            if (std::find(mean_keys.begin(), mean_keys.end(), k) == mean_keys.end()) mean_keys.push_back(k);
        }
        for (const auto& [k, v] : recs[i].flags) {
            if (std::find(flag_keys.begin(), flag_keys.end(), k) == flag_keys.end()) flag_keys.push_back(k);
        }
    }
    for (const auto& key : mean_keys) {
        Rational sum = 0;
        std::int64_t count = 0;
        for (std::size_t i = 0; i < recs.size(); ++i) {
            if (!ok[i]) continue;
            for (const auto& [k, v] : recs[i].means) {
                if (k == key) {
                    sum += v;
                    ++count;
                }
            }
        }
        const Rational mean = sum / count;
        a.put_rat("mean." + key, mean);
        a.put_real("mean." + key + ".approx", to_double(mean));
    }
    for (const auto& key : flag_keys) {
        std::int64_t yes = 0, count = 0;
        for (std::size_t i = 0; i < recs.size(); ++i) {
            if (!ok[i]) continue;
            for (const auto& [k, v] : recs[i].flags) {
                if (k == key) {
                    yes += v;
                    ++count;
                }
            }
        }
        a.put_frac("count." + key, Fraction(yes, count));
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    if (!is_command(command)) throw InvalidParameter("unknown command '" + command + "'");
    if (seeds.empty()) throw InvalidParameter("at least one seed is required");
    std::set<std::uint64_t> uniq(seeds.begin(), seeds.end());
    if (uniq.size() != seeds.size()) throw InvalidParameter("seeds must be distinct");
    if (epochs < 1) throw InvalidParameter("epochs must be at least 1");
    if (queries < 0) throw InvalidParameter("queries must be nonnegative");
    if (command == "realize-poly" && (k < 1 || d < 1 || d > k)) throw InvalidParameter("realize-poly needs 1 <= d <= K");
    if (command == "sq-sim") {
        if (n < 1 || n > 20) throw InvalidParameter("sq-sim needs 1 <= n <= 20");
        if (k < 1 || k > n) throw InvalidParameter("sq-sim needs 1 <= K <= n");
        if (d < 1) throw InvalidParameter("sq-sim needs d >= 1");
    }
}

Report run_experiment(const ExperimentConfig& cfg) {
    const Resolved r = resolve(cfg);
    Report report;
    provenance(cfg, r, report.provenance);

    std::vector<SeedRecord> recs(cfg.seeds.size());
    std::vector<char> ok(cfg.seeds.size(), 0);
    parallel_for(cfg.seeds.size(), [&](std::size_t i) {
        const std::uint64_t seed = cfg.seeds[i];
        SeedRecord rec;
        rec.section = ReportSection("seed " + std::to_string(seed));
        rec.section.put_uint("seed", seed);
        rec.section.put("status", "ok");
        try {
            if (cfg.command == "realize-poly") run_realize_poly(cfg, seed, rec);
            else if (cfg.command == "sq-sim") run_sq_sim(cfg, r, seed, rec);
            else run_formula_command(cfg, r, seed, rec);
            ok[i] = 1;
        } catch (const std::exception& e) {
            rec = SeedRecord{ReportSection("seed " + std::to_string(seed)), {}, {}};
            rec.section.put_uint("seed", seed);
            rec.section.put("status", "error");
            rec.section.put("error", e.what());
        }
        recs[i] = std::move(rec);
    });
    for (auto& rec : recs) report.seeds.push_back(std::move(rec.section));
    aggregate(recs, ok, report.aggregate);
    return report;
}

}  // namespace xorhalf
