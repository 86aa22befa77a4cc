#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <regex>

#include "json.hpp"

#include "support.hpp"
#include "xorhalf/errors.hpp"
#include "xorhalf/experiment.hpp"
#include "xorhalf/io.hpp"
#include "xorhalf/reduction.hpp"

using namespace xorhalf;
using xtest::tuple;

namespace {

std::size_t parse_error_line(const std::string& text) {
    try {
        parse_xnf(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

std::size_t sample_error_line(const std::string& text) {
    try {
        parse_sample(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return 0;
}

ExperimentConfig golden_reduce() {
    ExperimentConfig c;
    c.command = "reduce";
    c.seeds = {0, 1, 2};
    c.n = 8;
    c.m = 60;
    c.k = 3;
    c.q = 3;
    c.d = 2;
    c.eta = "1/10";
    return c;
}

struct ThreadsGuard {
    explicit ThreadsGuard(const char* v) { setenv("XORHALF_THREADS", v, 1); }
    ~ThreadsGuard() { unsetenv("XORHALF_THREADS"); }
};

}  // namespace

TEST_CASE("xnf examples") {
    const auto j = parse_xnf("p xnf 3 1 2\n1 -3 0\n");
    CHECK(j.n() == 3);
    CHECK(j.k() == 2);
    REQUIRE(j.m() == 1);
    CHECK(j[0] == tuple({1, -3}));

    const std::string canonical = read_text_file("tests/data/small.xnf");
    CHECK(emit_xnf(parse_xnf(canonical)) == canonical);

    const auto commented = parse_xnf(read_text_file("tests/data/commented.xnf"));
    CHECK(commented == XorFormula(3, 2, {tuple({1, -3}), tuple({-2, 1})}));
    CHECK(emit_xnf(commented) == "p xnf 3 2 2\n1 -3 0\n-2 1 0\n");

    CHECK_THROWS_AS(parse_xnf("p xnf 3 1 2\n1 1 0\n"), ValidationError);
    CHECK_THROWS_WITH_AS(parse_xnf("p xnf 3 1 2\n-2 2 0\n"), "line 2: variable 2 repeats within a tuple", ValidationError);
}

TEST_CASE("xnf errors carry line numbers") {
    CHECK(parse_error_line("") == 1);
    CHECK(parse_error_line("p cnf 3 1 2\n1 2 0\n") == 1);
    CHECK(parse_error_line("p xnf 3 x 2\n1 2 0\n") == 1);
    CHECK(parse_error_line("p xnf 3 1 4\n") == 1);
    CHECK(parse_error_line("p xnf 3 2 2\n1 2 0\n1 2\n") == 3);
    CHECK(parse_error_line("p xnf 3 2 2\n1 2 0\nc note\n1 0 2 0\n") == 4);
    CHECK(parse_error_line("p xnf 3 1 2\n1 4 0\n") == 2);
    CHECK(parse_error_line("p xnf 3 1 2\n1 2 0\n2 3 0\n") == 3);
    CHECK(parse_error_line("p xnf 3 2 2\n1 2 0\n") == 3);
    CHECK(parse_error_line("p xnf 3 1 2\n1 two 0\n") == 2);
}

TEST_CASE("xnf round trip on random formulas") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const int n = 3 + static_cast<int>(seed % 9);
        const int k = 1 + static_cast<int>(seed % 3);
        const auto j = gen_random_formula(n, 50 + seed, k, seed);
        const std::string text = emit_xnf(j);
        const auto back = parse_xnf(text);
        CHECK(back == j);
        CHECK(emit_xnf(back) == text);
    }
}

TEST_CASE("sample examples") {
    const auto s = parse_sample("p sample 4 1 ternary\n+1 0:1 3:-1\n");
    REQUIRE(s.ternary);
    CHECK(s.kind == SampleKind::Ternary);
    CHECK(s.ternary->dim() == 4);
    REQUIRE(s.ternary->size() == 1);
    CHECK(s.ternary->dense(0) == std::vector<std::int8_t>{1, 0, 0, -1});
    CHECK((*s.ternary)[0].label == 1);

    const auto blank = parse_sample("p sample 3 2 ternary\n-1\n+1 2:1\n");
    CHECK(blank.ternary->dense(0) == std::vector<std::int8_t>{0, 0, 0});
    CHECK((*blank.ternary)[0].label == -1);

    CHECK_THROWS_AS(parse_sample("p sample 4 1 ternary\n+1 4:1\n"), ValidationError);
    CHECK_THROWS_AS(parse_sample("p sample 4 1 ternary\n+1 2:1 1:1\n"), ValidationError);
    CHECK(sample_error_line("p sample 4 1 ternary\n+1 0:2\n") == 2);
    CHECK(sample_error_line("p sample 4 1 ternary\n0 0:1\n") == 2);
    CHECK(sample_error_line("p sample 4 1 dense\n+1\n") == 1);
    CHECK(sample_error_line("p sample 4 2 ternary\n+1\n") == 3);

    for (const char* path : {"tests/data/small_ternary.sample", "tests/data/small_binary.sample"}) {
        const std::string text = read_text_file(path);
        const auto f = parse_sample(text);
        CHECK((f.ternary ? emit_sample(*f.ternary) : emit_sample(*f.binary)) == text);
    }
    const auto bin = parse_sample(read_text_file("tests/data/small_binary.sample"));
    REQUIRE(bin.binary);
    CHECK(bin.binary->row(1) == std::vector<std::int8_t>{-1, -1, 1, -1, -1, -1});
    CHECK(bin.binary->label(1) == -1);

    CHECK_THROWS_AS(parse_sample("p sample 4 1 binary\n+1 +3\n"), ValidationError);
    CHECK_THROWS_AS(parse_sample("p sample 4 1 binary\n+1 +3 -2\n"), ValidationError);
    CHECK(sample_error_line("p sample 4 1 binary\n+1 +2 +2\n") == 2);
    CHECK(sample_error_line("p sample 4 1 binary\n+1 +0 -4\n") == 2);
    CHECK(sample_error_line("p sample 4 1 binary\n+1 2 -2\n") == 2);
}

TEST_CASE("binary sample round trip on 10^4 random entries") {
    const std::uint64_t dim = 53;
    Engine eng = make_engine(8, StreamTag::Fixture);
    std::vector<std::vector<std::int8_t>> rows(10000, std::vector<std::int8_t>(dim));
    std::vector<int> labels(rows.size());
    for (std::size_t j = 0; j < rows.size(); ++j) {
        // sticky bits give runs of varied length
        std::int8_t cur = 1;
        for (auto& v : rows[j]) {
            if (uniform_below(eng, 4) == 0) cur = static_cast<std::int8_t>(-cur);
            v = cur;
        }
        labels[j] = fair_coin(eng) ? -1 : 1;
    }
    const BinarySample s(dim, rows, labels);
    const std::string text = emit_sample(s);
    const auto back = parse_sample(text);
    REQUIRE(back.binary);
    CHECK(emit_sample(*back.binary) == text);
    for (std::size_t j = 0; j < rows.size(); ++j) {
        REQUIRE(back.binary->row(j) == rows[j]);
        REQUIRE(back.binary->label(j) == labels[j]);
    }
}

TEST_CASE("lazy and packed lifts serialize identically") {
    auto res = run_pipeline(gen_planted_formula(4, 20, 2, Rational(0), 3), [] {
        PipelineParams p;
        p.q = 1;
        p.d = 2;
        p.t = 2;
        return p;
    }());
    const auto lazy = BinarySample::lifted_view(res.ternary, res.index);
    CHECK(emit_sample(lazy) == emit_sample(res.binary));
    const std::string ternary = emit_sample(*res.ternary);
    CHECK(emit_sample(*parse_sample(ternary).ternary) == ternary);
}

TEST_CASE("report layout") {
    Report r;
    r.provenance.put("tool", "xorhalf");
    ReportSection s("seed 4");
    s.put_frac("value", Fraction(6, 8));
    s.put_rat("ratio", Rational(6, 8));
    s.put_rat("whole", Rational(3));
    s.put_bool("ok", true);
    s.put_real("bound", 0.1);
    s.put("note", "two\nlines");
    r.seeds.push_back(s);
    r.aggregate.put_int("seeds", 1);
    CHECK(r.to_text() ==
          "# xorhalf-report v1\n[provenance]\ntool = xorhalf\n[seed 4]\nvalue = 6/8\nratio = 3/4\nwhole = 3/1\nok = true\n"
          "bound = 0.1\nnote = two lines\n[aggregate]\nseeds = 1\n");
    s.put("value", "7/8");
    CHECK(*s.find("value") == "7/8");
    CHECK(s.find("missing") == nullptr);
    CHECK_THROWS_AS(s.put("bad key", "x"), InvalidInput);

    const auto j = nlohmann::json::parse(r.to_json());
    CHECK(j["format"] == "xorhalf-report");
    CHECK(j["version"] == 1);
    CHECK(j["seeds"][0]["value"] == "6/8");
    CHECK(j["aggregate"]["seeds"] == "1");
}

TEST_CASE("seed lists") {
    CHECK(parse_seed_list("3") == std::vector<std::uint64_t>{3});
    CHECK(parse_seed_list("0-3") == std::vector<std::uint64_t>{0, 1, 2, 3});
    CHECK(parse_seed_list("5,1,7-8") == std::vector<std::uint64_t>{5, 1, 7, 8});
    CHECK_THROWS_AS(parse_seed_list("4-2"), InvalidParameter);
    CHECK_THROWS_AS(parse_seed_list("a"), InvalidParameter);
    CHECK_THROWS_AS(parse_seed_list(""), InvalidParameter);
}

TEST_CASE("reports are reproducible and match the golden file") {
    const ExperimentConfig cfg = golden_reduce();
    std::string one, many;
    {
        ThreadsGuard g("1");
        one = run_experiment(cfg).to_text();
    }
    {
        ThreadsGuard g("4");
        many = run_experiment(cfg).to_text();
    }
    CHECK(one == many);
    CHECK(one == read_text_file("tests/data/reduce_golden.report"));
    CHECK(run_experiment(cfg).to_json() == run_experiment(cfg).to_json());

    // every fraction-valued field is written as a/b
    const std::regex frac("^-?[0-9]+/[0-9]+$");
    const auto report = run_experiment(cfg);
    for (const auto& s : report.seeds) {
        for (const char* key : {"witness_error", "mismatch_fraction", "unbalanced_fraction", "tau", "eta"}) {
            REQUIRE(s.find(key));
            CHECK(std::regex_match(*s.find(key), frac));
        }
    }
}

TEST_CASE("reduce reports the witness decomposition per seed") {
    ExperimentConfig cfg;
    cfg.command = "reduce";
    cfg.seeds = {0, 1, 2};
    cfg.n = 30;
    cfg.m = 600;
    cfg.k = 6;
    cfg.q = 5;
    cfg.d = 4;
    cfg.eta = "0.05";
    cfg.truncated_lift = true;
    const auto r = run_experiment(cfg);
    REQUIRE(r.seeds.size() == 3);
    for (const auto& s : r.seeds) {
        CHECK(*s.find("status") == "ok");
        CHECK(*s.find("lift.storage") == "lazy");
        CHECK(*s.find("decomposition_holds") == "true");
        CHECK(s.find("witness_error"));
        CHECK(s.find("mismatch_fraction"));
        CHECK(s.find("unbalanced_fraction"));
    }
    CHECK(*r.aggregate.find("count.decomposition_holds") == "3/3");
    CHECK(*r.provenance.find("config.eta") == "1/20");
}

TEST_CASE("refute reports every planted eta = 0 instance as SAT") {
    ExperimentConfig cfg;
    cfg.command = "refute";
    cfg.seeds = parse_seed_list("0-19");
    cfg.n = 50;
    cfg.m = 150;
    cfg.k = 3;
    const auto r = run_experiment(cfg);
    CHECK(*r.aggregate.find("count.sat") == "20/20");
    CHECK(*r.aggregate.find("count.verified") == "20/20");
    for (const auto& s : r.seeds) CHECK(*s.find("value") == "150/150");
}

TEST_CASE("every command runs") {
    for (const auto& command : experiment_commands()) {
        ExperimentConfig cfg;
        cfg.command = command;
        cfg.seeds = {1, 2};
        cfg.n = 6;
        cfg.m = 60;
        cfg.k = 2;
        cfg.d = 2;
        cfg.tau = "1/4";
        cfg.epochs = 5;
        cfg.queries = 12;
        cfg.transcript = true;
        const auto r = run_experiment(cfg);
        INFO(command);
        CHECK(*r.provenance.find("command") == command);
        CHECK(*r.aggregate.find("ok") == "2/2");
        for (const auto& s : r.seeds) CHECK(*s.find("status") == "ok");
    }
    ExperimentConfig sq;
    sq.command = "sq-sim";
    sq.n = 8;
    sq.k = 2;
    sq.d = 2;
    sq.queries = 30;
    sq.transcript = true;
    const auto r = run_experiment(sq);
    CHECK(*r.seeds[0].find("all_agree") == "true");
    CHECK(*r.seeds[0].find("target_correlation") == "1/1");
    CHECK(r.seeds[0].find("transcript.29"));
}

TEST_CASE("gen commands and file input") {
    ExperimentConfig gen;
    gen.command = "gen-planted";
    gen.seeds = {7};
    gen.n = 10;
    gen.m = 40;
    gen.k = 3;
    gen.eta = "1/8";
    gen.emit_prefix = "build/harness_test";
    const auto r = run_experiment(gen);
    CHECK(*r.seeds[0].find("flipped") == "5");
    CHECK(*r.seeds[0].find("planted_value") == "35/40");
    const std::string path = *r.seeds[0].find("file");
    CHECK(path == "build/harness_test.7.xnf");
    const auto planted = gen_planted_formula(10, 40, 3, Rational(1, 8), 7);
    CHECK(parse_xnf(read_text_file(path)) == planted.formula);

    ExperimentConfig value;
    value.command = "value";
    value.input_path = path;
    const auto v = run_experiment(value);
    CHECK(*v.provenance.find("config.source") == "file");
    CHECK(brute_force_value(planted.formula).value.str() == *v.seeds[0].find("value"));
}

TEST_CASE("configuration errors throw, seed failures are recorded") {
    ExperimentConfig bad;
    bad.command = "solve";
    CHECK_THROWS_AS(run_experiment(bad), InvalidParameter);
    bad.command = "value";
    bad.seeds = {1, 1};
    bad.n = 4;
    bad.m = 4;
    bad.k = 2;
    CHECK_THROWS_AS(run_experiment(bad), InvalidParameter);
    bad.seeds = {1};
    bad.eta = "1/2";
    CHECK_THROWS_AS(run_experiment(bad), InvalidParameter);
    bad.eta = "0";
    bad.source = "file";
    CHECK_THROWS_AS(run_experiment(bad), InvalidParameter);
    bad.input_path = "tests/data/missing.xnf";
    CHECK_THROWS_AS(run_experiment(bad), InvalidInput);

    ExperimentConfig cp;
    cp.command = "check-pseudorandom";
    cp.n = 4;
    cp.m = 10;
    cp.k = 2;
    CHECK_THROWS_AS(run_experiment(cp), InvalidParameter);

    // n past the exhaustive limit fails inside each seed
    ExperimentConfig big;
    big.command = "value";
    big.seeds = {0, 1};
    big.n = 30;
    big.m = 10;
    big.k = 3;
    const auto r = run_experiment(big);
    CHECK(*r.seeds[0].find("status") == "error");
    CHECK(r.seeds[0].find("error"));
    CHECK(*r.aggregate.find("ok") == "0/2");
}
