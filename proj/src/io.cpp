#include "xorhalf/io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "xorhalf/errors.hpp"

namespace xorhalf {

namespace {

struct Line {
    std::size_t number = 0;
    std::vector<std::string_view> tokens;
};

std::vector<std::string_view> split(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

// Non-comment lines. Blank lines are kept only when `keep_blank`.
std::vector<Line> content_lines(std::string_view text, bool keep_blank) {
    std::vector<Line> out;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        ++number;
        const std::string_view raw = text.substr(pos, end - pos);
        auto tokens = split(raw);
        const bool comment = !tokens.empty() && tokens[0][0] == 'c';
        if (!comment && (!tokens.empty() || keep_blank)) out.push_back({number, std::move(tokens)});
        if (end == text.size()) break;
        pos = end + 1;
    }
    // a trailing newline does not start an entry
    while (keep_blank && !out.empty() && out.back().tokens.empty() && out.back().number == number) out.pop_back();
    return out;
}

template <typename T>
T parse_int(std::string_view tok, std::size_t line, const char* what) {
    if (!tok.empty() && tok[0] == '+') tok.remove_prefix(1);
    T v{};
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || tok.empty()) {
        throw ParseError(line, std::string("expected ") + what + ", got '" + std::string(tok) + "'");
    }
    return v;
}

int parse_label(std::string_view tok, std::size_t line) {
    const int y = parse_int<int>(tok, line, "a label");
    if (y != 1 && y != -1) throw ParseError(line, "label must be +1 or -1");
    return y;
}

const Line& header_line(const std::vector<Line>& lines, std::string_view kind, std::size_t fields) {
    if (lines.empty()) throw ParseError(1, "missing 'p " + std::string(kind) + "' header");
    const Line& h = lines.front();
    if (h.tokens.size() != fields || h.tokens[0] != "p" || h.tokens[1] != kind) {
        throw ParseError(h.number, "malformed header (expected 'p " + std::string(kind) + " ...')");
    }
    return h;
}

std::size_t last_line(std::string_view text) {
    std::size_t n = 1;
    for (char ch : text) n += ch == '\n';
    return n;
}

}  // namespace

XorFormula parse_xnf(std::string_view text) {
    const auto lines = content_lines(text, false);
    const Line& h = header_line(lines, "xnf", 5);
    const int n = parse_int<int>(h.tokens[2], h.number, "n");
    const auto m = parse_int<std::size_t>(h.tokens[3], h.number, "m");
    const int k = parse_int<int>(h.tokens[4], h.number, "K");
    if (n < 1 || k < 1 || k > n) throw ParseError(h.number, "header needs 1 <= K <= n");
    if (lines.size() - 1 != m) {
        const std::size_t at = lines.size() - 1 > m ? lines[m + 1].number : last_line(text);
        throw ParseError(at, "header declares " + std::to_string(m) + " tuples, found " + std::to_string(lines.size() - 1));
    }
    std::vector<KTuple> tuples;
    tuples.reserve(m);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const Line& l = lines[i];
        if (l.tokens.size() != static_cast<std::size_t>(k) + 1 || l.tokens.back() != "0") {
            throw ParseError(l.number, "expected " + std::to_string(k) + " literals followed by 0");
        }
        std::vector<Literal> lits;
        std::set<int> seen;
        for (int s = 0; s < k; ++s) {
            const int v = parse_int<int>(l.tokens[static_cast<std::size_t>(s)], l.number, "a literal");
            if (v == 0) throw ParseError(l.number, "literal 0 before the end of the tuple");
            const int var = v < 0 ? -v : v;
            if (var > n) throw ParseError(l.number, "variable " + std::to_string(var) + " exceeds n = " + std::to_string(n));
            if (!seen.insert(var).second) {
                throw ValidationError("line " + std::to_string(l.number) + ": variable " + std::to_string(var) +
                                      " repeats within a tuple");
            }
            lits.push_back({var, v < 0 ? -1 : 1});
        }
        tuples.emplace_back(std::move(lits));
    }
    return XorFormula(n, k, std::move(tuples));
}

std::string emit_xnf(const XorFormula& j) {
    std::ostringstream os;
    os << "p xnf " << j.n() << ' ' << j.m() << ' ' << j.k() << '\n';
    for (const auto& c : j.tuples()) {
        for (const auto& lit : c.literals()) os << lit.sign * lit.var << ' ';
        os << "0\n";
    }
    return os.str();
}

SampleFile parse_sample(std::string_view text) {
    const auto lines = content_lines(text, true);
    std::size_t first = 0;
    while (first < lines.size() && lines[first].tokens.empty()) ++first;
    const std::vector<Line> body(lines.begin() + static_cast<std::ptrdiff_t>(first), lines.end());
    const Line& h = header_line(body, "sample", 5);
    const auto dim = parse_int<std::uint64_t>(h.tokens[2], h.number, "dim");
    const auto m = parse_int<std::size_t>(h.tokens[3], h.number, "m");
    SampleFile out;
    if (h.tokens[4] == "ternary") out.kind = SampleKind::Ternary;
    else if (h.tokens[4] == "binary") out.kind = SampleKind::Binary;
    else throw ParseError(h.number, "sample kind must be ternary or binary");
    if (dim == 0) throw ParseError(h.number, "dim must be positive");
    if (body.size() - 1 != m) {
        const std::size_t at = body.size() - 1 > m ? body[m + 1].number : last_line(text);
        throw ParseError(at, "header declares " + std::to_string(m) + " entries, found " + std::to_string(body.size() - 1));
    }

    if (out.kind == SampleKind::Ternary) {
        std::vector<TernaryEntry> entries;
        entries.reserve(m);
        for (std::size_t i = 1; i < body.size(); ++i) {
            const Line& l = body[i];
            TernaryEntry e;
            if (l.tokens.empty()) throw ParseError(l.number, "entry needs a label");
            e.label = parse_label(l.tokens[0], l.number);
            for (std::size_t t = 1; t < l.tokens.size(); ++t) {
                const auto tok = l.tokens[t];
                const auto colon = tok.find(':');
                if (colon == std::string_view::npos) throw ParseError(l.number, "expected index:value, got '" + std::string(tok) + "'");
                const auto idx = parse_int<std::uint64_t>(tok.substr(0, colon), l.number, "an index");
                const int v = parse_int<int>(tok.substr(colon + 1), l.number, "a value");
                if (v != 1 && v != -1) throw ParseError(l.number, "stored values must be +1 or -1");
                if (idx >= dim) {
                    throw ValidationError("line " + std::to_string(l.number) + ": index " + std::to_string(idx) +
                                          " >= dim " + std::to_string(dim));
                }
                if (!e.nonzeros.empty() && e.nonzeros.back().first >= idx) {
                    throw ValidationError("line " + std::to_string(l.number) + ": indices must strictly ascend");
                }
                e.nonzeros.emplace_back(static_cast<std::uint32_t>(idx), static_cast<std::int8_t>(v));
            }
            entries.push_back(std::move(e));
        }
        out.ternary.emplace(dim, std::move(entries));
        return out;
    }

    if (dim > BinarySample::kMaxDenseRow) throw ResourceLimit("binary sample dimension too large to load");
    std::vector<std::vector<std::int8_t>> rows;
    std::vector<int> labels;
    rows.reserve(m);
    labels.reserve(m);
    for (std::size_t i = 1; i < body.size(); ++i) {
        const Line& l = body[i];
        if (l.tokens.empty()) throw ParseError(l.number, "entry needs a label");
        labels.push_back(parse_label(l.tokens[0], l.number));
        std::vector<std::int8_t> row;
        row.reserve(dim);
        int prev = 0;
        for (std::size_t t = 1; t < l.tokens.size(); ++t) {
            const auto tok = l.tokens[t];
            if (tok.size() < 2 || (tok[0] != '+' && tok[0] != '-')) {
                throw ParseError(l.number, "expected a signed run length, got '" + std::string(tok) + "'");
            }
            const int sign = tok[0] == '+' ? 1 : -1;
            const auto run = parse_int<std::uint64_t>(tok.substr(1), l.number, "a run length");
            if (run == 0) throw ParseError(l.number, "run lengths must be positive");
            if (sign == prev) throw ParseError(l.number, "consecutive runs must alternate sign");
            if (run > dim - row.size()) {
                throw ValidationError("line " + std::to_string(l.number) + ": runs exceed dim " + std::to_string(dim));
            }
            row.insert(row.end(), run, static_cast<std::int8_t>(sign));
            prev = sign;
        }
        if (row.size() != dim) {
            throw ValidationError("line " + std::to_string(l.number) + ": runs cover " + std::to_string(row.size()) +
                                  " of dim " + std::to_string(dim));
        }
        rows.push_back(std::move(row));
    }
    out.binary.emplace(dim, rows, std::move(labels));
    return out;
}

std::string emit_sample(const TernarySample& s) {
    std::ostringstream os;
    os << "p sample " << s.dim() << ' ' << s.size() << " ternary\n";
    for (const auto& e : s.entries()) {
        os << (e.label > 0 ? "+1" : "-1");
        for (const auto& [idx, v] : e.nonzeros) os << ' ' << idx << ':' << static_cast<int>(v);
        os << '\n';
    }
    return os.str();
}

std::string emit_sample(const BinarySample& s) {
    std::ostringstream os;
    os << "p sample " << s.dim() << ' ' << s.size() << " binary\n";
    for (std::size_t j = 0; j < s.size(); ++j) {
        os << (s.label(j) > 0 ? "+1" : "-1");
        std::uint64_t run = 0;
        int cur = 0;
        for (std::uint64_t p = 0; p < s.dim(); ++p) {
            const int v = s.value(j, p);
            if (v == cur) {
                ++run;
                continue;
            }
            if (run > 0) os << ' ' << (cur > 0 ? '+' : '-') << run;
            cur = v;
            run = 1;
        }
        os << ' ' << (cur > 0 ? '+' : '-') << run << '\n';
    }
    return os.str();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidInput("cannot open '" + path + "' for reading");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw InvalidInput("write to '" + path + "' failed");
}

}  // namespace xorhalf
