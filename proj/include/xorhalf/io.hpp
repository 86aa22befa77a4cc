#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "xorhalf/formula.hpp"
#include "xorhalf/sample.hpp"

namespace xorhalf {

// Formula text:
//   p xnf <n> <m> <K>
//   <K signed variable indices> 0       (m lines)
// Lines starting with 'c' are comments; blank lines are ignored.

/// Throws ParseError (with line) on syntax, ValidationError on a repeated variable.
XorFormula parse_xnf(std::string_view text);
std::string emit_xnf(const XorFormula& j);

// Sample text:
//   p sample <dim> <m> <ternary|binary>
// ternary entry: <label> <index>:<+-1> ...   (indices ascending, zeros omitted)
// binary entry:  <label> <+run|-run> ...     (alternating runs summing to dim)

enum class SampleKind { Ternary, Binary };

struct SampleFile {
    SampleKind kind = SampleKind::Ternary;
    std::optional<TernarySample> ternary;
    std::optional<BinarySample> binary;
};

SampleFile parse_sample(std::string_view text);
std::string emit_sample(const TernarySample& s);
std::string emit_sample(const BinarySample& s);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace xorhalf
