#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "xorhalf/numeric.hpp"

namespace xorhalf {

inline constexpr const char* kToolName = "xorhalf";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportFormatVersion = 1;

/// Ordered key/value block. Values are kept as their serialized text.
class ReportSection {
public:
    explicit ReportSection(std::string name = {}) : name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }
    const std::vector<std::pair<std::string, std::string>>& fields() const noexcept { return fields_; }

    void put(const std::string& key, std::string value);
    void put_int(const std::string& key, std::int64_t v);
    void put_uint(const std::string& key, std::uint64_t v);
    void put_bool(const std::string& key, bool v);
    /// "a/b" with the stored denominator.
    void put_frac(const std::string& key, const Fraction& f);
    /// "p/q" in lowest terms.
    void put_rat(const std::string& key, const Rational& r);
    /// Shortest round-trip decimal.
    void put_real(const std::string& key, double v);

    /// Value for `key`, or nullptr.
    const std::string* find(const std::string& key) const;

private:
    std::string name_;
    std::vector<std::pair<std::string, std::string>> fields_;
};

struct Report {
    ReportSection provenance{"provenance"};
    std::vector<ReportSection> seeds;
    ReportSection aggregate{"aggregate"};

    /// Line-oriented text: a versioned header, then "[section]" blocks of "key = value".
    std::string to_text() const;
    std::string to_json() const;
};

std::string real_str(double v);

}  // namespace xorhalf
