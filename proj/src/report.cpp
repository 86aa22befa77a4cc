#include "xorhalf/report.hpp"

#include <charconv>
#include <sstream>

#include "json.hpp"

#include "xorhalf/errors.hpp"

namespace xorhalf {

std::string real_str(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void ReportSection::put(const std::string& key, std::string value) {
    if (key.empty() || key.find_first_of(" =\n[]") != std::string::npos) throw InvalidInput("bad report key '" + key + "'");
    for (char& ch : value) {
        if (ch == '\n' || ch == '\r') ch = ' ';
    }
    for (auto& [k, v] : fields_) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    fields_.emplace_back(key, std::move(value));
}

void ReportSection::put_int(const std::string& key, std::int64_t v) { put(key, std::to_string(v)); }
void ReportSection::put_uint(const std::string& key, std::uint64_t v) { put(key, std::to_string(v)); }
void ReportSection::put_bool(const std::string& key, bool v) { put(key, v ? "true" : "false"); }
void ReportSection::put_frac(const std::string& key, const Fraction& f) { put(key, f.str()); }
void ReportSection::put_rat(const std::string& key, const Rational& r) { put(key, rational_str(r)); }
void ReportSection::put_real(const std::string& key, double v) { put(key, real_str(v)); }

const std::string* ReportSection::find(const std::string& key) const {
    for (const auto& [k, v] : fields_) {
        if (k == key) return &v;
    }
    return nullptr;
}

std::string Report::to_text() const {
    std::ostringstream os;
    os << "# " << kToolName << "-report v" << kReportFormatVersion << '\n';
    auto block = [&](const ReportSection& s) {
        os << '[' << s.name() << "]\n";
        for (const auto& [k, v] : s.fields()) os << k << " = " << v << '\n';
    };
    block(provenance);
    for (const auto& s : seeds) block(s);
    block(aggregate);
    return os.str();
}

std::string Report::to_json() const {
    using nlohmann::ordered_json;
    auto obj = [](const ReportSection& s) {
        ordered_json o = ordered_json::object();
        for (const auto& [k, v] : s.fields()) o[k] = v;
        return o;
    };
    ordered_json j;
    j["format"] = std::string(kToolName) + "-report";
    j["version"] = kReportFormatVersion;
    j["provenance"] = obj(provenance);
    j["seeds"] = ordered_json::array();
    for (const auto& s : seeds) j["seeds"].push_back(obj(s));
    j["aggregate"] = obj(aggregate);
    return j.dump(2) + "\n";
}

}  // namespace xorhalf
