#include "mramrng/report.hpp"

#include <cstdio>
#include <sstream>

namespace mramrng {

nlohmann::json test_result_json(const TestResult& r) {
    nlohmann::json j;
    j["record"] = "test";
    j["test_name"] = r.test_name;
    j["p_values"] = r.p_values;
    j["passed"] = r.skipped() ? nlohmann::json(nullptr) : nlohmann::json(r.passed());
    j["status"] = to_string(r.status);
    j["params"] = nlohmann::json::object();
    for (const auto& [k, v] : r.params) j["params"][k] = v;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

nlohmann::json summary_json(const BatteryReport& report) {
    return {
        {"record", "summary"},
        {"failure_count", report.failure_count},
        {"verdict", to_string(report.verdict)},
        {"alpha", report.alpha},
        {"input_bits", report.input_length},
        {"fail_threshold", report.fail_threshold},
        {"pvalue_failure_count", report.pvalue_failure_count},
        {"pvalue_count", report.pvalue_count},
        {"skipped_count", report.skipped_count},
    };
}

std::string report_json_lines(const BatteryReport& report) {
    std::string out;
    for (const auto& r : report.results) out += test_result_json(r).dump() + "\n";
    out += summary_json(report).dump() + "\n";
    return out;
}

std::string report_table(const BatteryReport& report) {
    std::ostringstream os;
    char line[160];
    std::snprintf(line, sizeof line, "%-22s %-12s %s\n", "test", "p-value", "result");
    os << line << std::string(44, '-') << '\n';
    for (const auto& r : report.results) {
        if (r.skipped()) {
            std::snprintf(line, sizeof line, "%-22s %-12s %s\n", r.test_name.c_str(), "-", "skipped");
        } else {
            std::snprintf(line, sizeof line, "%-22s %-12.6f %s\n", r.test_name.c_str(), r.p_values.front(),
                          to_string(r.status));
        }
        os << line;
    }
    os << std::string(44, '-') << '\n';
    os << "input bits: " << report.input_length << ", alpha: " << report.alpha << '\n';
    os << "failures: " << report.failure_count << " (threshold " << report.fail_threshold << "), skipped: "
       << report.skipped_count << '\n';
    os << "verdict: " << to_string(report.verdict) << '\n';
    return os.str();
}

} // namespace mramrng
