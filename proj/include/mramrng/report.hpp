#pragma once

#include "mramrng/stats.hpp"

#include <json.hpp>

#include <string>

namespace mramrng {

// Battery report, JSON Lines. One object per test:
//   {"record":"test","test_name":...,"p_values":[...],"passed":bool,
//    "status":"pass|fail|skipped","params":{...},"note":...}
// followed by one summary object:
//   {"record":"summary","failure_count":N,"verdict":"Pass|Fail","alpha":a,
//    "input_bits":n,"fail_threshold":t,"pvalue_failure_count":...,
//    "pvalue_count":...,"skipped_count":...}
// Skipped tests carry "passed":null.
std::string report_json_lines(const BatteryReport& report);

nlohmann::json test_result_json(const TestResult& r);
nlohmann::json summary_json(const BatteryReport& report);

std::string report_table(const BatteryReport& report);

} // namespace mramrng
