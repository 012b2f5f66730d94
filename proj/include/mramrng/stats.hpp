#pragma once

#include "mramrng/bits.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace mramrng {

namespace special {

/// Complementary error function.
double erfc(double x);
/// Regularized upper incomplete gamma Q(a, x).
double igamc(double a, double x);

} // namespace special

enum class TestStatus { Passed, Failed, Skipped };

const char* to_string(TestStatus status) noexcept;

struct TestResult {
    std::string test_name;
    std::vector<double> p_values; // empty only when skipped
    std::vector<std::pair<std::string, double>> params;
    TestStatus status = TestStatus::Skipped;
    std::string note; // skip reason or precondition message

    bool passed() const noexcept { return status == TestStatus::Passed; }
    bool failed() const noexcept { return status == TestStatus::Failed; }
    bool skipped() const noexcept { return status == TestStatus::Skipped; }
};

/// Knobs shared by every test. The floors default to the usual minimum
/// sequence lengths; the fixed-vector checks lower them.
struct TestOptions {
    double alpha = 0.01;
    std::size_t min_length = 100;
    std::size_t min_block_size = 20;
    std::size_t min_spectral_length = 1000;
    std::size_t min_longest_run_length = 128;
};

/// Frequency test: P = erfc(|#1 - #0| / sqrt(2 n)).
TestResult monobit_test(const BitStream& bits, const TestOptions& opts = {});

/// Runs test. When the ones proportion misses the 2 / sqrt(n) balance
/// prerequisite the result is a failure with P-value 0.
TestResult runs_test(const BitStream& bits, const TestOptions& opts = {});

/// Chi-square over the ones-proportion of floor(n / M) blocks. Throws
/// InvalidInput when M is below opts.min_block_size or no block fits.
TestResult block_frequency_test(const BitStream& bits, std::size_t block_size, const TestOptions& opts = {});

struct LongestRunSchedule {
    std::size_t block_size;
    std::size_t min_class; // runs <= min_class share the first class
    std::size_t max_class; // runs >= max_class share the last class
};

/// Block size and run-length classes used for a sequence of n bits:
/// M = 8 (n >= 128), 128 (n >= 6272) or 10^4 (n >= 750000).
LongestRunSchedule longest_run_schedule(std::size_t n);

/// Exact class probabilities of the longest run of ones in an M-bit block
/// of fair coin flips, computed by dynamic programming.
std::vector<double> longest_run_class_probabilities(const LongestRunSchedule& schedule);

TestResult longest_run_test(const BitStream& bits, const TestOptions& opts = {});

TestResult cumulative_sums_test(const BitStream& bits, bool forward, const TestOptions& opts = {});

/// Serial test for pattern length m; yields two results (first and second
/// differences of the psi-square statistics), each with one P-value.
std::vector<TestResult> serial_test(const BitStream& bits, unsigned m, const TestOptions& opts = {});

TestResult approximate_entropy_test(const BitStream& bits, unsigned m, const TestOptions& opts = {});

/// Discrete Fourier transform test with the threshold sqrt(ln(20) n).
TestResult spectral_test(const BitStream& bits, const TestOptions& opts = {});

struct ExtendedParams {
    unsigned serial_m = 2;
    unsigned apen_m = 2;
};

/// Longest run, cumulative sums (both directions), serial, approximate
/// entropy and spectral tests.
std::vector<TestResult> extended_tests(const BitStream& bits, const ExtendedParams& params = {},
                                       const TestOptions& opts = {});

struct BatteryConfig {
    double alpha = 0.01;
    std::size_t fail_threshold = 2;
    std::size_t block_frequency_m = 128;
    ExtendedParams extended{};
    TestOptions options{};
};

enum class Verdict { Pass, Fail };

const char* to_string(Verdict v) noexcept;

struct BatteryReport {
    std::vector<TestResult> results;
    std::size_t failure_count = 0;        // failed results
    std::size_t pvalue_failure_count = 0; // P-values below alpha over executed results
    std::size_t pvalue_count = 0;
    std::size_t skipped_count = 0;
    std::size_t fail_threshold = 2;
    Verdict verdict = Verdict::Fail;
    std::size_t input_length = 0;
    double alpha = 0.01;
};

/// Runs every configured test, counts failures and passes the sequence iff
/// at most `fail_threshold` executed tests fail. Throws EmptyBattery when
/// every test was skipped.
BatteryReport run_battery(const BitStream& bits, const BatteryConfig& config = {});

} // namespace mramrng
