#include "mramrng/stats.hpp"

#include "mramrng/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

namespace mramrng {

namespace special {

double erfc(double x) { return std::erfc(x); }

double igamc(double a, double x) {
    if (x <= 0.0) return 1.0;
    return boost::math::gamma_q(a, x);
}

} // namespace special

const char* to_string(TestStatus status) noexcept {
    switch (status) {
    case TestStatus::Passed: return "pass";
    case TestStatus::Failed: return "fail";
    case TestStatus::Skipped: return "skipped";
    }
    return "?";
}

const char* to_string(Verdict v) noexcept { return v == Verdict::Pass ? "Pass" : "Fail"; }

namespace {

TestResult skipped(std::string name, std::string why) {
    TestResult r;
    r.test_name = std::move(name);
    r.status = TestStatus::Skipped;
    r.note = std::move(why);
    return r;
}

TestResult finish(std::string name, std::vector<double> p_values, double alpha,
                  std::vector<std::pair<std::string, double>> params = {}) {
    TestResult r;
    r.test_name = std::move(name);
    for (auto& p : p_values) p = std::clamp(p, 0.0, 1.0);
    r.p_values = std::move(p_values);
    r.params = std::move(params);
    const double lowest = *std::min_element(r.p_values.begin(), r.p_values.end());
    r.status = lowest >= alpha ? TestStatus::Passed : TestStatus::Failed;
    return r;
}

std::string too_short(std::size_t n, std::size_t need) {
    return "needs at least " + std::to_string(need) + " bits, got " + std::to_string(n);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Phi(b) - Phi(a) for a <= b, taken from whichever tail keeps precision.
double normal_interval(double a, double b) {
    if (a >= 0.0) return normal_cdf(-a) - normal_cdf(-b);
    return normal_cdf(b) - normal_cdf(a);
}

// Overlapping m-bit pattern counts with wrap-around (the sequence is
// extended by its first m - 1 bits). Pattern value = bits read MSB-first.
std::vector<std::size_t> pattern_counts(const BitStream& bits, unsigned m) {
    std::vector<std::size_t> counts(std::size_t{1} << m, 0);
    if (m == 0) return counts;
    const std::size_t n = bits.size();
    const std::size_t mask = (std::size_t{1} << m) - 1;
    std::size_t value = 0;
    for (unsigned i = 0; i + 1 < m; ++i) value = (value << 1) | static_cast<std::size_t>(bits[i % n]);
    for (std::size_t i = 0; i < n; ++i) {
        value = ((value << 1) | static_cast<std::size_t>(bits[(i + m - 1) % n])) & mask;
        ++counts[value];
    }
    return counts;
}

double psi_square(const BitStream& bits, int m) {
    if (m <= 0) return 0.0;
    const auto counts = pattern_counts(bits, static_cast<unsigned>(m));
    const double n = static_cast<double>(bits.size());
    double sum = 0.0;
    for (auto c : counts) sum += static_cast<double>(c) * static_cast<double>(c);
    return sum * std::ldexp(1.0, m) / n - n;
}

double apen_phi(const BitStream& bits, unsigned m) {
    if (m == 0) return 0.0;
    const auto counts = pattern_counts(bits, m);
    const double n = static_cast<double>(bits.size());
    double sum = 0.0;
    for (auto c : counts)
        if (c > 0) {
            const double p = static_cast<double>(c) / n;
            sum += p * std::log(p);
        }
    return sum;
}

std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

} // namespace

TestResult monobit_test(const BitStream& bits, const TestOptions& opts) {
    const std::size_t n = bits.size();
    if (n < opts.min_length) return skipped("monobit", too_short(n, opts.min_length));
    const double s = 2.0 * static_cast<double>(bits.count_ones()) - static_cast<double>(n);
    const double p = special::erfc(std::abs(s) / std::sqrt(2.0 * static_cast<double>(n)));
    return finish("monobit", {p}, opts.alpha, {{"s_n", s}});
}

TestResult runs_test(const BitStream& bits, const TestOptions& opts) {
    const std::size_t n = bits.size();
    if (n < opts.min_length) return skipped("runs", too_short(n, opts.min_length));
    const double nd = static_cast<double>(n);
    const double pi = static_cast<double>(bits.count_ones()) / nd;
    const double tau = 2.0 / std::sqrt(nd);
    if (std::abs(pi - 0.5) >= tau) {
        auto r = finish("runs", {0.0}, opts.alpha, {{"pi", pi}});
        r.note = "ones proportion fails the balance prerequisite";
        return r;
    }
    // V = 1 + number of positions where b[i] != b[i+1]; word-parallel.
    std::size_t changes = 0;
    for (std::size_t i = 0; i + 1 < n; i += 63) {
        const unsigned count = static_cast<unsigned>(std::min<std::size_t>(64, n - i));
        const std::uint64_t w = bits.extract(i, count);
        const std::uint64_t diff = (w ^ (w >> 1)) & ((std::uint64_t{1} << (count - 1)) - 1);
        changes += static_cast<std::size_t>(std::popcount(diff));
    }
    const double v = static_cast<double>(changes + 1);
    const double num = std::abs(v - 2.0 * nd * pi * (1.0 - pi));
    const double den = 2.0 * std::sqrt(2.0 * nd) * pi * (1.0 - pi);
    return finish("runs", {special::erfc(num / den)}, opts.alpha, {{"v_obs", v}, {"pi", pi}});
}

TestResult block_frequency_test(const BitStream& bits, std::size_t block_size, const TestOptions& opts) {
    const std::size_t n = bits.size();
    if (block_size < opts.min_block_size)
        throw InvalidInput("block frequency: M = " + std::to_string(block_size) + " is below " +
                           std::to_string(opts.min_block_size));
    if (n < opts.min_length) return skipped("block_frequency", too_short(n, opts.min_length));
    const std::size_t blocks = n / block_size;
    if (blocks == 0) throw InvalidInput("block frequency: M exceeds the sequence length");
    double chi = 0.0;
    for (std::size_t b = 0; b < blocks; ++b) {
        std::size_t ones = 0;
        std::size_t pos = b * block_size;
        std::size_t left = block_size;
        while (left > 0) {
            const unsigned c = static_cast<unsigned>(std::min<std::size_t>(64, left));
            ones += static_cast<std::size_t>(std::popcount(bits.extract(pos, c)));
            pos += c;
            left -= c;
        }
        const double d = static_cast<double>(ones) / static_cast<double>(block_size) - 0.5;
        chi += d * d;
    }
    chi *= 4.0 * static_cast<double>(block_size);
    const double p = special::igamc(static_cast<double>(blocks) / 2.0, chi / 2.0);
    return finish("block_frequency", {p}, opts.alpha,
                  {{"M", static_cast<double>(block_size)}, {"N", static_cast<double>(blocks)}, {"chi_square", chi}});
}

LongestRunSchedule longest_run_schedule(std::size_t n) {
    if (n >= 750000) return {10000, 10, 16};
    if (n >= 6272) return {128, 4, 9};
    return {8, 1, 4};
}

std::vector<double> longest_run_class_probabilities(const LongestRunSchedule& s) {
    // cdf(r) = P(longest run <= r) over M fair bits; state = current run length.
    auto cdf = [&](std::size_t r) {
        std::vector<double> state(r + 1, 0.0), next(r + 1, 0.0);
        state[0] = 1.0;
        for (std::size_t i = 0; i < s.block_size; ++i) {
            std::fill(next.begin(), next.end(), 0.0);
            for (std::size_t len = 0; len <= r; ++len) {
                next[0] += 0.5 * state[len];
                if (len + 1 <= r) next[len + 1] += 0.5 * state[len];
            }
            std::swap(state, next);
        }
        double total = 0.0;
        for (double v : state) total += v;
        return total;
    };
    std::vector<double> probs;
    double prev = cdf(s.min_class);
    probs.push_back(prev);
    for (std::size_t v = s.min_class + 1; v < s.max_class; ++v) {
        const double c = cdf(v);
        probs.push_back(c - prev);
        prev = c;
    }
    probs.push_back(1.0 - prev);
    return probs;
}

TestResult longest_run_test(const BitStream& bits, const TestOptions& opts) {
    const std::size_t n = bits.size();
    if (n < opts.min_longest_run_length) return skipped("longest_run", too_short(n, opts.min_longest_run_length));
    const auto sched = longest_run_schedule(n);
    const auto probs = longest_run_class_probabilities(sched);
    const std::size_t blocks = n / sched.block_size;
    std::vector<double> counts(probs.size(), 0.0);
    for (std::size_t b = 0; b < blocks; ++b) {
        std::size_t run = 0, best = 0;
        for (std::size_t i = b * sched.block_size; i < (b + 1) * sched.block_size; ++i) {
            run = bits[i] ? run + 1 : 0;
            best = std::max(best, run);
        }
        const std::size_t cls = std::clamp(best, sched.min_class, sched.max_class) - sched.min_class;
        counts[cls] += 1.0;
    }
    double chi = 0.0;
    const double nb = static_cast<double>(blocks);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double expected = nb * probs[i];
        chi += (counts[i] - expected) * (counts[i] - expected) / expected;
    }
    const double k = static_cast<double>(probs.size() - 1);
    const double p = special::igamc(k / 2.0, chi / 2.0);
    return finish("longest_run", {p}, opts.alpha,
                  {{"M", static_cast<double>(sched.block_size)}, {"N", nb}, {"chi_square", chi}});
}

TestResult cumulative_sums_test(const BitStream& bits, bool forward, const TestOptions& opts) {
    const std::string name = forward ? "cusum_forward" : "cusum_backward";
    const std::size_t n = bits.size();
    if (n < opts.min_length) return skipped(name, too_short(n, opts.min_length));
    long long sum = 0, z = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool b = forward ? bits[i] : bits[n - 1 - i];
        sum += b ? 1 : -1;
        z = std::max(z, sum < 0 ? -sum : sum);
    }
    const double nd = static_cast<double>(n);
    const double zd = static_cast<double>(z);
    const double u = zd / std::sqrt(nd);
    // The k = 0 term of the first sum is folded into erfc so that small
    // P-values are not lost to cancellation against 1.
    double p = special::erfc(u / std::numbers::sqrt2);
    for (long long k = static_cast<long long>(std::floor((-nd / zd + 1.0) / 4.0));
         k <= static_cast<long long>(std::floor((nd / zd - 1.0) / 4.0)); ++k) {
        if (k == 0) continue;
        const double kd = static_cast<double>(k);
        p -= normal_interval((4.0 * kd - 1.0) * u, (4.0 * kd + 1.0) * u);
    }
    for (long long k = static_cast<long long>(std::floor((-nd / zd - 3.0) / 4.0));
         k <= static_cast<long long>(std::floor((nd / zd - 1.0) / 4.0)); ++k) {
        const double kd = static_cast<double>(k);
        p += normal_interval((4.0 * kd + 1.0) * u, (4.0 * kd + 3.0) * u);
    }
    return finish(name, {p}, opts.alpha, {{"z", zd}});
}

std::vector<TestResult> serial_test(const BitStream& bits, unsigned m, const TestOptions& opts) {
    const std::size_t n = bits.size();
    if (m < 2) throw InvalidInput("serial test needs m >= 2");
    if (m >= 24) throw InvalidInput("serial test needs m < 24");
    if (n < opts.min_length) {
        const auto why = too_short(n, opts.min_length);
        return {skipped("serial_1", why), skipped("serial_2", why)};
    }
    const int mi = static_cast<int>(m);
    const double psi_m = psi_square(bits, mi);
    const double psi_m1 = psi_square(bits, mi - 1);
    const double psi_m2 = psi_square(bits, mi - 2);
    const double del1 = psi_m - psi_m1;
    const double del2 = psi_m - 2.0 * psi_m1 + psi_m2;
    const double p1 = special::igamc(std::ldexp(1.0, mi - 2), del1 / 2.0);
    const double p2 = special::igamc(std::ldexp(1.0, mi - 3), del2 / 2.0);
    const double md = static_cast<double>(m);
    return {finish("serial_1", {p1}, opts.alpha, {{"m", md}, {"del_psi_sq", del1}}),
            finish("serial_2", {p2}, opts.alpha, {{"m", md}, {"del2_psi_sq", del2}})};
}

TestResult approximate_entropy_test(const BitStream& bits, unsigned m, const TestOptions& opts) {
    const std::size_t n = bits.size();
    if (m < 1) throw InvalidInput("approximate entropy needs m >= 1");
    if (m + 1 >= 24) throw InvalidInput("approximate entropy needs m < 23");
    if (n < opts.min_length) return skipped("approximate_entropy", too_short(n, opts.min_length));
    const double apen = apen_phi(bits, m) - apen_phi(bits, m + 1);
    const double chi = 2.0 * static_cast<double>(n) * (std::numbers::ln2 - apen);
    const double p = special::igamc(std::ldexp(1.0, static_cast<int>(m) - 1), chi / 2.0);
    return finish("approximate_entropy", {p}, opts.alpha,
                  {{"m", static_cast<double>(m)}, {"apen", apen}, {"chi_square", chi}});
}

TestResult spectral_test(const BitStream& bits, const TestOptions& opts) {
    const std::size_t n = bits.size();
    if (n < opts.min_spectral_length) return skipped("spectral", too_short(n, opts.min_spectral_length));
    const std::size_t half = n / 2;

    struct FftwFree {
        void operator()(void* p) const { fftw_free(p); }
    };
    std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
    std::unique_ptr<fftw_complex, FftwFree> out(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * (half + 1))));
    fftw_plan plan;
    {
        std::lock_guard lock(fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.get(), out.get(), FFTW_ESTIMATE);
    }
    for (std::size_t i = 0; i < n; ++i) in.get()[i] = bits[i] ? 1.0 : -1.0;
    fftw_execute(plan);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }

    const double nd = static_cast<double>(n);
    const double threshold = std::sqrt(std::log(1.0 / 0.05) * nd);
    std::size_t below = 0;
    for (std::size_t i = 0; i < half; ++i) {
        const double mod = std::hypot(out.get()[i][0], out.get()[i][1]);
        if (mod < threshold) ++below;
    }
    const double expected = 0.95 * nd / 2.0;
    const double d = (static_cast<double>(below) - expected) / std::sqrt(nd * 0.95 * 0.05 / 4.0);
    const double p = special::erfc(std::abs(d) / std::numbers::sqrt2);
    return finish("spectral", {p}, opts.alpha, {{"n1", static_cast<double>(below)}, {"d", d}});
}

std::vector<TestResult> extended_tests(const BitStream& bits, const ExtendedParams& params,
                                       const TestOptions& opts) {
    std::vector<TestResult> out;
    out.push_back(longest_run_test(bits, opts));
    out.push_back(cumulative_sums_test(bits, true, opts));
    out.push_back(cumulative_sums_test(bits, false, opts));
    for (auto& r : serial_test(bits, params.serial_m, opts)) out.push_back(std::move(r));
    out.push_back(approximate_entropy_test(bits, params.apen_m, opts));
    out.push_back(spectral_test(bits, opts));
    return out;
}

BatteryReport run_battery(const BitStream& bits, const BatteryConfig& config) {
    TestOptions opts = config.options;
    opts.alpha = config.alpha;

    BatteryReport report;
    report.alpha = config.alpha;
    report.fail_threshold = config.fail_threshold;
    report.input_length = bits.size();

    report.results.push_back(monobit_test(bits, opts));
    if (bits.size() >= opts.min_length && bits.size() / config.block_frequency_m >= 1)
        report.results.push_back(block_frequency_test(bits, config.block_frequency_m, opts));
    else
        report.results.push_back(skipped("block_frequency", too_short(bits.size(), config.block_frequency_m)));
    report.results.push_back(runs_test(bits, opts));
    for (auto& r : extended_tests(bits, config.extended, opts)) report.results.push_back(std::move(r));

    for (const auto& r : report.results) {
        if (r.skipped()) {
            ++report.skipped_count;
            continue;
        }
        if (r.failed()) ++report.failure_count;
        for (double p : r.p_values) {
            ++report.pvalue_count;
            if (p < config.alpha) ++report.pvalue_failure_count;
        }
    }
    if (report.skipped_count == report.results.size())
        throw EmptyBattery("input of " + std::to_string(bits.size()) + " bits is too short for every test");
    report.verdict = report.failure_count <= config.fail_threshold ? Verdict::Pass : Verdict::Fail;
    return report;
}

} // namespace mramrng
