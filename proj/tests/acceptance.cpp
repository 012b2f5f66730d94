// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include "mramrng/cli.hpp"
#include "mramrng/codes.hpp"
#include "mramrng/source.hpp"
#include "mramrng/stats.hpp"
#include "mramrng/whiten.hpp"

#include "oracle_values.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace mramrng;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::string fmt(const char* f, double a, double b) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

double ones(const BitStream& b) { return static_cast<double>(b.count_ones()) / static_cast<double>(b.size()); }

BitStream random_bits(std::mt19937_64& rng, std::size_t n) {
    BitStream b;
    b.reserve(n);
    for (std::size_t i = 0; i < n; i += 64) {
        const unsigned c = static_cast<unsigned>(std::min<std::size_t>(64, n - i));
        b.append_bits(rng(), c);
    }
    return b;
}

const BchCode& code(std::size_t n, std::size_t k, std::size_t t) {
    for (const auto& c : code_registry())
        if (c.n == n && c.k == k && c.t == t) return c;
    throw std::logic_error("missing code");
}

// 1. von Neumann yield p(1 - p) on i.i.d. 10^6-bit streams.
Outcome rejection_rates() {
    Outcome o;
    const std::pair<double, double> cases[] = {{0.276, 0.1998}, {0.363, 0.2312}, {0.511, 0.2499}};
    for (const auto& [p, expect] : cases) {
        const auto raw = bernoulli_stream(p, 1, 1'000'000);
        const auto t0 = Clock::now();
        const auto out = von_neumann(raw);
        const double secs = seconds_since(t0);
        const double rate = static_cast<double>(out.size()) / 1e6;
        o.detail += fmt("p=%.3f rate=%.4f ", p, rate);
        o.require(std::abs(rate - expect) <= 0.003, fmt("p=%.3f yield %.4f", p, rate));
        o.require(std::abs(expected_rejection_rate(p) - expect) <= 5e-5, "analytic p(1-p)");
        o.require(secs < 1.0, fmt("p=%.3f took %.2f s", p, secs));
    }
    return o;
}

// 2. Output/input = k/n exactly on block multiples, all twelve listed codes.
Outcome compression_ratios() {
    Outcome o;
    std::mt19937_64 rng(2);
    std::size_t checked = 0;
    for (const auto& c : code_registry()) {
        if (c.n == 7) continue;
        const std::size_t blocks = 1000;
        const auto out = compress_stream_matrix(c, random_bits(rng, c.n * blocks));
        o.require(out.size() * c.n == c.k * c.n * blocks && out.size() == c.k * blocks, c.label());
        ++checked;
    }
    o.require(checked == 12, "expected 12 codes");
    const double r31 = code(31, 21, 2).rate(), r63 = code(63, 51, 2).rate(), r127 = code(127, 113, 2).rate();
    o.require(std::abs(r31 - 0.6774) < 5e-5, "(31,21,2) rate");
    o.require(std::abs(r63 - 0.8095) < 5e-5, "(63,51,2) rate");
    o.require(std::abs(r127 - 0.8898) < 5e-5, "(127,113,2) rate");
    o.detail = (o.pass ? "" : o.detail + " | ") + fmt("12 codes exact; t=2 rates 31: %.4f, 63: %.4f", r31, r63) +
               fmt(", 127: %.4f (nominal 80%%/90%% for 63/127 are rounded)", r127);
    return o;
}

// 3. Bias law through (31,26,1) with e = 0.2.
Outcome bias_law() {
    Outcome o;
    const auto& c = code(31, 26, 1);
    const auto t0 = Clock::now();
    const std::size_t blocks = 10'000'000 / c.k + 1; // >= 10^7 output bits
    std::size_t out_bits = 0, out_ones = 0;
    BlockCompressor comp(c);
    for (std::uint64_t chunk = 0; out_bits < blocks * c.k; ++chunk) {
        const std::size_t chunk_blocks = std::min<std::size_t>(100'000, blocks - out_bits / c.k);
        const auto raw = bernoulli_stream(0.6, 300 + chunk, chunk_blocks * c.n);
        BitStream out;
        comp.compress(raw, out);
        out_bits += out.size();
        out_ones += out.count_ones();
    }
    const double frac = static_cast<double>(out_ones) / static_cast<double>(out_bits);
    const double expect = 0.5 + std::pow(0.2, 3) / 2.0;
    const double se = std::sqrt(expect * (1.0 - expect) / static_cast<double>(out_bits));
    const double secs = seconds_since(t0);
    o.require(out_bits >= 10'000'000, "too few output bits");
    o.require(std::abs(frac - expect) <= 3.0 * se, "deviation beyond 3 SE");
    o.require(std::abs(predicted_output_bias(c, 0.2) - 0.008) < 1e-15, "predicted e^w");
    o.require(poly_weight(c.g) == 3, "w = 3 = d");
    o.require(secs < 30.0, fmt("took %.1f s", secs));
    o.detail = fmt("ones fraction %.5f vs 0.50400", frac) + fmt(" (%.2f SE, %.1f s)", (frac - expect) / se, secs) +
               (o.detail.empty() ? "" : "; " + o.detail);
    return o;
}

std::size_t battery_failures(const BitStream& bits) { return run_battery(bits).failure_count; }

// 4. Raw > ECC-only >= LFSR+ECC failure counts on the data-B profile.
Outcome qualitative_figures() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto models = default_switching_models();
    const auto src = preset_source(*find_preset("data-b"), models);
    constexpr std::size_t kBits = 1'000'000;
    // Enough raw bits that every post-processed stream still has 10^6 bits.
    const auto raw = mtj_stream(src.model, src.current_ua, 7, 2'000'000);
    const auto raw_report = run_battery(raw.slice(0, kBits));
    o.require(raw_report.verdict == Verdict::Fail, "raw verdict is not Fail");
    std::string per_n;
    for (std::size_t n : {31u, 63u, 127u}) {
        bool found = false;
        std::string best;
        for (const auto& c : code_registry()) {
            if (c.n != n) continue;
            auto ecc = compress_stream_matrix(c, raw);
            auto both = run_pipeline(PipelineSpec{{LfsrStage{LfsrSpec::parse("3,1,0")}, EccStage{c}}}, raw);
            if (ecc.size() < kBits) continue;
            ecc.truncate(kBits);
            both.truncate(kBits);
            const auto fe = battery_failures(ecc), fb = battery_failures(both);
            if (raw_report.failure_count > fe && fe >= fb) {
                found = true;
                best = c.label() + fmt(": %g>", static_cast<double>(raw_report.failure_count)) +
                       fmt("%g>=%g", static_cast<double>(fe), static_cast<double>(fb));
                break;
            }
        }
        o.require(found, "no ordered code for n=" + std::to_string(n));
        per_n += (per_n.empty() ? "" : ", ") + best;
    }
    auto target = run_pipeline(
        PipelineSpec{{LfsrStage{LfsrSpec::parse("3,1,0")}, EccStage{code(31, 16, 3)}}}, raw);
    target.truncate(kBits);
    const auto rep = run_battery(target);
    o.require(rep.verdict == Verdict::Pass, "LFSR(3,1,0)+ECC(31,16,3) verdict Fail");
    const double secs = seconds_since(t0);
    o.require(secs < 120.0, fmt("took %.1f s", secs));
    o.detail = "raw/ECC/LFSR+ECC failures " + per_n +
               fmt("; LFSR(3,1,0)+ECC(31,16,3) %g failures, Pass (%.1f s)", static_cast<double>(rep.failure_count),
                   secs) +
               (o.pass ? "" : " | " + o.detail);
    return o;
}

std::vector<std::size_t> shuffled_positions(std::mt19937_64& rng, std::size_t n) {
    std::vector<std::size_t> pos(n);
    std::iota(pos.begin(), pos.end(), std::size_t{0});
    std::shuffle(pos.begin(), pos.end(), rng);
    return pos;
}

// 5. Decoder correctness.
Outcome codec() {
    Outcome o;
    const auto t0 = Clock::now();
    std::size_t trials = 0;
    {
        const auto& c = code(7, 4, 1);
        BchDecoder dec(c);
        for (std::uint64_t m = 0; m < 16; ++m) {
            BitStream msg;
            msg.append_bits(m, 4);
            const auto cw = bch_encode(c, msg);
            for (std::size_t flip = 0; flip <= 7; ++flip) {
                auto r = cw;
                if (flip < 7) r.flip(flip);
                const auto d = dec.decode(r);
                o.require(d.ok() && d.message == msg, "(7,4) failure");
                ++trials;
            }
        }
    }
    std::mt19937_64 rng(5);
    {
        const auto& c = code(31, 26, 1);
        BchDecoder dec(c);
        for (int w = 0; w < 100; ++w) {
            const auto msg = random_bits(rng, c.k);
            const auto cw = bch_encode(c, msg);
            for (std::size_t i = 0; i < c.n; ++i) {
                auto r = cw;
                r.flip(i);
                const auto d = dec.decode(r);
                o.require(d.ok() && d.message == msg && d.errors_corrected == 1, "(31,26,1) failure");
                ++trials;
            }
        }
    }
    std::size_t failures = 0;
    for (const auto& c : code_registry()) {
        if (c.t < 2) continue;
        BchDecoder dec(c);
        for (int trial = 0; trial < 10'000; ++trial) {
            const auto msg = random_bits(rng, c.k);
            auto r = bch_encode(c, msg);
            const std::size_t errors = 1 + rng() % c.t;
            const auto pos = shuffled_positions(rng, c.n);
            for (std::size_t e = 0; e < errors; ++e) r.flip(pos[e]);
            const auto d = dec.decode(r);
            if (!(d.ok() && d.message == msg && d.errors_corrected == errors)) ++failures;
            ++trials;
        }
    }
    o.require(failures == 0, std::to_string(failures) + " decoding failures for t>=2 codes");
    const double secs = seconds_since(t0);
    o.require(secs < 60.0, fmt("took %.1f s", secs));
    o.detail = std::to_string(trials) + " decodes, 0 failures" + fmt(" (%.1f s)", secs) +
               (o.pass ? "" : " | " + o.detail);
    return o;
}

// 6. Shift-register compressor equals the matrix form.
Outcome streaming_equivalence() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto& c7 = code(7, 4, 1);
    BitStream all;
    for (std::uint64_t v = 0; v < 128; ++v) all.append_bits(v, 7);
    o.require(compress_stream_shiftreg(c7, all) == compress_stream_matrix(c7, all), "(7,4) exhaustive");
    std::mt19937_64 rng(6);
    std::size_t mismatched_blocks = 0;
    for (const auto& c : code_registry()) {
        if (c.n == 7) continue;
        const auto in = random_bits(rng, c.n * 10'000);
        const auto a = compress_stream_shiftreg(c, in);
        const auto b = compress_stream_matrix(c, in);
        for (std::size_t blk = 0; blk < 10'000; ++blk)
            if (!(a.slice(blk * c.k, c.k) == b.slice(blk * c.k, c.k))) ++mismatched_blocks;
    }
    o.require(mismatched_blocks == 0, std::to_string(mismatched_blocks) + " mismatched blocks");
    const double secs = seconds_since(t0);
    o.require(secs < 10.0, fmt("took %.1f s", secs));
    o.detail = "(7,4) all 128 blocks, 12 codes x 10^4 random blocks, " + std::to_string(mismatched_blocks) +
               " mismatches" + fmt(" (%.2f s)", secs);
    return o;
}

// 7. Every shipped LFSR has period 2^N - 1 from every nonzero seed.
Outcome lfsr_maximality() {
    Outcome o;
    std::string periods;
    for (const auto& spec : shipped_lfsrs()) {
        const std::uint64_t full = (std::uint64_t{1} << spec.width()) - 1;
        bool all = true;
        for (std::uint32_t s = 1; s <= full; ++s) all = all && lfsr_free_run_period(spec, s) == full;
        o.require(all, spec.to_string());
        periods += (periods.empty() ? "" : " ") + spec.to_string() + "=" + std::to_string(full);
    }
    o.detail = periods + (o.pass ? "" : " | " + o.detail);
    return o;
}

// 8. Null rejection rate per test and fixed-vector P-values.
Outcome test_calibration() {
    Outcome o;
    const auto t0 = Clock::now();
    constexpr int kSeeds = 1000;
    constexpr std::size_t kBits = 1'000'000;
    std::vector<std::string> names;
    std::vector<int> rejections;
    for (int s = 0; s < kSeeds; ++s) {
        const auto rep = run_battery(bernoulli_stream(0.5, 0xACCE57ULL + static_cast<std::uint64_t>(s), kBits));
        if (names.empty()) {
            for (const auto& r : rep.results) names.push_back(r.test_name);
            rejections.assign(names.size(), 0);
        }
        for (std::size_t i = 0; i < rep.results.size(); ++i) rejections[i] += rep.results[i].failed();
    }
    std::string rates;
    for (std::size_t i = 0; i < names.size(); ++i) {
        const double rate = rejections[i] / static_cast<double>(kSeeds);
        o.require(rate <= 0.02, names[i] + fmt(" rejects %.3f", rate));
        rates += (rates.empty() ? "" : " ") + names[i] + fmt("=%.3f", rate);
    }
    TestOptions tiny;
    tiny.min_length = 1;
    tiny.min_block_size = 1;
    // Reference figures carry 4 significant digits; the oracle carries all of them.
    auto sig4 = [](double got, double reference) {
        const double scale = std::pow(10.0, 3 - std::floor(std::log10(std::abs(got))));
        return std::round(got * scale) == std::round(reference * scale);
    };
    auto near = [](double got, double oracle) { return std::abs(got - oracle) <= 1e-12 * std::abs(oracle); };
    const double pm = monobit_test(BitStream::from_string("1011010101"), tiny).p_values.at(0);
    const double pr = runs_test(BitStream::from_string("1001101011"), tiny).p_values.at(0);
    const double pb = block_frequency_test(BitStream::from_string("0110011010"), 3, tiny).p_values.at(0);
    o.require(near(pm, oracle::kMonobit1011010101) && sig4(pm, 0.5271), fmt("monobit %.6f", pm));
    o.require(near(pr, oracle::kRuns1001101011) && sig4(pr, 0.1472), fmt("runs %.6f", pr));
    o.require(near(pb, oracle::kBlockFreq0110011010M3) && sig4(pb, 0.8013), fmt("block frequency %.6f", pb));
    const double secs = seconds_since(t0);
    o.require(secs < 300.0, fmt("took %.1f s", secs));
    o.detail = std::to_string(kSeeds) + " seeds x 10^6 bits, rejection rates: " + rates +
               fmt("; fixed vectors %.4f", pm) + fmt(" %.4f", pr) + fmt(" %.4f", pb) + fmt(" (%.0f s)", secs) +
               (o.pass ? "" : " | " + o.detail);
    return o;
}

// 9. Speed estimate and comparison rows.
Outcome speed() {
    Outcome o;
    const double mhz = cli::speed_estimate_mhz(10.0, 4);
    o.require(mhz == 25.0, fmt("estimate %.6f MHz", mhz));
    const auto rows = cli::speed_comparison(mhz);
    o.require(rows.size() == 3 && rows[0].mhz == 2.0 && rows[1].mhz == 0.2 && rows[2].mhz == 25.0,
              "comparison rows");
    std::ostringstream out, err;
    o.require(cli::run({"speed", "--read-ns", "10", "--clocks", "4"}, out, err) == 0, "speed command");
    o.require(out.str().find("25 MHz") != std::string::npos, "speed output");
    o.detail = fmt("10 ns x 4 clocks = %g MHz; rows 2 MHz, 0.2 MHz", mhz) + (o.pass ? "" : " | " + o.detail);
    return o;
}

// 10. Device-only results are replaced by the property checks above plus the
// model's slope ordering.
Outcome replaced_by_properties(const std::vector<bool>& property_results) {
    Outcome o;
    const auto models = default_switching_models();
    const auto& m10 = model_for(models, 10);
    const auto& m30 = model_for(models, 30);
    bool ordered = m10.slope_ua > m30.slope_ua;
    for (double d = 0.5; d <= 20.0; d += 0.5)
        ordered = ordered && switching_probability(m10, m10.i50_ua + d) < switching_probability(m30, m30.i50_ua + d);
    o.require(ordered, "10 ns curve is not shallower than 30 ns");
    o.require(std::all_of(property_results.begin(), property_results.end(), [](bool b) { return b; }),
              "a replacement criterion (3, 4 or 8) failed");
    o.detail = "device-only outcomes not reproduced; replaced by criteria 3, 4, 8 and the slope ordering "
               "(10 ns slope " +
               fmt("%.1f > 30 ns slope %.1f)", m10.slope_ua, m30.slope_ua) + (o.pass ? "" : " | " + o.detail);
    return o;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* title;
        std::function<Outcome()> run;
    };
    std::vector<Outcome> results(11);
    const std::vector<Criterion> criteria = {
        {1, "rejection-rate reproduction", rejection_rates},
        {2, "ECC compression ratios", compression_ratios},
        {3, "bias-reduction law", bias_law},
        {4, "qualitative raw/ECC/LFSR+ECC ordering", qualitative_figures},
        {5, "codec correctness", codec},
        {6, "streaming/matrix equivalence", streaming_equivalence},
        {7, "LFSR maximality", lfsr_maximality},
        {8, "statistical-test calibration", test_calibration},
        {9, "speed estimate", speed},
        {10, "device-only results replaced by properties",
         [&] { return replaced_by_properties({results[3].pass, results[4].pass, results[8].pass}); }},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        results[static_cast<std::size_t>(c.id)] = out;
        failed += !out.pass;
        std::printf("[%s] %2d %s: %s\n", out.pass ? "PASS" : "FAIL", c.id, c.title, out.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
