#include "mramrng/whiten.hpp"

#include "mramrng/errors.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace mramrng {

BitStream von_neumann(const BitStream& bits) {
    BitStream out;
    out.reserve(bits.size() / 4 + 64);
    const std::size_t pairs = bits.size() / 2;
    std::uint64_t acc = 0;
    unsigned filled = 0;
    for (std::size_t i = 0; i < pairs; ++i) {
        const bool a = bits[2 * i];
        const bool b = bits[2 * i + 1];
        if (a == b) continue;
        acc |= static_cast<std::uint64_t>(a) << filled;
        if (++filled == 64) {
            out.append_bits(acc, 64);
            acc = 0;
            filled = 0;
        }
    }
    out.append_bits(acc, filled);
    return out;
}

double expected_rejection_rate(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("probability must lie in [0, 1]");
    return p * (1.0 - p);
}

LfsrSpec::LfsrSpec(std::vector<unsigned> taps) : taps_(std::move(taps)) {
    if (taps_.size() < 2) throw InvalidInput("LFSR tap list needs at least two entries");
    if (taps_.back() != 0) throw InvalidInput("LFSR tap list must end in 0");
    for (std::size_t i = 1; i < taps_.size(); ++i)
        if (taps_[i] >= taps_[i - 1]) throw InvalidInput("LFSR taps must be strictly descending");
    if (taps_.front() < 1 || taps_.front() > 31) throw InvalidInput("LFSR width must be in 1..31");
    for (auto t : taps_)
        if (t > 0) feedback_mask_ |= std::uint32_t{1} << (t - 1);
}

LfsrSpec LfsrSpec::parse(const std::string& text) {
    std::vector<unsigned> taps;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        unsigned v = 0;
        const auto* first = item.data();
        const auto* last = item.data() + item.size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last) throw InvalidInput("bad LFSR tap '" + item + "'");
        taps.push_back(v);
    }
    return LfsrSpec(std::move(taps));
}

std::string LfsrSpec::to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < taps_.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(taps_[i]);
    }
    return s + ")";
}

const std::vector<LfsrSpec>& shipped_lfsrs() {
    static const std::vector<LfsrSpec> specs{
        LfsrSpec({1, 0}),    LfsrSpec({2, 1, 0}), LfsrSpec({3, 1, 0}),
        LfsrSpec({4, 1, 0}), LfsrSpec({7, 1, 0}), LfsrSpec({7, 3, 0}),
    };
    return specs;
}

Lfsr::Lfsr(LfsrSpec spec, std::uint32_t seed, LfsrInjection injection)
    : spec_(std::move(spec)),
      width_(spec_.width()),
      mask_(width_ >= 32 ? ~0u : (1u << width_) - 1),
      feedback_(spec_.feedback_mask()),
      state_(seed),
      injection_(injection) {
    if ((seed & ~mask_) != 0)
        throw InvalidInput("LFSR seed " + std::to_string(seed) + " does not fit in " + std::to_string(width_) +
                           " bits");
}

BitStream lfsr_whiten(const LfsrSpec& spec, std::uint32_t seed, const BitStream& bits, LfsrInjection injection) {
    Lfsr reg(spec, seed, injection);
    BitStream out;
    out.reserve(bits.size());
    const std::size_t n = bits.size();
    for (std::size_t base = 0; base < n; base += 64) {
        const unsigned count = static_cast<unsigned>(std::min<std::size_t>(64, n - base));
        const std::uint64_t in = bits.extract(base, count);
        std::uint64_t acc = 0;
        for (unsigned i = 0; i < count; ++i)
            acc |= static_cast<std::uint64_t>(reg.step((in >> i) & 1u)) << i;
        out.append_bits(acc, count);
    }
    return out;
}

std::uint64_t lfsr_free_run_period(const LfsrSpec& spec, std::uint32_t seed) {
    if (seed == 0) throw InvalidInput("free-run period needs a nonzero seed");
    Lfsr reg(spec, seed);
    // The next-state map is invertible (tap N is always present), so the
    // orbit of the seed is a pure cycle.
    std::uint64_t steps = 0;
    do {
        reg.step(false);
        ++steps;
    } while (reg.state() != seed);
    return steps;
}

std::string describe(const Stage& stage) {
    struct Visitor {
        std::string operator()(const RejectionStage&) const { return "rejection"; }
        std::string operator()(const LfsrStage& s) const {
            return "lfsr" + s.spec.to_string() + "[seed=" + std::to_string(s.seed) +
                   (s.injection == LfsrInjection::Output ? ",output" : "") + "]";
        }
        std::string operator()(const EccStage& s) const {
            return "ecc" + s.code.label() + (s.compressor == CompressorKind::ShiftRegister ? "[shiftreg]" : "");
        }
    };
    return std::visit(Visitor{}, stage);
}

std::string PipelineSpec::describe() const {
    std::string s;
    for (const auto& st : stages) {
        if (!s.empty()) s += " -> ";
        s += mramrng::describe(st);
    }
    return s;
}

BitStream run_stage(const Stage& stage, const BitStream& bits) {
    struct Visitor {
        const BitStream& in;
        BitStream operator()(const RejectionStage&) const { return von_neumann(in); }
        BitStream operator()(const LfsrStage& s) const { return lfsr_whiten(s.spec, s.seed, in, s.injection); }
        BitStream operator()(const EccStage& s) const {
            return s.compressor == CompressorKind::Matrix ? compress_stream_matrix(s.code, in)
                                                          : compress_stream_shiftreg(s.code, in);
        }
    };
    return std::visit(Visitor{bits}, stage);
}

BitStream run_pipeline(const PipelineSpec& spec, const BitStream& bits, std::vector<StageTiming>* timings) {
    if (spec.stages.empty()) throw InvalidInput("pipeline has no stages");
    BitStream current = bits;
    for (const auto& stage : spec.stages) {
        const auto t0 = std::chrono::steady_clock::now();
        BitStream next = run_stage(stage, current);
        const auto t1 = std::chrono::steady_clock::now();
        if (timings)
            timings->push_back({describe(stage), current.size(), next.size(),
                                std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0)});
        current = std::move(next);
    }
    return current;
}

std::size_t pipeline_output_bound(const PipelineSpec& spec, std::size_t input_bits) {
    std::size_t len = input_bits;
    for (const auto& stage : spec.stages) {
        if (std::holds_alternative<RejectionStage>(stage))
            len /= 2;
        else if (const auto* ecc = std::get_if<EccStage>(&stage))
            len = (len / ecc->code.n) * ecc->code.k;
    }
    return len;
}

} // namespace mramrng
