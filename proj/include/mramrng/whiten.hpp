#pragma once

#include "mramrng/bits.hpp"
#include "mramrng/codes.hpp"

#include <bit>
#include <chrono>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace mramrng {

/// Pairwise rejection: 01 -> 0, 10 -> 1, 00/11 dropped. Pairs are aligned to
/// position 0; an unpaired trailing bit is dropped.
BitStream von_neumann(const BitStream& bits);

/// Expected output bits per input bit on an i.i.d. source with P(1) = p.
double expected_rejection_rate(double p);

/// Tap list in (N, ..., 0) notation, e.g. {3, 1, 0}.
///
/// Cell j (1 <= j <= N) holds the value loaded j steps ago, so tap N reads the
/// oldest cell. Each step the feedback is the XOR of the cells named by the
/// nonzero taps; the register shifts, cell N falls out as the output bit, and
/// cell 1 is loaded with the new value.
class LfsrSpec {
public:
    explicit LfsrSpec(std::vector<unsigned> taps);

    /// Parses "3,1,0".
    static LfsrSpec parse(const std::string& text);

    const std::vector<unsigned>& taps() const noexcept { return taps_; }
    unsigned width() const noexcept { return taps_.front(); }
    /// Bit (j - 1) set for every feedback tap j > 0.
    std::uint32_t feedback_mask() const noexcept { return feedback_mask_; }
    std::string to_string() const;

    friend bool operator==(const LfsrSpec& a, const LfsrSpec& b) noexcept { return a.taps_ == b.taps_; }

private:
    std::vector<unsigned> taps_;
    std::uint32_t feedback_mask_ = 0;
};

/// (1,0), (2,1,0), (3,1,0), (4,1,0), (7,1,0), (7,3,0).
const std::vector<LfsrSpec>& shipped_lfsrs();

/// Where raw bits enter the register.
enum class LfsrInjection {
    Feedback, // input XORed into the value loaded into cell 1
    Output,   // register free-runs; output = input XOR expelled bit
};

inline constexpr LfsrInjection kDefaultLfsrInjection = LfsrInjection::Feedback;

class Lfsr {
public:
    /// Seed bit (j - 1) initializes cell j; must fit in `width` bits.
    Lfsr(LfsrSpec spec, std::uint32_t seed, LfsrInjection injection = kDefaultLfsrInjection);

    bool step(bool input) noexcept {
        const std::uint32_t out = (state_ >> (width_ - 1)) & 1u;
        const std::uint32_t fb = static_cast<std::uint32_t>(std::popcount(state_ & feedback_)) & 1u;
        const std::uint32_t in = input ? 1u : 0u;
        if (injection_ == LfsrInjection::Feedback) {
            state_ = ((state_ << 1) | (fb ^ in)) & mask_;
            return out != 0;
        }
        state_ = ((state_ << 1) | fb) & mask_;
        return (out ^ in) != 0;
    }

    std::uint32_t state() const noexcept { return state_; }

private:
    LfsrSpec spec_;
    std::uint32_t width_;
    std::uint32_t mask_;
    std::uint32_t feedback_;
    std::uint32_t state_;
    LfsrInjection injection_;
};

BitStream lfsr_whiten(const LfsrSpec& spec, std::uint32_t seed, const BitStream& bits,
                      LfsrInjection injection = kDefaultLfsrInjection);

/// Free-run (zero input) cycle length starting from a nonzero seed.
std::uint64_t lfsr_free_run_period(const LfsrSpec& spec, std::uint32_t seed);

enum class CompressorKind { Matrix, ShiftRegister };

struct RejectionStage {};

struct LfsrStage {
    LfsrSpec spec;
    std::uint32_t seed = 1;
    LfsrInjection injection = kDefaultLfsrInjection;
};

struct EccStage {
    BchCode code;
    CompressorKind compressor = CompressorKind::Matrix;
};

using Stage = std::variant<RejectionStage, LfsrStage, EccStage>;

std::string describe(const Stage& stage);

/// Stages run left to right.
struct PipelineSpec {
    std::vector<Stage> stages;

    std::string describe() const;
};

struct StageTiming {
    std::string name;
    std::size_t input_bits = 0;
    std::size_t output_bits = 0;
    std::chrono::nanoseconds elapsed{0};
};

BitStream run_stage(const Stage& stage, const BitStream& bits);

/// Throws InvalidInput for an empty pipeline. When `timings` is given, one
/// entry per stage is appended.
BitStream run_pipeline(const PipelineSpec& spec, const BitStream& bits,
                       std::vector<StageTiming>* timings = nullptr);

/// Output length of a length-preserving/ECC-only pipeline; rejection stages
/// make the length data dependent and yield only the upper bound in/2.
std::size_t pipeline_output_bound(const PipelineSpec& spec, std::size_t input_bits);

} // namespace mramrng
