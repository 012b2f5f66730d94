#pragma once

#include "mramrng/bits.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <variant>

namespace mramrng {

/// Seedable simulation generator. Only used to drive the simulated entropy
/// source; never exposed as output randomness.
class SimRng {
public:
    explicit SimRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) { return uniform() < p; }

private:
    std::mt19937_64 engine_;
};

/// Logistic write-switching curve of one pulse width:
/// P(I) = 1 / (1 + exp(-(I - i50) / slope)).
struct SwitchingModel {
    double t_write_ns = 30.0;
    double i50_ua = 70.0;
    double slope_ua = 3.0; // larger = shallower curve
};

double switching_probability(const SwitchingModel& model, double current_ua);

/// Switching models keyed by pulse width in ns.
using SwitchingModelSet = std::map<int, SwitchingModel>;

/// Built-in defaults: 10 ns and 30 ns curves, the 10 ns one shallower.
SwitchingModelSet default_switching_models();

/// INI file, one section per pulse width:
///   [t_write_10ns]
///   i50_ua = 95
///   slope_ua = 3.6
SwitchingModelSet load_switching_models(const std::string& path);
SwitchingModelSet parse_switching_models(const std::string& text);

const SwitchingModel& model_for(const SwitchingModelSet& models, int t_write_ns);

/// Current at which the curve crosses `target`, by bisection on a bracket
/// centred on i50 (so target 0.5 returns i50 exactly).
double calibrate_current(const SwitchingModel& model, double target = 0.5, double tol = 1e-9);

struct EmpiricalCalibration {
    double current_ua = 0.0;
    double measured_fraction = 0.0;
    int iterations = 0;
};

/// Feedback calibration against measured ones-fractions of generated batches:
/// bisect on current, stop when a batch lands within tol / 2 of target.
EmpiricalCalibration calibrate_current_empirical(const SwitchingModel& model, double target, double tol,
                                                 std::size_t batch_bits, std::uint64_t seed,
                                                 int max_iterations = 60);

struct BernoulliSource {
    double p = 0.5;
};

/// Two-state chain with stationary P(1) = p and lag-1 autocorrelation rho.
struct MarkovSource {
    double p = 0.5;
    double rho = 0.0;
};

struct MtjSource {
    SwitchingModel model;
    double current_ua = 0.0;
};

using SourceKind = std::variant<BernoulliSource, MarkovSource, MtjSource>;

struct SourceConfig {
    SourceKind kind;
    std::uint64_t seed = 0;
    std::size_t length = 0;
};

BitStream bernoulli_stream(double p, std::uint64_t seed, std::size_t length);
BitStream markov_stream(double p, double rho, std::uint64_t seed, std::size_t length);
/// Reset-then-write cycle per bit: the free layer is reset, then one write
/// pulse flips it with probability P(I).
BitStream mtj_stream(const SwitchingModel& model, double current_ua, std::uint64_t seed, std::size_t length);

BitStream generate(const SourceConfig& config);

/// Transition probabilities P(1|0), P(1|1); throws InvalidInput when the pair
/// (p, rho) has no valid chain.
std::pair<double, double> markov_transitions(double p, double rho);

/// Rejection yield per input bit of the Markov source: p (1 - p) (1 - rho).
double markov_rejection_yield(double p, double rho);
/// rho that makes the rejection yield equal `yield` at stationary p.
double markov_rho_for_rejection_yield(double p, double yield);

/// Named operating points: "data-a" (51.1 % ones, 30 ns),
/// "data-b" (27.6 %, 30 ns), "data-c" (36.3 %, 10 ns).
struct Preset {
    std::string name;
    double ones_fraction;
    int t_write_ns;
};

const std::vector<Preset>& presets();
std::optional<Preset> find_preset(const std::string& name);

/// MTJ source driven at the current that yields the preset's balance.
MtjSource preset_source(const Preset& preset, const SwitchingModelSet& models);

} // namespace mramrng
