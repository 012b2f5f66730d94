#include "mramrng/source.hpp"

#include "mramrng/errors.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

namespace mramrng {

namespace {

void check_probability(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput(std::string(what) + " must lie in [0, 1]");
}

// splitmix64 step; derives independent sub-seeds for calibration batches.
std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

double switching_probability(const SwitchingModel& model, double current_ua) {
    return 1.0 / (1.0 + std::exp(-(current_ua - model.i50_ua) / model.slope_ua));
}

SwitchingModelSet default_switching_models() {
    // Scale parameters only; the 10 ns curve needs more current and has a
    // slightly gentler slope than the 30 ns one.
    return {
        {10, SwitchingModel{10.0, 95.0, 3.6}},
        {30, SwitchingModel{30.0, 70.0, 3.0}},
    };
}

SwitchingModelSet parse_switching_models(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw InvalidInput(std::string("switching model config: ") + e.what());
    }
    static const std::regex section_re(R"(t_write_(\d+)ns)");
    SwitchingModelSet models;
    for (const auto& [name, section] : tree) {
        std::smatch m;
        if (!std::regex_match(name, m, section_re))
            throw InvalidInput("switching model config: unexpected section [" + name + "]");
        const int t_write = std::stoi(m[1].str());
        SwitchingModel model;
        model.t_write_ns = t_write;
        try {
            model.i50_ua = section.get<double>("i50_ua");
            model.slope_ua = section.get<double>("slope_ua");
        } catch (const pt::ptree_error& e) {
            throw InvalidInput("switching model config [" + name + "]: " + e.what());
        }
        if (!(model.slope_ua > 0.0) || !std::isfinite(model.i50_ua))
            throw InvalidInput("switching model config [" + name + "]: slope_ua must be positive");
        models[t_write] = model;
    }
    if (models.empty()) throw InvalidInput("switching model config has no sections");
    return models;
}

SwitchingModelSet load_switching_models(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open switching model config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_switching_models(ss.str());
}

const SwitchingModel& model_for(const SwitchingModelSet& models, int t_write_ns) {
    const auto it = models.find(t_write_ns);
    if (it == models.end()) throw InvalidInput("no switching model for t_write = " + std::to_string(t_write_ns) + " ns");
    return it->second;
}

double calibrate_current(const SwitchingModel& model, double target, double tol) {
    if (!(target > 0.0 && target < 1.0)) throw InvalidInput("calibration target must lie in (0, 1)");
    if (!(tol > 0.0)) throw InvalidInput("calibration tolerance must be positive");
    double half = 64.0 * model.slope_ua;
    double lo = model.i50_ua - half;
    double hi = model.i50_ua + half;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double p = switching_probability(model, mid);
        if (std::abs(p - target) <= tol) return mid;
        if (p < target)
            lo = mid;
        else
            hi = mid;
    }
    throw CalibrationFailure("analytic calibration did not converge");
}

EmpiricalCalibration calibrate_current_empirical(const SwitchingModel& model, double target, double tol,
                                                 std::size_t batch_bits, std::uint64_t seed, int max_iterations) {
    if (!(target > 0.0 && target < 1.0)) throw InvalidInput("calibration target must lie in (0, 1)");
    if (!(tol > 0.0)) throw InvalidInput("calibration tolerance must be positive");
    if (batch_bits == 0) throw InvalidInput("calibration batch must be nonempty");
    double lo = model.i50_ua - 64.0 * model.slope_ua;
    double hi = model.i50_ua + 64.0 * model.slope_ua;
    std::uint64_t batch_seed = seed;
    for (int it = 1; it <= max_iterations; ++it) {
        const double mid = 0.5 * (lo + hi);
        batch_seed = mix_seed(batch_seed);
        const auto batch = mtj_stream(model, mid, batch_seed, batch_bits);
        const double frac = static_cast<double>(batch.count_ones()) / static_cast<double>(batch_bits);
        if (std::abs(frac - target) <= 0.5 * tol) return {mid, frac, it};
        if (frac < target)
            lo = mid;
        else
            hi = mid;
    }
    throw CalibrationFailure("empirical calibration did not converge in " + std::to_string(max_iterations) +
                             " batches");
}

BitStream bernoulli_stream(double p, std::uint64_t seed, std::size_t length) {
    check_probability(p, "p");
    SimRng rng(seed);
    BitStream out;
    out.reserve(length);
    if (p == 0.5) {
        // Fair coin: every engine word supplies 64 bits.
        for (std::size_t i = 0; i < length; i += 64) {
            const unsigned count = static_cast<unsigned>(std::min<std::size_t>(64, length - i));
            out.append_bits(rng.next(), count);
        }
        return out;
    }
    for (std::size_t i = 0; i < length; i += 64) {
        const unsigned count = static_cast<unsigned>(std::min<std::size_t>(64, length - i));
        std::uint64_t acc = 0;
        for (unsigned b = 0; b < count; ++b) acc |= static_cast<std::uint64_t>(rng.bernoulli(p)) << b;
        out.append_bits(acc, count);
    }
    return out;
}

std::pair<double, double> markov_transitions(double p, double rho) {
    check_probability(p, "p");
    if (!(rho > -1.0 && rho < 1.0)) throw InvalidInput("rho must lie in (-1, 1)");
    const double p10 = p * (1.0 - rho);         // P(1 | previous 0)
    const double p11 = p + rho * (1.0 - p);     // P(1 | previous 1)
    if (p10 < 0.0 || p10 > 1.0 || p11 < 0.0 || p11 > 1.0)
        throw InvalidInput("no Markov chain has stationary p = " + std::to_string(p) +
                           " and lag-1 correlation " + std::to_string(rho));
    return {p10, p11};
}

BitStream markov_stream(double p, double rho, std::uint64_t seed, std::size_t length) {
    const auto [p10, p11] = markov_transitions(p, rho);
    SimRng rng(seed);
    BitStream out;
    out.reserve(length);
    bool state = rng.bernoulli(p);
    for (std::size_t i = 0; i < length; i += 64) {
        const unsigned count = static_cast<unsigned>(std::min<std::size_t>(64, length - i));
        std::uint64_t acc = 0;
        for (unsigned b = 0; b < count; ++b) {
            if (i + b > 0) state = rng.bernoulli(state ? p11 : p10);
            acc |= static_cast<std::uint64_t>(state) << b;
        }
        out.append_bits(acc, count);
    }
    return out;
}

double markov_rejection_yield(double p, double rho) {
    markov_transitions(p, rho);
    return p * (1.0 - p) * (1.0 - rho);
}

double markov_rho_for_rejection_yield(double p, double yield) {
    check_probability(p, "p");
    const double base = p * (1.0 - p);
    if (base == 0.0) throw InvalidInput("constant source has no rejection yield");
    const double rho = 1.0 - yield / base;
    markov_transitions(p, rho);
    return rho;
}

BitStream mtj_stream(const SwitchingModel& model, double current_ua, std::uint64_t seed, std::size_t length) {
    const double p_write = switching_probability(model, current_ua);
    SimRng rng(seed);
    BitStream out;
    out.reserve(length);
    for (std::size_t i = 0; i < length; i += 64) {
        const unsigned count = static_cast<unsigned>(std::min<std::size_t>(64, length - i));
        std::uint64_t acc = 0;
        for (unsigned b = 0; b < count; ++b) {
            bool free_layer = false; // reset pulse always succeeds
            if (rng.uniform() < p_write) free_layer = true;
            acc |= static_cast<std::uint64_t>(free_layer) << b;
        }
        out.append_bits(acc, count);
    }
    return out;
}

BitStream generate(const SourceConfig& config) {
    struct Visitor {
        const SourceConfig& cfg;
        BitStream operator()(const BernoulliSource& s) const { return bernoulli_stream(s.p, cfg.seed, cfg.length); }
        BitStream operator()(const MarkovSource& s) const {
            return markov_stream(s.p, s.rho, cfg.seed, cfg.length);
        }
        BitStream operator()(const MtjSource& s) const {
            return mtj_stream(s.model, s.current_ua, cfg.seed, cfg.length);
        }
    };
    return std::visit(Visitor{config}, config.kind);
}

const std::vector<Preset>& presets() {
    static const std::vector<Preset> list{
        {"data-a", 0.511, 30},
        {"data-b", 0.276, 30},
        {"data-c", 0.363, 10},
    };
    return list;
}

std::optional<Preset> find_preset(const std::string& name) {
    for (const auto& p : presets())
        if (p.name == name) return p;
    return std::nullopt;
}

MtjSource preset_source(const Preset& preset, const SwitchingModelSet& models) {
    const auto& model = model_for(models, preset.t_write_ns);
    return MtjSource{model, calibrate_current(model, preset.ones_fraction, 1e-12)};
}

} // namespace mramrng
