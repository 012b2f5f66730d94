#include "mramrng/cli.hpp"

#include "mramrng/bitfile.hpp"
#include "mramrng/codes.hpp"
#include "mramrng/errors.hpp"
#include "mramrng/manifest.hpp"
#include "mramrng/report.hpp"
#include "mramrng/source.hpp"
#include "mramrng/stats.hpp"
#include "mramrng/whiten.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

namespace mramrng::cli {

double speed_estimate_mhz(double read_ns, int clocks_per_bit) {
    if (!(read_ns > 0.0)) throw InvalidInput("read time must be positive");
    if (clocks_per_bit < 1) throw InvalidInput("clocks per bit must be at least 1");
    return 1000.0 / (read_ns * static_cast<double>(clocks_per_bit));
}

std::vector<SpeedRow> speed_comparison(double mram_mhz) {
    return {
        {"ref-1 (transistor RTN RNG)", 2.0},
        {"ref-2 (transistor noise RNG)", 0.2},
        {"MRAM (estimate)", mram_mhz},
    };
}

namespace {

constexpr std::size_t kBatteryMinBits = 1'000'000;

struct UnknownCode : InvalidInput {
    using InvalidInput::InvalidInput;
};

std::string valid_codes_list() {
    std::string s;
    for (const auto& c : code_registry()) {
        if (!s.empty()) s += " ";
        s += std::to_string(c.n) + "," + std::to_string(c.k) + "," + std::to_string(c.t);
    }
    return s;
}

BchCode parse_code_triple(const std::string& text) {
    std::size_t v[3];
    std::stringstream ss(text);
    std::string item;
    int i = 0;
    while (std::getline(ss, item, ',')) {
        if (i == 3) throw UnknownCode("--ecc expects n,k,t; got '" + text + "'");
        try {
            std::size_t used = 0;
            v[i] = std::stoul(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UnknownCode("--ecc expects n,k,t; got '" + text + "'");
        }
        ++i;
    }
    if (i != 3) throw UnknownCode("--ecc expects n,k,t; got '" + text + "'");
    auto code = find_code(v[0], v[1], v[2]);
    if (!code) throw UnknownCode("unknown code (" + text + "); valid codes: " + valid_codes_list());
    return *code;
}

std::uint64_t resolve_seed(const CLI::Option* flag, std::uint64_t flag_value) {
    if (flag->count() > 0) return flag_value;
    if (const char* env = std::getenv(kSeedEnvVar)) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw InvalidInput(std::string(kSeedEnvVar) + " is not an integer");
        }
    }
    return 0;
}

// Options shared by every command that builds a pipeline.
struct PipelineFlags {
    CLI::Option* rejection = nullptr;
    CLI::Option* lfsr = nullptr;
    CLI::Option* lfsr_seed = nullptr;
    CLI::Option* ecc = nullptr;
    std::string compressor = "matrix";
    std::string injection = "feedback";

    void add(CLI::App* app) {
        rejection = app->add_flag("--rejection", "von Neumann rejection stage (01->0, 10->1)")
                        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
        lfsr = app->add_option("--lfsr", "LFSR stage with taps N,...,0 (e.g. 3,1,0)")
                   ->allow_extra_args(false)
                   ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
        lfsr_seed = app->add_option("--lfsr-seed", "register seed of the preceding --lfsr (default 1)")
                        ->allow_extra_args(false)
                        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
        ecc = app->add_option("--ecc", "BCH compression stage n,k,t (e.g. 31,16,3)")
                  ->allow_extra_args(false)
                  ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
        app->add_option("--compressor", compressor, "ECC compressor form")
            ->check(CLI::IsMember({"matrix", "shiftreg"}));
        app->add_option("--lfsr-injection", injection, "where raw bits enter the LFSR")
            ->check(CLI::IsMember({"feedback", "output"}));
    }

    // Stages in command-line order.
    PipelineSpec build(const CLI::App* app) const {
        PipelineSpec spec;
        std::size_t lfsr_i = 0, seed_i = 0, ecc_i = 0;
        const auto kind = compressor == "shiftreg" ? CompressorKind::ShiftRegister : CompressorKind::Matrix;
        const auto inj = injection == "output" ? LfsrInjection::Output : LfsrInjection::Feedback;
        bool last_is_lfsr = false;
        for (const CLI::Option* opt : app->parse_order()) {
            if (opt == rejection) {
                spec.stages.emplace_back(RejectionStage{});
                last_is_lfsr = false;
            } else if (opt == lfsr) {
                spec.stages.emplace_back(LfsrStage{LfsrSpec::parse(lfsr->results().at(lfsr_i++)), 1, inj});
                last_is_lfsr = true;
            } else if (opt == lfsr_seed) {
                if (!last_is_lfsr) throw InvalidInput("--lfsr-seed must directly follow an --lfsr stage");
                const auto& text = lfsr_seed->results().at(seed_i++);
                std::uint32_t seed = 0;
                try {
                    seed = static_cast<std::uint32_t>(std::stoul(text));
                } catch (const std::exception&) {
                    throw InvalidInput("bad --lfsr-seed '" + text + "'");
                }
                auto& stage = std::get<LfsrStage>(spec.stages.back());
                stage = LfsrStage{stage.spec, seed, inj};
                last_is_lfsr = false;
            } else if (opt == ecc) {
                spec.stages.emplace_back(EccStage{parse_code_triple(ecc->results().at(ecc_i++)), kind});
                last_is_lfsr = false;
            }
        }
        for (const auto& st : spec.stages)
            if (const auto* l = std::get_if<LfsrStage>(&st)) Lfsr(l->spec, l->seed, l->injection); // validates seed
        return spec;
    }
};

struct InputFlags {
    std::string path;
    std::string format = "auto";
    std::string bit_order = "msb";
    std::size_t bits = 0;
    CLI::Option* bits_opt = nullptr;

    void add(CLI::App* app) {
        app->add_option("-i,--input", path, "input bit file")->required();
        app->add_option("--input-format", format, "packed|ascii|auto (auto: .txt/.ascii are ascii)")
            ->check(CLI::IsMember({"auto", "packed", "ascii"}));
        app->add_option("--bit-order", bit_order, "bit order inside packed input bytes")
            ->check(CLI::IsMember({"msb", "lsb"}));
        bits_opt = app->add_option("--input-bits", bits, "number of valid bits (default: sidecar manifest or whole file)");
    }

    BitEncoding encoding() const { return format == "auto" ? encoding_for_path(path) : parse_encoding(format); }

    struct Loaded {
        BitStream bits;
        FileDigest digest;
    };

    Loaded load() const {
        if (!std::filesystem::exists(path)) throw IoError("input file " + path + " does not exist");
        const auto enc = encoding();
        const auto order = parse_bit_order(bit_order);
        std::optional<std::size_t> count;
        const std::string file_sha = sha256_file(path);
        if (bits_opt->count() > 0) {
            count = bits;
        } else if (std::filesystem::exists(manifest_path_for(path))) {
            // Our own outputs record their exact bit count in the sidecar.
            const auto side = read_manifest(manifest_path_for(path));
            if (side.output && side.output->sha256 == file_sha) count = side.output->bit_count;
        }
        Loaded l{read_bit_file(path, enc, order, count), {}};
        l.digest = FileDigest{path, file_sha, l.bits.size(), to_string(enc), to_string(order)};
        return l;
    }
};

struct OutputFlags {
    std::string path;
    std::string format = "auto";

    void add(CLI::App* app, bool required = true) {
        auto* o = app->add_option("-o,--output", path, "output file");
        if (required) o->required();
        app->add_option("--format", format, "packed|ascii|auto (auto: .txt/.ascii are ascii)")
            ->check(CLI::IsMember({"auto", "packed", "ascii"}));
    }

    BitEncoding encoding() const { return format == "auto" ? encoding_for_path(path) : parse_encoding(format); }

    FileDigest write(const BitStream& bits) const {
        const auto enc = encoding();
        const auto bytes = encode_bit_file(bits, enc);
        write_file_bytes(path, bytes);
        return FileDigest{path, sha256_hex(bytes), bits.size(), to_string(enc), "msb"};
    }
};

FileDigest write_text_output(const std::string& path, const std::string& text, const std::string& kind) {
    const std::vector<std::uint8_t> bytes(text.begin(), text.end());
    write_file_bytes(path, bytes);
    return FileDigest{path, sha256_hex(bytes), std::nullopt, kind, ""};
}

RunManifest start_manifest(const std::string& command, const std::vector<std::string>& args) {
    RunManifest m;
    m.command = command;
    m.argv = args;
    m.timestamp = utc_timestamp();
    return m;
}

// Recorded argv always carries the effective seed so a replay does not
// depend on the environment.
void pin_seed(RunManifest& m, const CLI::Option* seed_flag, std::uint64_t seed) {
    if (seed_flag->count() == 0) {
        m.argv.push_back("--seed");
        m.argv.push_back(std::to_string(seed));
    }
    m.seeds.push_back(seed);
}

SwitchingModelSet load_models(const std::string& config_path) {
    return config_path.empty() ? default_switching_models() : load_switching_models(config_path);
}

nlohmann::json pipeline_json(const PipelineSpec& spec) {
    nlohmann::json stages = nlohmann::json::array();
    for (const auto& st : spec.stages) stages.push_back(describe(st));
    return stages;
}

double ones_fraction(const BitStream& b) {
    return b.empty() ? 0.0 : static_cast<double>(b.count_ones()) / static_cast<double>(b.size());
}

// ---------------------------------------------------------------- generate

struct GenerateCmd {
    CLI::App* app;
    std::string preset;
    double bernoulli = 0.5;
    std::vector<double> markov;
    double mtj_current = 0.0;
    int t_write = 30;
    std::size_t bits = 0;
    std::uint64_t seed = 0;
    std::string model_config;
    CLI::Option *preset_opt, *bernoulli_opt, *markov_opt, *mtj_opt, *seed_opt;
    OutputFlags output;

    explicit GenerateCmd(CLI::App& root) {
        app = root.add_subcommand("generate", "simulate a raw MTJ bit stream");
        preset_opt = app->add_option("--preset", preset, "data-a (51.1% ones, 30 ns), data-b (27.6%, 30 ns), data-c (36.3%, 10 ns)")
                         ->check(CLI::IsMember({"data-a", "data-b", "data-c"}));
        bernoulli_opt = app->add_option("--bernoulli", bernoulli, "i.i.d. source with P(1) = p");
        markov_opt = app->add_option("--markov", markov, "two-state chain: p,rho")->delimiter(',')->expected(2);
        mtj_opt = app->add_option("--mtj-current", mtj_current, "MTJ write current in uA (uses --t-write model)");
        app->add_option("--t-write", t_write, "pulse width of the MTJ model in ns");
        app->add_option("--bits", bits, "number of bits")->required();
        seed_opt = app->add_option("--seed", seed, "simulation seed (default: $MRAMRNG_SEED, else 0)");
        app->add_option("--model-config", model_config, "switching model INI file");
        output.add(app);
    }

    int run(const std::vector<std::string>& args, std::ostream& out) {
        const int chosen = static_cast<int>(preset_opt->count() > 0) + static_cast<int>(bernoulli_opt->count() > 0) +
                           static_cast<int>(markov_opt->count() > 0) + static_cast<int>(mtj_opt->count() > 0);
        if (chosen != 1) throw InvalidInput("choose exactly one of --preset, --bernoulli, --markov, --mtj-current");
        const std::uint64_t s = resolve_seed(seed_opt, seed);
        const auto models = load_models(model_config);
        SourceConfig cfg{BernoulliSource{0.5}, s, bits};
        nlohmann::json params;
        if (preset_opt->count()) {
            const auto p = *find_preset(preset);
            const auto src = preset_source(p, models);
            cfg.kind = src;
            params = {{"source", "mtj"},
                      {"preset", preset},
                      {"target_ones_fraction", p.ones_fraction},
                      {"t_write_ns", p.t_write_ns},
                      {"current_ua", src.current_ua}};
        } else if (bernoulli_opt->count()) {
            cfg.kind = BernoulliSource{bernoulli};
            params = {{"source", "bernoulli"}, {"p", bernoulli}};
        } else if (markov_opt->count()) {
            cfg.kind = MarkovSource{markov.at(0), markov.at(1)};
            params = {{"source", "markov"}, {"p", markov.at(0)}, {"rho", markov.at(1)}};
        } else {
            cfg.kind = MtjSource{model_for(models, t_write), mtj_current};
            params = {{"source", "mtj"}, {"t_write_ns", t_write}, {"current_ua", mtj_current}};
        }
        params["bits"] = bits;
        const auto stream = generate(cfg);
        RunManifest m = start_manifest("generate", args);
        pin_seed(m, seed_opt, s);
        m.parameters = params;
        m.output = output.write(stream);
        write_manifest(manifest_path_for(output.path), m);
        out << "wrote " << stream.size() << " bits to " << output.path << " (ones fraction " << ones_fraction(stream)
            << ")\n";
        return kExitOk;
    }
};

// ------------------------------------------------------------- postprocess

struct PostprocessCmd {
    CLI::App* app;
    InputFlags input;
    OutputFlags output;
    PipelineFlags pipeline;

    explicit PostprocessCmd(CLI::App& root) {
        app = root.add_subcommand("postprocess", "run a post-processing pipeline over a bit file");
        input.add(app);
        output.add(app);
        pipeline.add(app);
    }

    int run(const std::vector<std::string>& args, std::ostream& out) {
        const auto spec = pipeline.build(app);
        if (spec.stages.empty()) throw InvalidInput("no pipeline stages given (--rejection, --lfsr, --ecc)");
        const auto in = input.load();
        const auto result = run_pipeline(spec, in.bits);
        RunManifest m = start_manifest("postprocess", args);
        m.parameters = {{"stages", pipeline_json(spec)}, {"compressor", pipeline.compressor},
                        {"lfsr_injection", pipeline.injection}};
        m.inputs.push_back(in.digest);
        m.output = output.write(result);
        write_manifest(manifest_path_for(output.path), m);
        out << spec.describe() << ": " << in.bits.size() << " -> " << result.size() << " bits";
        if (!in.bits.empty())
            out << " (ratio " << static_cast<double>(result.size()) / static_cast<double>(in.bits.size()) << ")";
        out << '\n';
        return kExitOk;
    }
};

// -------------------------------------------------------------------- test

struct TestCmd {
    CLI::App* app;
    InputFlags input;
    bool allow_short = false;
    bool json = false;
    std::string report_path;
    BatteryConfig config;

    explicit TestCmd(CLI::App& root) {
        app = root.add_subcommand("test", "run the statistical test battery");
        input.add(app);
        app->add_flag("--allow-short", allow_short, "accept inputs shorter than 10^6 bits");
        app->add_option("--alpha", config.alpha, "significance level")->check(CLI::Range(0.0, 1.0));
        app->add_option("--fail-threshold", config.fail_threshold, "maximum failures for a Pass");
        app->add_option("--block-size", config.block_frequency_m, "block frequency block size M");
        app->add_option("--serial-m", config.extended.serial_m, "serial test pattern length");
        app->add_option("--apen-m", config.extended.apen_m, "approximate entropy pattern length");
        app->add_option("--report", report_path, "write the JSON Lines report here");
        app->add_flag("--json", json, "print the JSON Lines report instead of the table");
    }

    int run(const std::vector<std::string>& args, std::ostream& out) {
        const auto in = input.load();
        if (in.bits.size() < kBatteryMinBits && !allow_short)
            throw InvalidInput("input has " + std::to_string(in.bits.size()) +
                               " bits; the battery needs 1000000 (use --allow-short to override)");
        const auto report = run_battery(in.bits, config);
        const auto lines = report_json_lines(report);
        if (!report_path.empty()) {
            RunManifest m = start_manifest("test", args);
            m.parameters = {{"alpha", config.alpha},
                            {"fail_threshold", config.fail_threshold},
                            {"block_frequency_m", config.block_frequency_m},
                            {"serial_m", config.extended.serial_m},
                            {"apen_m", config.extended.apen_m}};
            m.inputs.push_back(in.digest);
            m.output = write_text_output(report_path, lines, "jsonl");
            write_manifest(manifest_path_for(report_path), m);
        }
        out << (json ? lines : report_table(report));
        return report.verdict == Verdict::Pass ? kExitOk : kExitBatteryFail;
    }
};

// --------------------------------------------------------------- calibrate

struct CalibrateCmd {
    CLI::App* app;
    int t_write = 30;
    double target = 0.5;
    double tol = 0.0;
    bool empirical = false;
    std::size_t batch = 100000;
    std::uint64_t seed = 0;
    std::string model_config;
    std::string output;
    CLI::Option *seed_opt, *tol_opt;

    explicit CalibrateCmd(CLI::App& root) {
        app = root.add_subcommand("calibrate", "find the write current for a target switching probability");
        app->add_option("--t-write", t_write, "pulse width in ns");
        app->add_option("--target", target, "target probability of writing a 1");
        tol_opt = app->add_option("--tol", tol, "tolerance (default 1e-9 analytic, 0.005 empirical)");
        app->add_flag("--empirical", empirical, "calibrate against measured batches instead of the curve");
        app->add_option("--batch", batch, "bits per empirical batch");
        seed_opt = app->add_option("--seed", seed, "seed for empirical batches");
        app->add_option("--model-config", model_config, "switching model INI file");
        app->add_option("-o,--output", output, "write the result as JSON");
    }

    int run(const std::vector<std::string>& args, std::ostream& out) {
        const auto models = load_models(model_config);
        const auto& model = model_for(models, t_write);
        nlohmann::json result{{"t_write_ns", t_write}, {"target", target}, {"i50_ua", model.i50_ua},
                              {"slope_ua", model.slope_ua}};
        RunManifest m = start_manifest("calibrate", args);
        if (empirical) {
            const double t = tol_opt->count() ? tol : 0.005;
            const std::uint64_t s = resolve_seed(seed_opt, seed);
            pin_seed(m, seed_opt, s);
            const auto cal = calibrate_current_empirical(model, target, t, batch, s);
            result["mode"] = "empirical";
            result["tol"] = t;
            result["current_ua"] = cal.current_ua;
            result["measured_fraction"] = cal.measured_fraction;
            result["iterations"] = cal.iterations;
            result["model_probability"] = switching_probability(model, cal.current_ua);
            out << "current " << cal.current_ua << " uA: measured ones fraction " << cal.measured_fraction
                << " after " << cal.iterations << " batches of " << batch << " bits\n";
        } else {
            const double t = tol_opt->count() ? tol : 1e-9;
            const double i = calibrate_current(model, target, t);
            result["mode"] = "analytic";
            result["tol"] = t;
            result["current_ua"] = i;
            result["model_probability"] = switching_probability(model, i);
            out << "current " << i << " uA gives P_write = " << switching_probability(model, i) << " at "
                << t_write << " ns\n";
        }
        if (!output.empty()) {
            m.parameters = result;
            m.output = write_text_output(output, result.dump(2) + "\n", "json");
            write_manifest(manifest_path_for(output), m);
        }
        return kExitOk;
    }
};

// ------------------------------------------------------------------- speed

struct SpeedCmd {
    CLI::App* app;
    double read_ns = 10.0;
    int clocks = 4;
    std::string output;

    explicit SpeedCmd(CLI::App& root) {
        app = root.add_subcommand("speed", "estimate hardware generation speed");
        app->add_option("--read-ns", read_ns, "read time per access in ns");
        app->add_option("--clocks", clocks, "clocks needed per output bit");
        app->add_option("-o,--output", output, "write the table as JSON");
    }

    int run(const std::vector<std::string>& args, std::ostream& out) {
        const double mhz = speed_estimate_mhz(read_ns, clocks);
        const auto rows = speed_comparison(mhz);
        out << "estimated generation speed: " << mhz << " MHz (" << read_ns << " ns read, " << clocks
            << " clocks per bit)\n\n";
        char line[128];
        std::snprintf(line, sizeof line, "%-30s %s\n", "RNG", "Speed (MHz)");
        out << line;
        for (const auto& r : rows) {
            std::snprintf(line, sizeof line, "%-30s %g\n", r.rng.c_str(), r.mhz);
            out << line;
        }
        if (!output.empty()) {
            nlohmann::json j{{"read_ns", read_ns}, {"clocks_per_bit", clocks}, {"mhz", mhz}};
            j["comparison"] = nlohmann::json::array();
            for (const auto& r : rows) j["comparison"].push_back({{"rng", r.rng}, {"mhz", r.mhz}});
            RunManifest m = start_manifest("speed", args);
            m.parameters = {{"read_ns", read_ns}, {"clocks_per_bit", clocks}};
            m.output = write_text_output(output, j.dump(2) + "\n", "json");
            write_manifest(manifest_path_for(output), m);
        }
        return kExitOk;
    }
};

// ------------------------------------------------------------------- bench

struct ShardResult {
    std::size_t input_bits = 0;
    std::size_t output_bits = 0;
    std::chrono::nanoseconds generation{0};
    std::vector<StageTiming> stages;
    std::string digest;
};

std::uint64_t shard_seed(std::uint64_t seed, std::size_t shard) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (shard + 1);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

ShardResult run_shard(const PipelineSpec& spec, double p, std::uint64_t seed, std::size_t bits) {
    ShardResult r;
    const auto t0 = std::chrono::steady_clock::now();
    const auto raw = bernoulli_stream(p, seed, bits);
    r.generation = std::chrono::steady_clock::now() - t0;
    r.input_bits = raw.size();
    const auto out = run_pipeline(spec, raw, &r.stages);
    r.output_bits = out.size();
    r.digest = sha256_hex(pack_bits(out));
    return r;
}

struct BenchRun {
    std::vector<ShardResult> shards;
    std::chrono::nanoseconds wall{0};
};

BenchRun bench_once(const PipelineSpec& spec, double p, std::uint64_t seed, std::size_t bits, std::size_t workers) {
    BenchRun run;
    run.shards.resize(workers);
    const std::size_t per = bits / workers;
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t len = w + 1 == workers ? bits - per * (workers - 1) : per;
        pool.emplace_back([&, w, len] { run.shards[w] = run_shard(spec, p, shard_seed(seed, w), len); });
    }
    for (auto& t : pool) t.join();
    run.wall = std::chrono::steady_clock::now() - t0;
    return run;
}

double seconds(std::chrono::nanoseconds ns) { return static_cast<double>(ns.count()) * 1e-9; }

struct BenchCmd {
    CLI::App* app;
    std::size_t bytes = 1'000'000;
    double p = 0.5;
    std::uint64_t seed = 0;
    std::size_t workers = 1;
    bool compare = false;
    bool scaling = false;
    std::string output;
    CLI::Option* seed_opt;
    PipelineFlags pipeline;

    explicit BenchCmd(CLI::App& root) {
        app = root.add_subcommand("bench", "measure software throughput of generation + post-processing");
        app->add_option("--bytes", bytes, "raw input size in bytes")->check(CLI::PositiveNumber);
        app->add_option("--source-p", p, "P(1) of the simulated i.i.d. source")->check(CLI::Range(0.0, 1.0));
        seed_opt = app->add_option("--seed", seed, "simulation seed");
        app->add_option("--workers", workers, "independent seeded shards run in parallel")->check(CLI::PositiveNumber);
        app->add_flag("--compare-compressors", compare, "rerun ECC stages with the shift-register compressor and compare digests");
        app->add_flag("--scaling", scaling, "rerun at twice the input size and compare throughput");
        app->add_option("-o,--output", output, "write the benchmark report as JSON");
        pipeline.add(app);
    }

    int run(const std::vector<std::string>& args, std::ostream& out) {
        const auto spec = pipeline.build(app);
        if (spec.stages.empty()) throw InvalidInput("no pipeline stages given (--rejection, --lfsr, --ecc)");
        const std::uint64_t s = resolve_seed(seed_opt, seed);
        const std::size_t bits = bytes * 8;
        const auto run1 = bench_once(spec, p, s, bits, workers);

        std::size_t in_bits = 0, out_bits = 0;
        std::chrono::nanoseconds gen{0};
        std::vector<StageTiming> stages = run1.shards.front().stages;
        for (auto& st : stages) st.elapsed = std::chrono::nanoseconds{0}, st.input_bits = 0, st.output_bits = 0;
        nlohmann::json digests = nlohmann::json::array();
        for (const auto& sh : run1.shards) {
            in_bits += sh.input_bits;
            out_bits += sh.output_bits;
            gen += sh.generation;
            for (std::size_t i = 0; i < stages.size(); ++i) {
                stages[i].elapsed += sh.stages[i].elapsed;
                stages[i].input_bits += sh.stages[i].input_bits;
                stages[i].output_bits += sh.stages[i].output_bits;
            }
            digests.push_back(sh.digest);
        }
        std::chrono::nanoseconds busy = gen;
        for (const auto& st : stages) busy += st.elapsed;

        nlohmann::json report;
        report["input_bits"] = in_bits;
        report["input_bytes"] = bytes;
        report["output_bits"] = out_bits;
        report["workers"] = workers;
        report["wall_seconds"] = seconds(run1.wall);
        report["bits_per_second"] = static_cast<double>(in_bits) / seconds(run1.wall);
        report["generation"] = {{"seconds", seconds(gen)}, {"share", seconds(gen) / seconds(busy)}};
        report["stages"] = nlohmann::json::array();
        for (const auto& st : stages) {
            report["stages"].push_back({{"stage", st.name},
                                        {"input_bits", st.input_bits},
                                        {"output_bits", st.output_bits},
                                        {"seconds", seconds(st.elapsed)},
                                        {"bits_per_second", static_cast<double>(st.input_bits) / seconds(st.elapsed)},
                                        {"share", seconds(st.elapsed) / seconds(busy)}});
        }
        report["output_digests"] = digests;

        char line[200];
        out << "pipeline: " << spec.describe() << '\n';
        out << "input: " << in_bits << " bits (" << bytes << " bytes), output: " << out_bits << " bits, workers: "
            << workers << '\n';
        std::snprintf(line, sizeof line, "end-to-end: %.3f s wall, %.3e bits/s\n", seconds(run1.wall),
                      static_cast<double>(in_bits) / seconds(run1.wall));
        out << line;
        std::snprintf(line, sizeof line, "  %-34s %10.4f s  %5.1f %%\n", "generation", seconds(gen),
                      100.0 * seconds(gen) / seconds(busy));
        out << line;
        for (const auto& st : stages) {
            std::snprintf(line, sizeof line, "  %-34s %10.4f s  %5.1f %%  %.3e bits/s\n", st.name.c_str(),
                          seconds(st.elapsed), 100.0 * seconds(st.elapsed) / seconds(busy),
                          static_cast<double>(st.input_bits) / seconds(st.elapsed));
            out << line;
        }

        if (compare) {
            PipelineSpec alt = spec;
            for (auto& st : alt.stages)
                if (auto* e = std::get_if<EccStage>(&st))
                    e->compressor = e->compressor == CompressorKind::Matrix ? CompressorKind::ShiftRegister
                                                                            : CompressorKind::Matrix;
            const auto run2 = bench_once(alt, p, s, bits, workers);
            bool same = true;
            for (std::size_t w = 0; w < workers; ++w) same = same && run2.shards[w].digest == run1.shards[w].digest;
            report["compressor_comparison"] = {{"identical", same},
                                               {"alternate_wall_seconds", seconds(run2.wall)}};
            out << "compressor equivalence: " << (same ? "identical output digests" : "DIGEST MISMATCH") << " ("
                << seconds(run1.wall) << " s vs " << seconds(run2.wall) << " s)\n";
            if (!same) return kExitUsage;
        }
        if (scaling) {
            const auto run2 = bench_once(spec, p, s, 2 * bits, workers);
            const double tp1 = static_cast<double>(bits) / seconds(run1.wall);
            const double tp2 = static_cast<double>(2 * bits) / seconds(run2.wall);
            const double ratio = tp2 / tp1;
            report["scaling"] = {{"throughput_ratio", ratio}, {"within_20_percent", std::abs(ratio - 1.0) <= 0.2}};
            std::snprintf(line, sizeof line, "scaling: 2x input -> throughput ratio %.3f\n", ratio);
            out << line;
        }
        if (!output.empty()) {
            RunManifest m = start_manifest("bench", args);
            pin_seed(m, seed_opt, s);
            m.replay_check = "digests";
            m.parameters = {{"stages", pipeline_json(spec)}, {"bytes", bytes}, {"source_p", p}, {"workers", workers}};
            m.output = write_text_output(output, report.dump(2) + "\n", "json");
            write_manifest(manifest_path_for(output), m);
        }
        return kExitOk;
    }
};

// ----------------------------------------------------------------- convert

struct ConvertCmd {
    CLI::App* app;
    InputFlags input;
    OutputFlags output;

    explicit ConvertCmd(CLI::App& root) {
        app = root.add_subcommand("convert", "convert between packed and ascii bit files");
        input.add(app);
        output.add(app);
    }

    int run(const std::vector<std::string>& args, std::ostream& out) {
        const auto in = input.load();
        RunManifest m = start_manifest("convert", args);
        m.inputs.push_back(in.digest);
        m.output = output.write(in.bits);
        write_manifest(manifest_path_for(output.path), m);
        out << "wrote " << in.bits.size() << " bits to " << output.path << " (" << m.output->encoding << ")\n";
        return kExitOk;
    }
};

// ------------------------------------------------------------------ replay

std::vector<std::string> with_output(std::vector<std::string> argv, const std::string& new_path) {
    for (std::size_t i = 0; i + 1 < argv.size(); ++i) {
        if (argv[i] == "-o" || argv[i] == "--output" || argv[i] == "--report") {
            argv[i + 1] = new_path;
            return argv;
        }
        for (const char* flag : {"--output=", "--report="}) {
            if (argv[i].rfind(flag, 0) == 0) {
                argv[i] = std::string(flag) + new_path;
                return argv;
            }
        }
    }
    throw InvalidInput("manifest argv has no output argument");
}

struct ReplayCmd {
    CLI::App* app;
    std::string manifest_path;
    std::string output;

    explicit ReplayCmd(CLI::App& root) {
        app = root.add_subcommand("replay", "rerun a manifest and check the output is byte-identical");
        app->add_option("manifest", manifest_path, "manifest file")->required();
        app->add_option("-o,--output", output, "where to write the replayed output (default: <output>.replay)");
    }

    int run(std::ostream& out, std::ostream& err) {
        const auto m = read_manifest(manifest_path);
        if (!m.output) throw InvalidInput("manifest records no output to compare");
        const std::string target = output.empty() ? m.output->path + ".replay" : output;
        auto argv = with_output(m.argv, target);
        argv.insert(argv.begin(), m.command);
        std::ostringstream sink;
        const int code = mramrng::cli::run(argv, sink, err);
        if (code != kExitOk && code != kExitBatteryFail) {
            err << "replayed command exited with " << code << '\n';
            return code;
        }
        bool same = false;
        if (m.replay_check == "digests") {
            const auto fresh = nlohmann::json::parse(std::string(
                reinterpret_cast<const char*>(read_file_bytes(target).data()), read_file_bytes(target).size()));
            const auto old = nlohmann::json::parse(std::string(
                reinterpret_cast<const char*>(read_file_bytes(m.output->path).data()),
                read_file_bytes(m.output->path).size()));
            same = fresh.at("output_digests") == old.at("output_digests");
        } else {
            same = sha256_file(target) == m.output->sha256;
        }
        out << (same ? "replay matches " : "replay differs from ") << m.output->path << " (" << target << ")\n";
        return same ? kExitOk : kExitReplayMismatch;
    }
};

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"mramrng: MTJ entropy source simulation, ECC/LFSR/rejection post-processing and randomness tests"};
    app.require_subcommand(1);
    GenerateCmd generate_cmd(app);
    PostprocessCmd postprocess_cmd(app);
    TestCmd test_cmd(app);
    CalibrateCmd calibrate_cmd(app);
    SpeedCmd speed_cmd(app);
    BenchCmd bench_cmd(app);
    ConvertCmd convert_cmd(app);
    ReplayCmd replay_cmd(app);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const std::vector<std::string> sub_args(args.begin() + (args.empty() ? 0 : 1), args.end());
    try {
        if (*generate_cmd.app) return generate_cmd.run(sub_args, out);
        if (*postprocess_cmd.app) return postprocess_cmd.run(sub_args, out);
        if (*test_cmd.app) return test_cmd.run(sub_args, out);
        if (*calibrate_cmd.app) return calibrate_cmd.run(sub_args, out);
        if (*speed_cmd.app) return speed_cmd.run(sub_args, out);
        if (*bench_cmd.app) return bench_cmd.run(sub_args, out);
        if (*convert_cmd.app) return convert_cmd.run(sub_args, out);
        if (*replay_cmd.app) return replay_cmd.run(out, err);
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const CalibrationFailure& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const EmptyBattery& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace mramrng::cli
