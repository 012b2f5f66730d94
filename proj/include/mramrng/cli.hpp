#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mramrng::cli {

/// Process exit codes; stable across releases.
enum ExitCode : int {
    kExitOk = 0,          // success, or battery Pass
    kExitUsage = 1,       // bad flags, invalid configuration, unknown code
    kExitIo = 2,          // unreadable input or unwritable output
    kExitBatteryFail = 3, // `test` verdict Fail
    kExitReplayMismatch = 4,
};

/// Environment variable consulted when --seed is absent.
inline constexpr const char* kSeedEnvVar = "MRAMRNG_SEED";

/// Runs one command line (arguments after the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Bits per second figure in MHz: 1000 / (read_ns * clocks_per_bit).
double speed_estimate_mhz(double read_ns, int clocks_per_bit);

struct SpeedRow {
    std::string rng;
    double mhz;
};

/// Reference generators followed by the MRAM estimate.
std::vector<SpeedRow> speed_comparison(double mram_mhz);

} // namespace mramrng::cli
