#pragma once

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mramrng {

inline constexpr const char* kToolVersion = "0.3.0";

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_file(const std::string& path);

struct FileDigest {
    std::string path;
    std::string sha256;
    std::optional<std::size_t> bit_count;
    std::string encoding; // "packed", "ascii" or "json"
    std::string bit_order;
};

/// Sidecar record written next to every output: enough to rerun the command
/// and check the result byte for byte.
struct RunManifest {
    std::string command;
    std::vector<std::string> argv; // arguments after the program name
    nlohmann::json parameters = nlohmann::json::object();
    std::vector<std::uint64_t> seeds;
    std::vector<FileDigest> inputs;
    std::optional<FileDigest> output;
    std::string tool_version = kToolVersion;
    std::string timestamp;
    /// "file": replay compares output file digests.
    /// "digests": replay compares the output_digests field of the JSON output.
    std::string replay_check = "file";
};

nlohmann::json to_json(const RunManifest& m);
RunManifest manifest_from_json(const nlohmann::json& j);

std::string manifest_path_for(const std::string& output_path);
void write_manifest(const std::string& path, const RunManifest& m);
RunManifest read_manifest(const std::string& path);

std::string utc_timestamp();

} // namespace mramrng
