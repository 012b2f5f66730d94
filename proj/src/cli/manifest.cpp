#include "mramrng/manifest.hpp"

#include "mramrng/bitfile.hpp"
#include "mramrng/errors.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>

namespace mramrng {

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1)
        throw std::runtime_error("SHA-256 computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 15]);
    }
    return out;
}

std::string sha256_file(const std::string& path) { return sha256_hex(read_file_bytes(path)); }

namespace {

nlohmann::json digest_json(const FileDigest& d) {
    nlohmann::json j{{"path", d.path}, {"sha256", d.sha256}, {"encoding", d.encoding}, {"bit_order", d.bit_order}};
    j["bit_count"] = d.bit_count ? nlohmann::json(*d.bit_count) : nlohmann::json(nullptr);
    return j;
}

FileDigest digest_from_json(const nlohmann::json& j) {
    FileDigest d;
    d.path = j.at("path").get<std::string>();
    d.sha256 = j.at("sha256").get<std::string>();
    d.encoding = j.value("encoding", "");
    d.bit_order = j.value("bit_order", "");
    if (j.contains("bit_count") && !j.at("bit_count").is_null()) d.bit_count = j.at("bit_count").get<std::size_t>();
    return d;
}

} // namespace

nlohmann::json to_json(const RunManifest& m) {
    nlohmann::json j;
    j["tool"] = "mramrng";
    j["tool_version"] = m.tool_version;
    j["command"] = m.command;
    j["argv"] = m.argv;
    j["parameters"] = m.parameters;
    j["seeds"] = m.seeds;
    j["inputs"] = nlohmann::json::array();
    for (const auto& in : m.inputs) j["inputs"].push_back(digest_json(in));
    j["output"] = m.output ? digest_json(*m.output) : nlohmann::json(nullptr);
    j["timestamp"] = m.timestamp;
    j["replay_check"] = m.replay_check;
    return j;
}

RunManifest manifest_from_json(const nlohmann::json& j) {
    RunManifest m;
    try {
        m.command = j.at("command").get<std::string>();
        m.argv = j.at("argv").get<std::vector<std::string>>();
        m.parameters = j.value("parameters", nlohmann::json::object());
        m.seeds = j.value("seeds", std::vector<std::uint64_t>{});
        for (const auto& in : j.value("inputs", nlohmann::json::array())) m.inputs.push_back(digest_from_json(in));
        if (j.contains("output") && !j.at("output").is_null()) m.output = digest_from_json(j.at("output"));
        m.tool_version = j.value("tool_version", "");
        m.timestamp = j.value("timestamp", "");
        m.replay_check = j.value("replay_check", "file");
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput(std::string("malformed manifest: ") + e.what());
    }
    return m;
}

std::string manifest_path_for(const std::string& output_path) { return output_path + ".manifest.json"; }

void write_manifest(const std::string& path, const RunManifest& m) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write manifest " + path);
    out << to_json(m).dump(2) << '\n';
    if (!out) throw IoError("error writing manifest " + path);
}

RunManifest read_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidInput("manifest " + path + " is not valid JSON: " + e.what());
    }
    return manifest_from_json(j);
}

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace mramrng
