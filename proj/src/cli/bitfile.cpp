#include "mramrng/bitfile.hpp"

#include "mramrng/errors.hpp"

#include <filesystem>
#include <fstream>
#include <iterator>

namespace mramrng {

const char* to_string(BitEncoding e) noexcept { return e == BitEncoding::Packed ? "packed" : "ascii"; }
const char* to_string(BitOrder o) noexcept { return o == BitOrder::MsbFirst ? "msb" : "lsb"; }

BitEncoding parse_encoding(std::string_view s) {
    if (s == "packed") return BitEncoding::Packed;
    if (s == "ascii") return BitEncoding::Ascii;
    throw InvalidInput("unknown bit encoding '" + std::string(s) + "' (packed|ascii)");
}

BitOrder parse_bit_order(std::string_view s) {
    if (s == "msb") return BitOrder::MsbFirst;
    if (s == "lsb") return BitOrder::LsbFirst;
    throw InvalidInput("unknown bit order '" + std::string(s) + "' (msb|lsb)");
}

BitEncoding encoding_for_path(const std::string& path) {
    const auto ext = std::filesystem::path(path).extension().string();
    return (ext == ".txt" || ext == ".ascii") ? BitEncoding::Ascii : BitEncoding::Packed;
}

std::vector<std::uint8_t> pack_bits(const BitStream& bits, BitOrder order) {
    std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (!bits[i]) continue;
        const unsigned shift = order == BitOrder::MsbFirst ? 7 - (i & 7) : (i & 7);
        bytes[i >> 3] |= static_cast<std::uint8_t>(1u << shift);
    }
    return bytes;
}

BitStream unpack_bits(std::span<const std::uint8_t> bytes, std::optional<std::size_t> bit_count, BitOrder order) {
    const std::size_t available = bytes.size() * 8;
    const std::size_t count = bit_count.value_or(available);
    if (count > available)
        throw InvalidInput("bit count " + std::to_string(count) + " exceeds the " + std::to_string(available) +
                           " bits in the payload");
    BitStream out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const unsigned shift = order == BitOrder::MsbFirst ? 7 - (i & 7) : (i & 7);
        out.push_back((bytes[i >> 3] >> shift) & 1u);
    }
    return out;
}

std::string to_ascii(const BitStream& bits, std::size_t line_width) {
    std::string s;
    s.reserve(bits.size() + bits.size() / (line_width ? line_width : 1) + 1);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        s.push_back(bits[i] ? '1' : '0');
        if (line_width && (i + 1) % line_width == 0) s.push_back('\n');
    }
    if (s.empty() || s.back() != '\n') s.push_back('\n');
    return s;
}

BitStream parse_ascii(std::string_view text) {
    BitStream out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '0': out.push_back(false); break;
        case '1': out.push_back(true); break;
        case ' ':
        case '\t':
        case '\n':
        case '\r': break;
        default: throw InvalidInput(std::string("ascii bit file contains '") + c + "'");
        }
    }
    return out;
}

std::vector<std::uint8_t> encode_bit_file(const BitStream& bits, BitEncoding encoding, BitOrder order) {
    if (encoding == BitEncoding::Packed) return pack_bits(bits, order);
    const auto text = to_ascii(bits);
    return {text.begin(), text.end()};
}

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("error reading " + path);
    return bytes;
}

void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("error writing " + path);
}

void write_bit_file(const std::string& path, const BitStream& bits, BitEncoding encoding, BitOrder order) {
    write_file_bytes(path, encode_bit_file(bits, encoding, order));
}

BitStream read_bit_file(const std::string& path, BitEncoding encoding, BitOrder order,
                        std::optional<std::size_t> bit_count) {
    const auto bytes = read_file_bytes(path);
    if (encoding == BitEncoding::Packed) return unpack_bits(bytes, bit_count, order);
    auto bits = parse_ascii(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    if (bit_count) {
        if (*bit_count > bits.size()) throw InvalidInput("bit count exceeds the ascii payload");
        bits.truncate(*bit_count);
    }
    return bits;
}

} // namespace mramrng
