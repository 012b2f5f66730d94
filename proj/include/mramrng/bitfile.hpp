#pragma once

#include "mramrng/bits.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mramrng {

/// packed: 8 bits per byte, pad bits in the last byte are zero.
/// ascii: '0'/'1' characters, whitespace ignored.
enum class BitEncoding { Packed, Ascii };

/// Order of bits inside a packed byte. Files written by this tool are
/// always MSB-first; LSB-first exists only for ingesting foreign captures.
enum class BitOrder { MsbFirst, LsbFirst };

const char* to_string(BitEncoding e) noexcept;
const char* to_string(BitOrder o) noexcept;
BitEncoding parse_encoding(std::string_view s);
BitOrder parse_bit_order(std::string_view s);

/// ".txt" and ".ascii" files are ascii, everything else packed.
BitEncoding encoding_for_path(const std::string& path);

std::vector<std::uint8_t> pack_bits(const BitStream& bits, BitOrder order = BitOrder::MsbFirst);
/// Reads `bit_count` bits (default: every bit of the payload).
BitStream unpack_bits(std::span<const std::uint8_t> bytes, std::optional<std::size_t> bit_count = std::nullopt,
                      BitOrder order = BitOrder::MsbFirst);

std::string to_ascii(const BitStream& bits, std::size_t line_width = 64);
BitStream parse_ascii(std::string_view text);

/// Serialized file contents for the given encoding.
std::vector<std::uint8_t> encode_bit_file(const BitStream& bits, BitEncoding encoding,
                                          BitOrder order = BitOrder::MsbFirst);

void write_bit_file(const std::string& path, const BitStream& bits, BitEncoding encoding,
                    BitOrder order = BitOrder::MsbFirst);
BitStream read_bit_file(const std::string& path, BitEncoding encoding, BitOrder order = BitOrder::MsbFirst,
                        std::optional<std::size_t> bit_count = std::nullopt);

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes);

} // namespace mramrng
