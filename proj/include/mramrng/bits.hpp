#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mramrng {

/// Packed bit sequence with an exact length.
///
/// Bit i lives in word i / 64 at bit position i % 64 (LSB-first inside a
/// word). Bits past size() in the last word are always zero, so word-wise
/// popcounts and comparisons never see stale data.
class BitStream {
public:
    BitStream() = default;
    explicit BitStream(std::size_t n, bool value = false);

    /// Parses '0'/'1' characters; any other character is rejected.
    static BitStream from_string(std::string_view text);

    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }

    bool operator[](std::size_t i) const noexcept {
        return (words_[i >> 6] >> (i & 63)) & 1u;
    }
    bool at(std::size_t i) const;
    void set(std::size_t i, bool value) noexcept {
        const std::uint64_t mask = std::uint64_t{1} << (i & 63);
        if (value)
            words_[i >> 6] |= mask;
        else
            words_[i >> 6] &= ~mask;
    }
    void flip(std::size_t i) noexcept { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

    void push_back(bool value);
    /// Appends the low `count` bits of `bits` (bit 0 first); count <= 64.
    void append_bits(std::uint64_t bits, unsigned count);
    void append(const BitStream& other);
    void reserve(std::size_t n) { words_.reserve((n + 63) / 64); }
    void clear() noexcept {
        words_.clear();
        size_ = 0;
    }
    /// Shrinks to the first n bits (n <= size()).
    void truncate(std::size_t n);

    /// Returns `count` bits starting at `pos` as an integer, bit `pos` in
    /// bit 0. count <= 64 and pos + count <= size().
    std::uint64_t extract(std::size_t pos, unsigned count) const noexcept {
        if (count == 0) return 0;
        const std::size_t w = pos >> 6;
        const unsigned off = pos & 63;
        std::uint64_t v = words_[w] >> off;
        if (off != 0 && off + count > 64) v |= words_[w + 1] << (64 - off);
        return count == 64 ? v : v & ((std::uint64_t{1} << count) - 1);
    }

    BitStream slice(std::size_t pos, std::size_t count) const;

    std::size_t count_ones() const noexcept;
    std::span<const std::uint64_t> words() const noexcept { return words_; }

    std::string to_string() const;

    friend bool operator==(const BitStream& a, const BitStream& b) noexcept {
        return a.size_ == b.size_ && a.words_ == b.words_;
    }

    BitStream& operator^=(const BitStream& other);

private:
    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
};

BitStream operator^(BitStream a, const BitStream& b);

inline int parity64(std::uint64_t v) noexcept { return std::popcount(v) & 1; }

} // namespace mramrng
