#include "mramrng/bits.hpp"

#include "mramrng/errors.hpp"

#include <algorithm>

namespace mramrng {

BitStream::BitStream(std::size_t n, bool value)
    : words_((n + 63) / 64, value ? ~std::uint64_t{0} : 0), size_(n) {
    if (value && (n & 63) != 0) words_.back() &= (std::uint64_t{1} << (n & 63)) - 1;
}

BitStream BitStream::from_string(std::string_view text) {
    BitStream out;
    out.reserve(text.size());
    for (char c : text) {
        if (c == '0')
            out.push_back(false);
        else if (c == '1')
            out.push_back(true);
        else
            throw InvalidInput(std::string("bit string contains non-binary character '") + c + "'");
    }
    return out;
}

bool BitStream::at(std::size_t i) const {
    if (i >= size_) throw InvalidInput("bit index out of range");
    return (*this)[i];
}

void BitStream::push_back(bool value) {
    if ((size_ & 63) == 0) words_.push_back(0);
    if (value) words_.back() |= std::uint64_t{1} << (size_ & 63);
    ++size_;
}

void BitStream::append_bits(std::uint64_t bits, unsigned count) {
    if (count == 0) return;
    if (count < 64) bits &= (std::uint64_t{1} << count) - 1;
    const unsigned off = size_ & 63;
    if (off == 0) {
        words_.push_back(bits);
    } else {
        words_.back() |= bits << off;
        if (off + count > 64) words_.push_back(bits >> (64 - off));
    }
    size_ += count;
}

void BitStream::append(const BitStream& other) {
    reserve(size_ + other.size_);
    const std::size_t full = other.size_ / 64;
    for (std::size_t w = 0; w < full; ++w) append_bits(other.words_[w], 64);
    const unsigned rest = other.size_ & 63;
    if (rest != 0) append_bits(other.words_[full], rest);
}

void BitStream::truncate(std::size_t n) {
    if (n > size_) throw InvalidInput("truncate beyond stream length");
    size_ = n;
    words_.resize((n + 63) / 64);
    if ((n & 63) != 0) words_.back() &= (std::uint64_t{1} << (n & 63)) - 1;
}

BitStream BitStream::slice(std::size_t pos, std::size_t count) const {
    if (pos > size_ || count > size_ - pos) throw InvalidInput("slice out of range");
    BitStream out;
    out.reserve(count);
    std::size_t i = 0;
    for (; i + 64 <= count; i += 64) out.append_bits(extract(pos + i, 64), 64);
    if (i < count) out.append_bits(extract(pos + i, static_cast<unsigned>(count - i)), static_cast<unsigned>(count - i));
    return out;
}

std::size_t BitStream::count_ones() const noexcept {
    std::size_t total = 0;
    for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
    return total;
}

std::string BitStream::to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i)
        if ((*this)[i]) s[i] = '1';
    return s;
}

BitStream& BitStream::operator^=(const BitStream& other) {
    if (other.size_ != size_) throw InvalidInput("XOR of bit streams with different lengths");
    std::transform(words_.begin(), words_.end(), other.words_.begin(), words_.begin(),
                   [](std::uint64_t a, std::uint64_t b) { return a ^ b; });
    return *this;
}

BitStream operator^(BitStream a, const BitStream& b) {
    a ^= b;
    return a;
}

} // namespace mramrng
