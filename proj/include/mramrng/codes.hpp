#pragma once

#include "mramrng/bits.hpp"
#include "mramrng/gf2.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace mramrng {

/// Binary (n, k, t) BCH code with its generator polynomial.
struct BchCode {
    std::size_t n = 0;
    std::size_t k = 0;
    std::size_t t = 0;
    std::string octal; // generator in octal notation, as listed in the registry
    Gf2Poly g;

    double rate() const noexcept { return static_cast<double>(k) / static_cast<double>(n); }
    std::string label() const;

    friend bool operator==(const BchCode& a, const BchCode& b) noexcept {
        return a.n == b.n && a.k == b.k && a.t == b.t && a.g == b.g;
    }
};

/// Builds and validates a code: deg g == n - k, g | x^n + 1, n > k >= 1, t >= 1.
BchCode make_bch_code(std::size_t n, std::size_t k, std::size_t t, std::string octal);

/// The shipped codes, ordered by (n, t): the (7,4,1) Hamming code plus the
/// twelve n = 31/63/127 narrow-sense codes.
const std::vector<BchCode>& code_registry();

/// Looks a code up by its (n, k, t) triple.
std::optional<BchCode> find_code(std::size_t n, std::size_t k, std::size_t t);

/// Generator for (127,113,2) as it appears in some published tables. It has
/// degree 15 and does not divide x^127 + 1; the registry ships 41567.
inline constexpr const char* kMisprintedOctal127_113 = "141567";

/// The k x n banded generator matrix: row i holds the coefficients of g,
/// highest degree first, starting at column i.
struct CompressionMatrix {
    BchCode code;
    Gf2Matrix matrix;
};

CompressionMatrix build_compression_matrix(const BchCode& code);

/// z = G y for one n-bit block.
BitStream compress_block(const BchCode& code, const BitStream& y);

/// Block-wise z = G y using packed row masks. Emits k bits per complete
/// n-bit block; a trailing partial block is dropped.
BitStream compress_stream_matrix(const BchCode& code, const BitStream& bits);

/// Same map evaluated bit-serially: an (n-k+1)-cell shift register with
/// taps at the set coefficients of g, reset at every block boundary. Each
/// of the last k shifts of a block emits one output bit.
BitStream compress_stream_shiftreg(const BchCode& code, const BitStream& bits);

/// Reusable block compressor for the hot path (one per code).
class BlockCompressor {
public:
    explicit BlockCompressor(const BchCode& code);

    std::size_t n() const noexcept { return n_; }
    std::size_t k() const noexcept { return k_; }

    /// Compresses every whole block in `bits` and appends the result to `out`.
    void compress(const BitStream& bits, BitStream& out) const;

private:
    std::size_t n_;
    std::size_t k_;
    std::vector<std::array<std::uint64_t, 2>> rows_;
};

/// Non-systematic encoding c = m G, i.e. c(x) = m(x) g(x) with column j of
/// the codeword holding the coefficient of x^(n-1-j).
BitStream bch_encode(const BchCode& code, const BitStream& message);

enum class DecodeStatus { Ok, Uncorrectable };

struct DecodeResult {
    DecodeStatus status = DecodeStatus::Ok;
    BitStream message;
    std::size_t errors_corrected = 0;

    bool ok() const noexcept { return status == DecodeStatus::Ok; }
};

/// Syndrome decoder: Berlekamp-Massey for the error locator, Chien search
/// for its roots, then exact division by g to recover the message.
class BchDecoder {
public:
    explicit BchDecoder(const BchCode& code);

    const BchCode& code() const noexcept { return code_; }
    DecodeResult decode(const BitStream& received) const;

    /// Syndromes S_1..S_2t of a received word, as field elements.
    std::vector<std::uint16_t> syndromes(const BitStream& received) const;

private:
    std::uint16_t mul(std::uint16_t a, std::uint16_t b) const noexcept;
    std::uint16_t inv(std::uint16_t a) const noexcept;

    BchCode code_;
    unsigned m_ = 0;
    std::vector<std::uint16_t> exp_; // exp_[i] = alpha^i, doubled for index wrap
    std::vector<int> log_;
};

DecodeResult bch_decode(const BchCode& code, const BitStream& received);

/// Per-bit bias of the compressed output for an i.i.d. source with
/// P(1) = (1 + e) / 2: each output bit XORs w = weight(g) independent inputs,
/// so its bias is e^w (piling-up lemma). Since w >= d, this is at most e^d.
double predicted_output_bias(const BchCode& code, double e);

} // namespace mramrng
