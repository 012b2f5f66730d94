#include "mramrng/codes.hpp"

#include "mramrng/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace mramrng {

std::string BchCode::label() const {
    return "(" + std::to_string(n) + "," + std::to_string(k) + "," + std::to_string(t) + ")";
}

BchCode make_bch_code(std::size_t n, std::size_t k, std::size_t t, std::string octal) {
    if (!(n > k && k >= 1)) throw InvalidInput("BCH code requires n > k >= 1");
    if (t < 1) throw InvalidInput("BCH code requires t >= 1");
    if (n > 127) throw InvalidInput("block lengths above 127 are not supported");
    Gf2Poly g = poly_from_octal(octal);
    if (g.degree() != n - k)
        throw InvalidInput("generator " + octal + " has degree " + std::to_string(g.degree()) +
                           ", expected n - k = " + std::to_string(n - k));
    const Gf2Poly xn1 = Gf2Poly::monomial(n) + Gf2Poly::one();
    if (!poly_mod(xn1, g).is_zero())
        throw InvalidInput("generator " + octal + " does not divide x^" + std::to_string(n) + " + 1");
    return BchCode{n, k, t, std::move(octal), std::move(g)};
}

const std::vector<BchCode>& code_registry() {
    static const std::vector<BchCode> registry = [] {
        std::vector<BchCode> r;
        r.push_back(make_bch_code(7, 4, 1, "13"));
        r.push_back(make_bch_code(31, 26, 1, "45"));
        r.push_back(make_bch_code(31, 21, 2, "3551"));
        r.push_back(make_bch_code(31, 16, 3, "107657"));
        r.push_back(make_bch_code(31, 11, 5, "5423325"));
        r.push_back(make_bch_code(63, 57, 1, "103"));
        r.push_back(make_bch_code(63, 51, 2, "12471"));
        r.push_back(make_bch_code(63, 45, 3, "1701317"));
        r.push_back(make_bch_code(63, 39, 4, "166623567"));
        r.push_back(make_bch_code(127, 120, 1, "211"));
        r.push_back(make_bch_code(127, 113, 2, "41567"));
        r.push_back(make_bch_code(127, 106, 3, "11554743"));
        r.push_back(make_bch_code(127, 99, 4, "3447023271"));
        return r;
    }();
    return registry;
}

std::optional<BchCode> find_code(std::size_t n, std::size_t k, std::size_t t) {
    for (const auto& c : code_registry())
        if (c.n == n && c.k == k && c.t == t) return c;
    return std::nullopt;
}

CompressionMatrix build_compression_matrix(const BchCode& code) {
    Gf2Matrix m(code.k, code.n);
    const std::size_t r = code.n - code.k;
    for (std::size_t i = 0; i < code.k; ++i)
        for (std::size_t l = 0; l <= r; ++l)
            if (code.g.coefficient(r - l)) m.set(i, i + l, true);
    return {code, std::move(m)};
}

BitStream compress_block(const BchCode& code, const BitStream& y) {
    if (y.size() != code.n)
        throw InvalidInput("compress_block: block has " + std::to_string(y.size()) + " bits, code " +
                           code.label() + " needs " + std::to_string(code.n));
    return matvec(build_compression_matrix(code).matrix, y);
}

BlockCompressor::BlockCompressor(const BchCode& code) : n_(code.n), k_(code.k) {
    const auto cm = build_compression_matrix(code);
    rows_.reserve(k_);
    for (std::size_t i = 0; i < k_; ++i) {
        const auto row = cm.matrix.row(i);
        rows_.push_back({row[0], row.size() > 1 ? row[1] : 0});
    }
}

void BlockCompressor::compress(const BitStream& bits, BitStream& out) const {
    const std::size_t blocks = bits.size() / n_;
    out.reserve(out.size() + blocks * k_);
    const unsigned lo_bits = static_cast<unsigned>(std::min<std::size_t>(n_, 64));
    const unsigned hi_bits = static_cast<unsigned>(n_ - lo_bits);
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t pos = b * n_;
        const std::uint64_t w0 = bits.extract(pos, lo_bits);
        const std::uint64_t w1 = hi_bits ? bits.extract(pos + 64, hi_bits) : 0;
        std::uint64_t acc = 0;
        unsigned filled = 0;
        for (const auto& row : rows_) {
            acc |= static_cast<std::uint64_t>(parity64((row[0] & w0) ^ (row[1] & w1))) << filled;
            if (++filled == 64) {
                out.append_bits(acc, 64);
                acc = 0;
                filled = 0;
            }
        }
        out.append_bits(acc, filled);
    }
}

BitStream compress_stream_matrix(const BchCode& code, const BitStream& bits) {
    BitStream out;
    BlockCompressor(code).compress(bits, out);
    return out;
}

BitStream compress_stream_shiftreg(const BchCode& code, const BitStream& bits) {
    const std::size_t n = code.n;
    const std::size_t span = code.n - code.k; // register holds span + 1 cells
    // taps[p] = g_p: cell p holds the bit shifted in p steps ago.
    std::array<std::uint64_t, 2> taps{0, 0};
    for (std::size_t p = 0; p <= span; ++p)
        if (code.g.coefficient(p)) taps[p >> 6] |= std::uint64_t{1} << (p & 63);
    const std::size_t cells = span + 1;
    const std::uint64_t hi_mask =
        cells > 64 ? (cells == 128 ? ~std::uint64_t{0} : (std::uint64_t{1} << (cells - 64)) - 1) : 0;
    const std::uint64_t lo_mask = cells >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << cells) - 1;

    BitStream out;
    const std::size_t blocks = bits.size() / n;
    out.reserve(blocks * code.k);
    for (std::size_t b = 0; b < blocks; ++b) {
        std::array<std::uint64_t, 2> reg{0, 0};
        for (std::size_t j = 0; j < n; ++j) {
            const std::uint64_t in = bits[b * n + j] ? 1u : 0u;
            reg[1] = ((reg[1] << 1) | (reg[0] >> 63)) & hi_mask;
            reg[0] = ((reg[0] << 1) | in) & lo_mask;
            if (j >= span) out.push_back(parity64((reg[0] & taps[0]) ^ (reg[1] & taps[1])) != 0);
        }
    }
    return out;
}

BitStream bch_encode(const BchCode& code, const BitStream& message) {
    if (message.size() != code.k)
        throw InvalidInput("bch_encode: message has " + std::to_string(message.size()) + " bits, code " +
                           code.label() + " needs " + std::to_string(code.k));
    return vecmat(message, build_compression_matrix(code).matrix);
}

namespace {

// Primitive polynomials for GF(2^m), bit i = coefficient of x^i.
std::uint32_t default_primitive(unsigned m) {
    switch (m) {
    case 2: return 0b111;
    case 3: return 0b1011;
    case 4: return 0b10011;
    case 5: return 0b100101;
    case 6: return 0b1000011;
    case 7: return 0b10001001;
    default: throw InvalidInput("no default field for m = " + std::to_string(m));
    }
}

Gf2Poly word_to_poly(const BitStream& word, std::size_t n) {
    // Column j carries the coefficient of x^(n-1-j).
    Gf2Poly p;
    for (std::size_t j = 0; j < n; ++j)
        if (word[j]) p.set_coefficient(n - 1 - j, true);
    return p;
}

} // namespace

BchDecoder::BchDecoder(const BchCode& code) : code_(code) {
    const std::size_t n = code.n;
    if (!std::has_single_bit(n + 1)) throw InvalidInput("decoder needs n = 2^m - 1");
    m_ = static_cast<unsigned>(std::countr_zero(n + 1));
    const std::uint32_t prim = default_primitive(m_);
    exp_.assign(2 * n, 0);
    log_.assign(n + 1, -1);
    std::uint32_t x = 1;
    for (std::size_t i = 0; i < n; ++i) {
        exp_[i] = static_cast<std::uint16_t>(x);
        log_[x] = static_cast<int>(i);
        x <<= 1;
        if (x >> m_) x ^= prim;
    }
    for (std::size_t i = n; i < 2 * n; ++i) exp_[i] = exp_[i - n];

    // Narrow-sense check: alpha^1..alpha^2t must be roots of g.
    for (std::size_t j = 1; j <= 2 * code.t; ++j) {
        std::uint16_t acc = 0;
        for (std::size_t i = 0; i <= code.g.degree(); ++i)
            if (code.g.coefficient(i)) acc ^= exp_[(i * j) % n];
        if (acc != 0)
            throw InvalidInput("generator of " + code.label() + " lacks root alpha^" + std::to_string(j));
    }
}

std::uint16_t BchDecoder::mul(std::uint16_t a, std::uint16_t b) const noexcept {
    if (a == 0 || b == 0) return 0;
    return exp_[static_cast<std::size_t>(log_[a] + log_[b])];
}

std::uint16_t BchDecoder::inv(std::uint16_t a) const noexcept {
    const std::size_t n = code_.n;
    return exp_[(n - static_cast<std::size_t>(log_[a])) % n];
}

std::vector<std::uint16_t> BchDecoder::syndromes(const BitStream& received) const {
    const std::size_t n = code_.n;
    std::vector<std::uint16_t> s(2 * code_.t, 0);
    for (std::size_t col = 0; col < n; ++col) {
        if (!received[col]) continue;
        const std::size_t e = n - 1 - col;
        for (std::size_t j = 1; j <= s.size(); ++j) s[j - 1] ^= exp_[(e * j) % n];
    }
    return s;
}

DecodeResult BchDecoder::decode(const BitStream& received) const {
    const std::size_t n = code_.n;
    if (received.size() != n)
        throw InvalidInput("bch_decode: word has " + std::to_string(received.size()) + " bits, code " +
                           code_.label() + " needs " + std::to_string(n));

    const auto s = syndromes(received);
    BitStream corrected = received;
    std::size_t flips = 0;

    if (std::any_of(s.begin(), s.end(), [](auto v) { return v != 0; })) {
        // Berlekamp-Massey over GF(2^m).
        std::vector<std::uint16_t> lambda{1}, prev{1};
        std::size_t len = 0;
        std::size_t shift = 1;
        std::uint16_t prev_disc = 1;
        for (std::size_t r = 0; r < s.size(); ++r) {
            std::uint16_t disc = s[r];
            for (std::size_t i = 1; i <= len && i < lambda.size(); ++i) disc ^= mul(lambda[i], s[r - i]);
            if (disc == 0) {
                ++shift;
                continue;
            }
            const std::uint16_t coef = mul(disc, inv(prev_disc));
            std::vector<std::uint16_t> next = lambda;
            if (next.size() < prev.size() + shift) next.resize(prev.size() + shift, 0);
            for (std::size_t i = 0; i < prev.size(); ++i) next[i + shift] ^= mul(coef, prev[i]);
            if (2 * len <= r) {
                prev = lambda;
                len = r + 1 - len;
                prev_disc = disc;
                shift = 1;
            } else {
                ++shift;
            }
            lambda = std::move(next);
        }
        while (lambda.size() > 1 && lambda.back() == 0) lambda.pop_back();
        const std::size_t degree = lambda.size() - 1;
        if (len > code_.t || degree != len) return {DecodeStatus::Uncorrectable, {}, 0};

        // Chien search: an error at exponent e makes Lambda(alpha^-e) vanish.
        for (std::size_t e = 0; e < n; ++e) {
            const std::size_t inv_exp = (n - e) % n;
            std::uint16_t acc = 0;
            for (std::size_t i = 0; i <= degree; ++i)
                if (lambda[i] != 0)
                    acc ^= mul(lambda[i], exp_[(inv_exp * i) % n]);
            if (acc == 0) {
                corrected.flip(n - 1 - e);
                ++flips;
            }
        }
        if (flips != degree) return {DecodeStatus::Uncorrectable, {}, 0};
    }

    const auto qr = poly_divmod(word_to_poly(corrected, n), code_.g);
    if (!qr.remainder.is_zero()) return {DecodeStatus::Uncorrectable, {}, 0};
    BitStream message(code_.k);
    for (std::size_t i = 0; i < code_.k; ++i) message.set(i, qr.quotient.coefficient(code_.k - 1 - i));
    return {DecodeStatus::Ok, std::move(message), flips};
}

DecodeResult bch_decode(const BchCode& code, const BitStream& received) {
    return BchDecoder(code).decode(received);
}

double predicted_output_bias(const BchCode& code, double e) {
    if (!(e >= 0.0 && e <= 1.0)) throw InvalidInput("bias e must lie in [0, 1]");
    return std::pow(e, static_cast<double>(poly_weight(code.g)));
}

} // namespace mramrng
