#include "mramrng/gf2.hpp"

#include "mramrng/errors.hpp"

#include <algorithm>
#include <bit>

namespace mramrng {

Gf2Poly Gf2Poly::monomial(std::size_t exponent) {
    Gf2Poly p;
    p.set_coefficient(exponent, true);
    return p;
}

Gf2Poly Gf2Poly::from_exponents(std::initializer_list<std::size_t> exponents) {
    Gf2Poly p;
    for (auto e : exponents) p.set_coefficient(e, !p.coefficient(e));
    return p;
}

Gf2Poly Gf2Poly::from_word(std::uint64_t bits) {
    Gf2Poly p;
    if (bits != 0) p.words_.push_back(bits);
    return p;
}

std::size_t Gf2Poly::degree() const noexcept {
    if (words_.empty()) return 0;
    return (words_.size() - 1) * 64 + (63 - static_cast<std::size_t>(std::countl_zero(words_.back())));
}

void Gf2Poly::set_coefficient(std::size_t i, bool value) {
    const std::size_t w = i >> 6;
    if (w >= words_.size()) {
        if (!value) return;
        words_.resize(w + 1, 0);
    }
    const std::uint64_t mask = std::uint64_t{1} << (i & 63);
    if (value)
        words_[w] |= mask;
    else
        words_[w] &= ~mask;
    normalize();
}

void Gf2Poly::normalize() noexcept {
    while (!words_.empty() && words_.back() == 0) words_.pop_back();
}

std::string Gf2Poly::to_binary_msb_first() const {
    if (is_zero()) return "0";
    std::string s;
    for (std::size_t i = degree() + 1; i-- > 0;) s.push_back(coefficient(i) ? '1' : '0');
    return s;
}

std::string Gf2Poly::to_octal() const {
    if (is_zero()) return "0";
    const std::size_t digits = degree() / 3 + 1;
    std::string s;
    for (std::size_t d = digits; d-- > 0;) {
        int v = 0;
        for (int b = 2; b >= 0; --b) v = (v << 1) | (coefficient(d * 3 + static_cast<std::size_t>(b)) ? 1 : 0);
        s.push_back(static_cast<char>('0' + v));
    }
    return s;
}

std::string Gf2Poly::to_string() const {
    if (is_zero()) return "0";
    std::string s;
    for (std::size_t i = degree() + 1; i-- > 0;) {
        if (!coefficient(i)) continue;
        if (!s.empty()) s += " + ";
        if (i == 0)
            s += "1";
        else if (i == 1)
            s += "x";
        else
            s += "x^" + std::to_string(i);
    }
    return s;
}

Gf2Poly& Gf2Poly::operator+=(const Gf2Poly& other) {
    if (other.words_.size() > words_.size()) words_.resize(other.words_.size(), 0);
    for (std::size_t i = 0; i < other.words_.size(); ++i) words_[i] ^= other.words_[i];
    normalize();
    return *this;
}

Gf2Poly operator*(const Gf2Poly& a, const Gf2Poly& b) {
    Gf2Poly out;
    if (a.is_zero() || b.is_zero()) return out;
    out.words_.assign(a.words_.size() + b.words_.size(), 0);
    // Shift-and-add over the set coefficients of b.
    for (std::size_t i = 0; i <= b.degree(); ++i) {
        if (!b.coefficient(i)) continue;
        const std::size_t ws = i >> 6;
        const unsigned bs = i & 63;
        for (std::size_t j = 0; j < a.words_.size(); ++j) {
            out.words_[j + ws] ^= a.words_[j] << bs;
            if (bs != 0) out.words_[j + ws + 1] ^= a.words_[j] >> (64 - bs);
        }
    }
    out.normalize();
    return out;
}

Gf2Poly poly_from_octal(std::string_view octal_digits) {
    if (octal_digits.empty()) throw InvalidInput("empty octal string");
    Gf2Poly p;
    const std::size_t nbits = octal_digits.size() * 3;
    for (std::size_t d = 0; d < octal_digits.size(); ++d) {
        const char c = octal_digits[d];
        if (c < '0' || c > '7') throw InvalidInput(std::string("non-octal character '") + c + "'");
        const int v = c - '0';
        for (int b = 0; b < 3; ++b) {
            // Digit d covers exponents nbits-1-3d down to nbits-3-3d.
            const std::size_t exponent = nbits - 1 - 3 * d - static_cast<std::size_t>(b);
            if ((v >> (2 - b)) & 1) p.set_coefficient(exponent, true);
        }
    }
    return p;
}

std::size_t poly_weight(const Gf2Poly& p) noexcept {
    std::size_t w = 0;
    for (auto word : p.words()) w += static_cast<std::size_t>(std::popcount(word));
    return w;
}

Gf2DivMod poly_divmod(const Gf2Poly& a, const Gf2Poly& m) {
    if (m.is_zero()) throw InvalidInput("division by the zero polynomial");
    Gf2DivMod out{Gf2Poly{}, a};
    const std::size_t dm = m.degree();
    while (!out.remainder.is_zero() && out.remainder.degree() >= dm) {
        const std::size_t shift = out.remainder.degree() - dm;
        out.quotient.set_coefficient(shift, true);
        out.remainder += m * Gf2Poly::monomial(shift);
    }
    return out;
}

Gf2Poly poly_mod(const Gf2Poly& a, const Gf2Poly& m) { return poly_divmod(a, m).remainder; }

Gf2Poly poly_mul_mod(const Gf2Poly& a, const Gf2Poly& b, const Gf2Poly& m) {
    if (m.is_zero()) throw InvalidInput("poly_mul_mod: zero modulus");
    return poly_mod(a * b, m);
}

Gf2Matrix::Gf2Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), stride_((cols + 63) / 64) {
    if (rows == 0 || cols == 0) throw InvalidInput("matrix dimensions must be positive");
    data_.assign(rows_ * stride_, 0);
}

Gf2Matrix Gf2Matrix::identity(std::size_t n) {
    Gf2Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
}

void Gf2Matrix::set(std::size_t r, std::size_t c, bool value) noexcept {
    auto& w = data_[r * stride_ + (c >> 6)];
    const std::uint64_t mask = std::uint64_t{1} << (c & 63);
    w = value ? (w | mask) : (w & ~mask);
}

std::size_t Gf2Matrix::row_weight(std::size_t r) const noexcept {
    std::size_t w = 0;
    for (auto word : row(r)) w += static_cast<std::size_t>(std::popcount(word));
    return w;
}

std::string Gf2Matrix::row_string(std::size_t r) const {
    std::string s(cols_, '0');
    for (std::size_t c = 0; c < cols_; ++c)
        if (get(r, c)) s[c] = '1';
    return s;
}

BitStream matvec(const Gf2Matrix& m, const BitStream& v) {
    if (v.size() != m.cols())
        throw InvalidInput("matvec: vector length " + std::to_string(v.size()) + " != cols " +
                           std::to_string(m.cols()));
    const auto vw = v.words();
    BitStream out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < row.size(); ++w) acc ^= row[w] & vw[w];
        out.set(r, parity64(acc) != 0);
    }
    return out;
}

BitStream vecmat(const BitStream& v, const Gf2Matrix& m) {
    if (v.size() != m.rows())
        throw InvalidInput("vecmat: vector length " + std::to_string(v.size()) + " != rows " +
                           std::to_string(m.rows()));
    std::vector<std::uint64_t> acc(m.row_stride(), 0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (!v[r]) continue;
        const auto row = m.row(r);
        for (std::size_t w = 0; w < acc.size(); ++w) acc[w] ^= row[w];
    }
    BitStream out;
    out.reserve(m.cols());
    for (std::size_t c = 0; c < m.cols(); c += 64) {
        const unsigned count = static_cast<unsigned>(std::min<std::size_t>(64, m.cols() - c));
        out.append_bits(acc[c >> 6], count);
    }
    return out;
}

} // namespace mramrng
