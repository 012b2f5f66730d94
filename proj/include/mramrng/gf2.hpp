#pragma once

#include "mramrng/bits.hpp"

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mramrng {

/// Polynomial over GF(2), coefficients stored ascending from x^0.
/// Always normalized: no zero words above the leading coefficient.
class Gf2Poly {
public:
    Gf2Poly() = default;

    static Gf2Poly zero() { return {}; }
    static Gf2Poly one() { return monomial(0); }
    static Gf2Poly monomial(std::size_t exponent);
    /// Builds from exponents with a set coefficient, e.g. {5, 2, 0}.
    static Gf2Poly from_exponents(std::initializer_list<std::size_t> exponents);
    /// Bit i of `bits` is the coefficient of x^i.
    static Gf2Poly from_word(std::uint64_t bits);

    bool is_zero() const noexcept { return words_.empty(); }
    /// Degree of the leading term; 0 for the zero polynomial.
    std::size_t degree() const noexcept;
    bool coefficient(std::size_t i) const noexcept {
        const std::size_t w = i >> 6;
        return w < words_.size() && ((words_[w] >> (i & 63)) & 1u);
    }
    void set_coefficient(std::size_t i, bool value);

    std::span<const std::uint64_t> words() const noexcept { return words_; }

    /// Coefficients from x^degree down to x^0 as '0'/'1' characters.
    std::string to_binary_msb_first() const;
    /// Inverse of poly_from_octal (no leading zero digits).
    std::string to_octal() const;
    std::string to_string() const; // "x^5 + x^2 + 1"

    Gf2Poly& operator+=(const Gf2Poly& other);
    friend Gf2Poly operator+(Gf2Poly a, const Gf2Poly& b) { return a += b; }
    friend Gf2Poly operator*(const Gf2Poly& a, const Gf2Poly& b);
    friend bool operator==(const Gf2Poly& a, const Gf2Poly& b) noexcept = default;

private:
    void normalize() noexcept;
    std::vector<std::uint64_t> words_;
};

struct Gf2DivMod {
    Gf2Poly quotient;
    Gf2Poly remainder;
};

/// Parses the octal generator notation: each digit gives 3 bits, most
/// significant digit first, leading zero bits dropped. "45" -> x^5 + x^2 + 1.
Gf2Poly poly_from_octal(std::string_view octal_digits);

std::size_t poly_weight(const Gf2Poly& p) noexcept;

Gf2DivMod poly_divmod(const Gf2Poly& a, const Gf2Poly& m);
Gf2Poly poly_mod(const Gf2Poly& a, const Gf2Poly& m);
/// (a * b) mod m; throws InvalidInput for a zero modulus.
Gf2Poly poly_mul_mod(const Gf2Poly& a, const Gf2Poly& b, const Gf2Poly& m);

/// Dense bit-packed matrix over GF(2), row-major, each row padded to a whole
/// number of 64-bit words.
class Gf2Matrix {
public:
    Gf2Matrix(std::size_t rows, std::size_t cols);

    static Gf2Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t row_stride() const noexcept { return stride_; }

    bool get(std::size_t r, std::size_t c) const noexcept {
        return (data_[r * stride_ + (c >> 6)] >> (c & 63)) & 1u;
    }
    void set(std::size_t r, std::size_t c, bool value) noexcept;

    /// Packed words of row r; bit j of the row is column j.
    std::span<const std::uint64_t> row(std::size_t r) const noexcept {
        return {data_.data() + r * stride_, stride_};
    }
    std::size_t row_weight(std::size_t r) const noexcept;

    std::string row_string(std::size_t r) const;

    friend bool operator==(const Gf2Matrix&, const Gf2Matrix&) noexcept = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::size_t stride_;
    std::vector<std::uint64_t> data_;
};

/// M v over GF(2): output bit i is the parity of row i AND v.
BitStream matvec(const Gf2Matrix& m, const BitStream& v);

/// v M over GF(2): XOR of the rows selected by v. length(v) must equal rows.
BitStream vecmat(const BitStream& v, const Gf2Matrix& m);

} // namespace mramrng
