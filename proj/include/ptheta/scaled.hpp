#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>

namespace ptheta {

/// Complex number stored as mantissa * 2^exponent, so values far outside the
/// binary64 range (|P| ~ e^800 on large circles near q = 0.95) stay usable.
/// The mantissa is kept with max(|re|, |im|) in [0.5, 1) unless it is zero.
class ScaledComplex {
public:
    ScaledComplex() = default;
    ScaledComplex(std::complex<double> z) : mant_(z) { normalize(); } // NOLINT(google-explicit-constructor)
    ScaledComplex(std::complex<double> mant, std::int64_t exp2) : mant_(mant), exp2_(exp2) { normalize(); }

    [[nodiscard]] std::complex<double> mantissa() const { return mant_; }
    [[nodiscard]] std::int64_t exponent() const { return exp2_; }
    [[nodiscard]] bool is_zero() const { return mant_ == std::complex<double>{}; }

    /// Natural log of the modulus; -inf for zero.
    [[nodiscard]] double log_abs() const {
        if (is_zero()) return -std::numeric_limits<double>::infinity();
        return std::log(std::abs(mant_)) + static_cast<double>(exp2_) * std::numbers::ln2;
    }

    [[nodiscard]] double arg() const { return std::arg(mant_); }

    /// Conversion to binary64; overflows to inf and underflows to 0 as usual.
    [[nodiscard]] std::complex<double> to_complex() const {
        if (is_zero()) return {};
        const int e = static_cast<int>(std::clamp<std::int64_t>(exp2_, -4096, 4096));
        return {std::ldexp(mant_.real(), e), std::ldexp(mant_.imag(), e)};
    }

    [[nodiscard]] bool fits_binary64() const { return is_zero() || exp2_ <= 1023; }

    friend ScaledComplex operator*(const ScaledComplex& a, const ScaledComplex& b) {
        return {a.mant_ * b.mant_, a.exp2_ + b.exp2_};
    }
    friend ScaledComplex operator/(const ScaledComplex& a, const ScaledComplex& b) {
        return {a.mant_ / b.mant_, a.exp2_ - b.exp2_};
    }
    friend ScaledComplex operator+(const ScaledComplex& a, const ScaledComplex& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        const std::int64_t shift = a.exp2_ - b.exp2_;
        if (shift > 1100) return a;
        if (shift < -1100) return b;
        if (shift >= 0) {
            const int s = static_cast<int>(-shift);
            return {a.mant_ + std::complex<double>(std::ldexp(b.mant_.real(), s), std::ldexp(b.mant_.imag(), s)),
                    a.exp2_};
        }
        const int s = static_cast<int>(shift);
        return {b.mant_ + std::complex<double>(std::ldexp(a.mant_.real(), s), std::ldexp(a.mant_.imag(), s)),
                b.exp2_};
    }
    friend ScaledComplex operator-(const ScaledComplex& a) { return {-a.mant_, a.exp2_}; }
    friend ScaledComplex operator-(const ScaledComplex& a, const ScaledComplex& b) { return a + (-b); }

    ScaledComplex& operator*=(const ScaledComplex& o) { return *this = *this * o; }
    ScaledComplex& operator+=(const ScaledComplex& o) { return *this = *this + o; }

    /// Ratio a/b as a plain complex (caller guarantees it is representable).
    friend std::complex<double> ratio(const ScaledComplex& a, const ScaledComplex& b) {
        return (a / b).to_complex();
    }

private:
    void normalize() {
        const double m = std::max(std::abs(mant_.real()), std::abs(mant_.imag()));
        if (m == 0.0 || !std::isfinite(m)) {
            if (m == 0.0) { mant_ = {}; exp2_ = 0; }
            return;
        }
        int e = 0;
        std::frexp(m, &e);
        mant_ = {std::ldexp(mant_.real(), -e), std::ldexp(mant_.imag(), -e)};
        exp2_ += e;
    }

    std::complex<double> mant_{};
    std::int64_t exp2_ = 0;
};

} // namespace ptheta
