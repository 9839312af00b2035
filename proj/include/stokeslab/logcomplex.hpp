#pragma once

#include "stokeslab/common.hpp"

namespace stokeslab {

// Complex number stored as its logarithm, for values of size e^{n O(1)}.
// The imaginary part of log_value is kept in (-pi, pi].
struct LogComplex {
    cplx log_value{0.0, 0.0};
    bool zero_flag = false;

    static LogComplex zero() { return {{0.0, 0.0}, true}; }
    static LogComplex from_log(cplx l);
    static LogComplex from_value(cplx v);

    double log_abs() const { return zero_flag ? -INFINITY : log_value.real(); }
    double arg() const { return zero_flag ? 0.0 : log_value.imag(); }
    double log10_abs() const { return log_abs() / std::log(10.0); }
    // overflows to inf or underflows to 0 outside the double range
    cplx value() const;

    LogComplex operator-() const;
    LogComplex& operator*=(const LogComplex& o);
    LogComplex& operator/=(const LogComplex& o);
    LogComplex& operator+=(const LogComplex& o);
    LogComplex& operator-=(const LogComplex& o) { return *this += -o; }
};

inline LogComplex operator*(LogComplex a, const LogComplex& b) { return a *= b; }
inline LogComplex operator/(LogComplex a, const LogComplex& b) { return a /= b; }
inline LogComplex operator+(LogComplex a, const LogComplex& b) { return a += b; }
inline LogComplex operator-(LogComplex a, const LogComplex& b) { return a -= b; }

// |a/b - 1|, evaluated without leaving the log scale when a and b are far apart
double relative_difference(const LogComplex& a, const LogComplex& b);

}  // namespace stokeslab
