#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include "stokeslab/common.hpp"

namespace stokeslab::mp {

using mpf = boost::multiprecision::mpfr_float;

// sets the default mpfr precision (decimal digits) for the lifetime of the scope
class PrecisionScope {
public:
    explicit PrecisionScope(int digits) : old_(mpf::default_precision()) { mpf::default_precision(digits); }
    ~PrecisionScope() { mpf::default_precision(old_); }
    PrecisionScope(const PrecisionScope&) = delete;
    PrecisionScope& operator=(const PrecisionScope&) = delete;

private:
    unsigned old_;
};

struct MpC {
    mpf re, im;
    MpC() : re(0), im(0) {}
    MpC(const mpf& r, const mpf& i) : re(r), im(i) {}
    explicit MpC(cplx z) : re(z.real()), im(z.imag()) {}
};

inline MpC operator+(const MpC& a, const MpC& b) { return {a.re + b.re, a.im + b.im}; }
inline MpC operator-(const MpC& a, const MpC& b) { return {a.re - b.re, a.im - b.im}; }
inline MpC operator*(const MpC& a, const MpC& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline MpC operator*(const MpC& a, const mpf& s) { return {a.re * s, a.im * s}; }
inline MpC operator/(const MpC& a, const MpC& b) {
    const mpf d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
inline mpf norm(const MpC& a) { return a.re * a.re + a.im * a.im; }
inline mpf absv(const MpC& a) { return sqrt(norm(a)); }
inline cplx to_cplx(const MpC& a) { return {a.re.convert_to<double>(), a.im.convert_to<double>()}; }

}  // namespace stokeslab::mp
