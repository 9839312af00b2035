#include "stokeslab/logcomplex.hpp"

#include <cmath>

namespace stokeslab {

namespace {

double wrap(double a) {
    a = std::remainder(a, 2 * kPi);
    if (a <= -kPi) a += 2 * kPi;
    return a;
}

}  // namespace

LogComplex LogComplex::from_log(cplx l) {
    if (std::isinf(l.real()) && l.real() < 0) return zero();
    return {{l.real(), wrap(l.imag())}, false};
}

LogComplex LogComplex::from_value(cplx v) {
    if (v == 0.0) return zero();
    return {{std::log(std::abs(v)), std::arg(v)}, false};
}

cplx LogComplex::value() const {
    if (zero_flag) return 0.0;
    return std::exp(log_value);
}

LogComplex LogComplex::operator-() const {
    if (zero_flag) return *this;
    return from_log(log_value + cplx(0, kPi));
}

LogComplex& LogComplex::operator*=(const LogComplex& o) {
    if (zero_flag || o.zero_flag) return *this = zero();
    *this = from_log(log_value + o.log_value);
    return *this;
}

LogComplex& LogComplex::operator/=(const LogComplex& o) {
    if (o.zero_flag) throw Error(ErrorCode::ZeroArgument, "division by a zero LogComplex");
    if (zero_flag) return *this;
    *this = from_log(log_value - o.log_value);
    return *this;
}

LogComplex& LogComplex::operator+=(const LogComplex& o) {
    if (o.zero_flag) return *this;
    if (zero_flag) return *this = o;
    const LogComplex& big = log_value.real() >= o.log_value.real() ? *this : o;
    const LogComplex& small = log_value.real() >= o.log_value.real() ? o : *this;
    const cplx ratio = std::exp(small.log_value - big.log_value);
    const cplx s = 1.0 + ratio;
    if (s == 0.0) return *this = zero();
    *this = from_log(big.log_value + std::log(s));
    return *this;
}

double relative_difference(const LogComplex& a, const LogComplex& b) {
    if (b.zero_flag) return a.zero_flag ? 0.0 : INFINITY;
    if (a.zero_flag) return 1.0;
    const cplx d = a.log_value - b.log_value;
    return std::abs(std::exp(cplx(d.real(), wrap(d.imag()))) - 1.0);
}

}  // namespace stokeslab
