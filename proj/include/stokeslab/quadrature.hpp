#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace stokeslab {

struct GaussRule {
    std::vector<double> x;  // nodes on [-1, 1], increasing
    std::vector<double> w;
};

// 16-point Gauss-Legendre on [-1, 1].
const GaussRule& gl16();

// Map the rule onto [a, b] and sum f.
template <class F>
auto gl16_integrate(F&& f, double a, double b) {
    const GaussRule& r = gl16();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    auto sum = f(c + h * r.x[0]) * r.w[0];
    for (std::size_t i = 1; i < r.x.size(); ++i) sum += f(c + h * r.x[i]) * r.w[i];
    return sum * h;
}

// Adaptive bisection with panel-vs-halves comparison. A panel is also accepted once the
// difference is at roundoff level relative to the integral of |f|.
template <class F>
auto gl16_adaptive(F&& f, double a, double b, double tol, int depth = 0) {
    using std::abs;
    const GaussRule& r = gl16();
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    auto whole = f(c + h * r.x[0]) * r.w[0];
    double mag = abs(whole);
    for (std::size_t i = 1; i < r.x.size(); ++i) {
        const auto v = f(c + h * r.x[i]) * r.w[i];
        whole += v;
        mag += abs(v);
    }
    whole *= h;
    mag *= abs(h);
    const double m = 0.5 * (a + b);
    auto halves = gl16_integrate(f, a, m) + gl16_integrate(f, m, b);
    const double diff = abs(halves - whole);
    // below a few hundred ulps of the position the abscissae no longer resolve the integrand
    const double tiny = 256 * 2.2e-16 * std::max(abs(a), abs(b));
    if (depth >= 40 || diff <= tol || diff <= 1e-13 * mag || abs(b - a) <= tiny) return halves;
    return gl16_adaptive(f, a, m, 0.5 * tol, depth + 1) + gl16_adaptive(f, m, b, 0.5 * tol, depth + 1);
}

}  // namespace stokeslab
