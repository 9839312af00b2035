#include "stokeslab/laguerre.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "stokeslab/mpcomplex.hpp"
#include "stokeslab/quadrature.hpp"

namespace stokeslab {

namespace {

using namespace mp;

LogComplex to_log(const MpC& a) {
    if (a.re == 0 && a.im == 0) return LogComplex::zero();
    const mpf l = log(norm(a)) / 2;
    const mpf t = atan2(a.im, a.re);
    return LogComplex::from_log({l.convert_to<double>(), t.convert_to<double>()});
}

// coefficients of z^k of L_n^(alpha)(s z); the product over (alpha + i) continues
// the binomials analytically through negative integers
std::vector<MpC> coefficients(int n, cplx alpha, cplx s) {
    std::vector<MpC> c(n + 1);
    std::vector<mpf> fact(n + 1);
    fact[0] = 1;
    for (int i = 1; i <= n; ++i) fact[i] = fact[i - 1] * i;
    const MpC a(alpha), sc(s);
    MpC prod(mpf(1), mpf(0));
    MpC spow(mpf(1), mpf(0));
    std::vector<MpC> powers(n + 1);
    for (int k = 0; k <= n; ++k) {
        powers[k] = spow;
        spow = spow * sc;
    }
    for (int k = n; k >= 0; --k) {
        if (k < n) prod = prod * (a + MpC(cplx(k + 1, 0)));
        mpf f = 1 / (fact[k] * fact[n - k]);
        if (k % 2) f = -f;
        c[k] = prod * f * powers[k];
    }
    return c;
}

struct Evaluated {
    MpC value;
    MpC deriv;
    mpf abs_sum;
};

Evaluated horner(const std::vector<MpC>& c, const MpC& z) {
    Evaluated e;
    const std::size_t n = c.size() - 1;
    e.value = c[n];
    e.deriv = MpC();
    const mpf az = absv(z);
    e.abs_sum = absv(c[n]);
    for (std::size_t k = n; k-- > 0;) {
        e.deriv = e.deriv * z + e.value;
        e.value = e.value * z + c[k];
        e.abs_sum = e.abs_sum * az + absv(c[k]);
    }
    return e;
}

MpC recurrence(int n, cplx alpha, const MpC& z) {
    const MpC a(alpha);
    MpC prev(mpf(1), mpf(0));
    if (n == 0) return prev;
    MpC cur = MpC(cplx(1, 0)) + a - z;
    for (int k = 1; k < n; ++k) {
        const MpC t1 = (MpC(cplx(2 * k + 1, 0)) + a - z) * cur;
        const MpC t2 = (MpC(cplx(k, 0)) + a) * prev;
        const MpC next = (t1 - t2) * (mpf(1) / (k + 1));
        prev = cur;
        cur = next;
    }
    return cur;
}

std::vector<int> precision_ladder(int start) {
    std::vector<int> out{start};
    for (int d : {30, 50, 100, 200, 400})
        if (d > out.back()) out.push_back(d);
    return out;
}

bool is_negative_integer(cplx alpha, int n, int* k) {
    if (alpha.imag() != 0) return false;
    const double r = std::round(-alpha.real());
    if (r >= 1 && r <= n && std::abs(alpha.real() + r) < 1e-14) {
        *k = static_cast<int>(r);
        return true;
    }
    return false;
}

}  // namespace

int default_precision(int n) {
    if (const char* env = std::getenv("STOKESLAB_PRECISION")) {
        const int d = std::atoi(env);
        if (d >= 15) return d;
    }
    return n <= 15 ? 15 : 30;
}

LogComplex laguerre_eval(const LaguerreContext& ctx, cplx z, EvalInfo* info) {
    if (ctx.n < 0) throw Error(ErrorCode::Config, "negative degree");
    const int start = ctx.precision_digits > 0 ? ctx.precision_digits : default_precision(ctx.n);
    double mismatch = 0, cancel = 0;
    for (int d : precision_ladder(start)) {
        PrecisionScope scope(d);
        const std::vector<MpC> c = coefficients(ctx.n, ctx.alpha, 1.0);
        const MpC zz(z);
        const Evaluated e = horner(c, zz);
        const MpC r = recurrence(ctx.n, ctx.alpha, zz);
        const mpf av = absv(e.value);
        if (av == 0) {
            if (info) *info = {d, 0, INFINITY};
            return LogComplex::zero();
        }
        mismatch = (absv(e.value - r) / av).convert_to<double>();
        cancel = log10(e.abs_sum / av).convert_to<double>();
        // the explicit sum loses about `cancel` digits; keep a dozen beyond that
        if (mismatch <= 1e-9 && cancel + 12 <= d) {
            if (info) *info = {d, mismatch, cancel};
            return to_log(e.value);
        }
    }
    throw Error(ErrorCode::PrecisionExhausted,
                "sum and recurrence disagree by " + format_real(mismatch) + " at 400 digits");
}

LogComplex leading_coefficient(int n) {
    // (-n)^n / n!
    return LogComplex::from_log({n * std::log(double(n)) - std::lgamma(n + 1.0), n % 2 ? kPi : 0.0});
}

LogComplex rescaled_eval(int n, cplx a_n, cplx z, bool monic) {
    LogComplex v = laguerre_eval({n, double(n) * a_n, 0}, double(n) * z);
    if (monic) v /= leading_coefficient(n);
    return v;
}

std::vector<cplx> laguerre_coefficients(int n, cplx alpha) {
    PrecisionScope scope(30);
    std::vector<cplx> out;
    for (const MpC& c : coefficients(n, alpha, 1.0)) out.push_back(to_cplx(c));
    return out;
}

namespace {

// Aberth-Ehrlich with synchronous updates; coefficients in multiprecision
ZeroSet aberth(int n, cplx alpha, cplx s, int start_digits) {
    ZeroSet zs;
    if (n == 0) return zs;
    std::vector<cplx> z(n);
    bool have_start = false;
    for (int d : precision_ladder(std::max(start_digits, 20 + n / 2))) {
        PrecisionScope scope(d);
        const std::vector<MpC> c = coefficients(n, alpha, s);
        if (!have_start) {
            const cplx lead = to_cplx(c[n]);
            const cplx centre = -to_cplx(c[n - 1]) / (double(n) * lead);
            const Evaluated e0 = horner(c, MpC(centre));
            const double lr = (log(absv(e0.value)) - log(absv(c[n]))).convert_to<double>() / n;
            const double r = std::max(std::exp(lr), 1e-3);
            for (int j = 0; j < n; ++j) z[j] = centre + std::polar(r, 2 * kPi * j / n + 0.4);
            have_start = true;
        }
        bool converged = false;
        int it = 0;
        for (; it < 500 && !converged; ++it) {
            std::vector<cplx> newton(n);
            for (int i = 0; i < n; ++i) {
                const Evaluated e = horner(c, MpC(z[i]));
                newton[i] = (norm(e.deriv) == 0) ? cplx(0) : to_cplx(e.value / e.deriv);
            }
            double scale = 1, worst = 0;
            std::vector<cplx> next(n);
            for (int i = 0; i < n; ++i) {
                cplx s2 = 0;
                for (int j = 0; j < n; ++j)
                    if (j != i) s2 += 1.0 / (z[i] - z[j]);
                const cplx w = newton[i] / (1.0 - newton[i] * s2);
                next[i] = z[i] - w;
                worst = std::max(worst, std::abs(w));
                scale = std::max(scale, std::abs(z[i]));
            }
            z = next;
            converged = worst < 1e-12 * scale;
        }
        zs.iterations += it;
        if (!converged) continue;
        // accept once the evaluation error at every root is far below |p'| times the accuracy
        bool enough = true;
        zs.residuals.assign(n, 0);
        for (int i = 0; i < n; ++i) {
            const Evaluated e = horner(c, MpC(z[i]));
            const double need = log10(e.abs_sum / (absv(e.deriv) * (1e-13 * std::max(1.0, std::abs(z[i]))))).convert_to<double>();
            if (need + 3 > d) enough = false;
            zs.residuals[i] = absv(e.value) == 0 ? -INFINITY : log10(absv(e.value)).convert_to<double>();
        }
        zs.lead_log10 = log10(absv(c[n])).convert_to<double>();
        zs.digits = d;
        if (enough) {
            zs.roots = z;
            return zs;
        }
    }
    throw Error(ErrorCode::NonConvergence, "Aberth iteration did not converge for n = " + std::to_string(n));
}

ZeroSet zeros_scaled(int n, cplx alpha, cplx s, int digits) {
    int k = 0;
    if (is_negative_integer(alpha, n, &k)) {
        // L_n^(-k)(z) = (-z)^k (n-k)!/n! L_(n-k)^(k)(z)
        ZeroSet zs = aberth(n - k, double(k), s, digits);
        zs.roots.insert(zs.roots.begin(), k, 0.0);
        zs.residuals.insert(zs.residuals.begin(), k, -INFINITY);
        zs.zeros_at_origin = k;
        return zs;
    }
    return aberth(n, alpha, s, digits);
}

}  // namespace

ZeroSet zeros(const LaguerreContext& ctx) {
    return zeros_scaled(ctx.n, ctx.alpha, 1.0, ctx.precision_digits > 0 ? ctx.precision_digits : default_precision(ctx.n));
}

ZeroSet rescaled_zeros(int n, cplx a_n, int precision_digits) {
    return zeros_scaled(n, double(n) * a_n, double(n), precision_digits > 0 ? precision_digits : default_precision(n));
}

std::vector<cplx> zero_moments(const ZeroSet& zs, int K) {
    std::vector<cplx> m(K + 1, 0.0);
    const double n = static_cast<double>(zs.roots.size());
    for (cplx z : zs.roots) {
        cplx p = 1;
        for (int k = 0; k <= K; ++k) {
            m[k] += p / n;
            p *= z;
        }
    }
    return m;
}

LogComplex bessel_eval(int n, cplx alpha, cplx z) {
    if (z == 0.0) throw Error(ErrorCode::ZeroArgument, "Bessel polynomial at z = 0");
    const LogComplex l = laguerre_eval({n, -2.0 * double(n) - alpha + 1.0, 0}, 2.0 / z);
    return LogComplex::from_log(double(n) * std::log(z)) * l;
}

cplx log_gamma(cplx z) {
    if (z.real() < 0.5) {
        // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        const cplx s = std::sin(kPi * z);
        if (s == 0.0) throw Error(ErrorCode::ZeroArgument, "Gamma pole");
        // log sin for large |Im| without overflow
        cplx logsin;
        if (std::abs(z.imag()) > 30) {
            // sin(pi z) = (e^{i pi z} - e^{-i pi z}) / 2i, dominated by one exponential
            if (z.imag() > 0)
                logsin = -kI * kPi * z + kI * kPi + std::log(1.0 - std::exp(2.0 * kI * kPi * z)) - std::log(2.0 * kI);
            else
                logsin = kI * kPi * z + std::log(1.0 - std::exp(-2.0 * kI * kPi * z)) - std::log(2.0 * kI);
        } else {
            logsin = std::log(s);
        }
        return std::log(kPi) - logsin - log_gamma(1.0 - z);
    }
    cplx shift = 0;
    while (z.real() < 15) {
        shift += std::log(z);
        z += 1.0;
    }
    // Stirling series
    static const double b[] = {1.0 / 12, -1.0 / 360, 1.0 / 1260, -1.0 / 1680, 1.0 / 1188, -691.0 / 360360, 1.0 / 156};
    const cplx zi = 1.0 / z, zi2 = zi * zi;
    cplx series = 0, p = zi;
    for (double c : b) {
        series += c * p;
        p *= zi2;
    }
    return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2 * kPi) + series - shift;
}

LogComplex orthogonality_closed_form(int n, cplx alpha) {
    // 2i e^{pi i alpha} sin(pi alpha) = e^{2 pi i alpha} - 1
    const cplx e = 2.0 * kPi * kI * alpha;
    LogComplex f = LogComplex::from_log(e) - LogComplex::from_value(1.0);
    if (n % 2 == 0) f = -f;
    return f * LogComplex::from_log(log_gamma(alpha + double(n) + 1.0));
}

OrthogonalityResult orthogonality_integral(int n, int k, cplx alpha, const ContourSigmaA& sigma) {
    if (alpha.imag() == 0) throw Error(ErrorCode::Config, "orthogonality needs a non-real parameter");
    const double s = std::max(1, n);
    Polyline path(sigma.sigma_minus_arc.rbegin(), sigma.sigma_minus_arc.rend());
    path.insert(path.end(), sigma.gamma.begin() + 1, sigma.gamma.end());
    path.insert(path.end(), sigma.sigma_plus_arc.begin() + 1, sigma.sigma_plus_arc.end());
    for (cplx& z : path) z *= s;

    OrthogonalityResult res;
    const LaguerreContext ctx{n, alpha, 0};
    auto log_integrand = [&](cplx z) {
        ++res.evaluations;
        const LogComplex l = laguerre_eval(ctx, z);
        if (l.zero_flag) return LogComplex::zero();
        const cplx lz(std::log(std::abs(z)), arg_0_2pi(z));
        return l * LogComplex::from_log(double(k) * lz + alpha * lz - z);
    };
    std::vector<double> vlog(path.size());
    res.peak_log = -INFINITY;
    for (std::size_t i = 0; i < path.size(); ++i) {
        vlog[i] = log_integrand(path[i]).log_abs();
        if (i > 0) res.peak_log = std::max(res.peak_log, log_integrand(0.5 * (path[i] + path[i - 1])).log_abs());
        res.peak_log = std::max(res.peak_log, vlog[i]);
    }
    const double cutoff = res.peak_log - 40;
    if (vlog.front() > cutoff || vlog.back() > cutoff)
        throw Error(ErrorCode::TailNotDecaying, "integrand has not decayed at the contour ends");
    std::size_t first = 0, last = path.size() - 1;
    while (first + 1 < path.size() && vlog[first + 1] < cutoff) ++first;
    while (last > 0 && vlog[last - 1] < cutoff) --last;

    const double peak = res.peak_log;
    cplx total = 0;
    for (std::size_t i = first; i < last; ++i) {
        const cplx a = path[i], d = path[i + 1] - path[i];
        auto f = [&](double t) {
            const LogComplex v = log_integrand(a + t * d);
            if (v.zero_flag) return cplx(0);
            return std::exp(v.log_value - peak) * d;
        };
        total += gl16_adaptive(f, 0.0, 1.0, 1e-16);
    }
    res.value = LogComplex::from_log(peak) * LogComplex::from_value(total);
    return res;
}

}  // namespace stokeslab
