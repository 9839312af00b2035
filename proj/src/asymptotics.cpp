#include "stokeslab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "stokeslab/laguerre.hpp"
#include "stokeslab/mpcomplex.hpp"

namespace stokeslab {

namespace {

constexpr double kSeam = 6.0;

// the k-th root of m closest to ref
cplx nearest_root(cplx m, int k, cplx ref) {
    cplx r = std::pow(m, 1.0 / k), best = r;
    const cplx step = std::polar(1.0, 2 * kPi / k);
    for (int j = 1; j < k; ++j) {
        r *= step;
        if (std::abs(r - ref) < std::abs(best - ref)) best = r;
    }
    return best;
}

// u_k and v_k of the large-argument expansions of Ai and Ai'
const std::vector<double>& airy_u() {
    static const std::vector<double> u = [] {
        std::vector<double> r{1};
        for (int k = 1; k < 120; ++k)
            r.push_back(r.back() * (6.0 * k - 5) * (6.0 * k - 3) * (6.0 * k - 1) / ((2.0 * k - 1) * 216.0 * k));
        return r;
    }();
    return u;
}

double airy_v(int k) { return k == 0 ? 1.0 : -(6.0 * k + 1) / (6.0 * k - 1) * airy_u()[k]; }

}  // namespace

AiryBiValue airy_series(cplx t, int digits) {
    using namespace mp;
    PrecisionScope scope(digits);
    const mpf three(3);
    const mpf c1 = 1 / (pow(three, mpf(2) / 3) * tgamma(mpf(2) / 3));
    const mpf c2 = 1 / (pow(three, mpf(1) / 3) * tgamma(mpf(1) / 3));
    const MpC z(t);
    const MpC z3 = z * z * z;
    MpC f(mpf(1), mpf(0)), g = z, fp, gp(mpf(1), mpf(0));
    MpC tf(mpf(1), mpf(0)), tg = z, tfp = z * z * mpf(0.5), tgp(mpf(1), mpf(0));
    fp = tfp;
    const mpf eps = pow(mpf(10), -(digits + 2));
    for (int k = 0; k < 400; ++k) {
        tf = tf * z3 * (mpf(1) / ((3 * k + 2) * (3 * k + 3)));
        tg = tg * z3 * (mpf(1) / ((3 * k + 3) * (3 * k + 4)));
        tgp = tgp * z3 * (mpf(1) / ((3 * k + 1) * (3 * k + 3)));
        tfp = tfp * z3 * (mpf(1) / ((3 * k + 3) * (3 * k + 5)));
        f = f + tf;
        g = g + tg;
        fp = fp + tfp;
        gp = gp + tgp;
        if (absv(tf) + absv(tg) + absv(tfp) + absv(tgp) < eps * (1 + absv(f) + absv(g) + absv(fp) + absv(gp)) &&
            k > 2)
            break;
    }
    const mpf r3 = sqrt(three);
    const MpC ai = f * c1 - g * c2, aip = fp * c1 - gp * c2;
    const MpC bi = (f * c1 + g * c2) * r3, bip = (fp * c1 + gp * c2) * r3;
    AiryBiValue v;
    v.wronskian = to_cplx(ai * bip - aip * bi);
    v.ai = to_cplx(ai);
    v.ai_prime = to_cplx(aip);
    v.bi = to_cplx(bi);
    v.bi_prime = to_cplx(bip);
    return v;
}

// Ai ~ e^{-zeta} series truncated at its least term, plus i S e^{+zeta} series, where S is the
// error-function multiplier that switches the subdominant exponential on across arg t = 2 pi / 3.
// The lower half plane follows from Ai(conj t) = conj Ai(t).
AiryValue airy_asymptotic(cplx t) {
    if (t == 0.0) throw Error(ErrorCode::ZeroArgument, "asymptotic Airy expansion at t = 0");
    const bool lower = t.imag() < 0;
    if (lower) t = std::conj(t);
    const cplx sq = std::sqrt(t);
    const cplx zeta = 2.0 / 3.0 * t * sq;
    const cplx q = std::sqrt(sq);  // t^(1/4)
    const cplx singulant = -2.0 * zeta;
    const auto& u = airy_u();
    const int terms = std::clamp(static_cast<int>(std::abs(singulant)), 1, static_cast<int>(u.size()));

    cplx dom_u = 0, dom_v = 0, zk = 1;
    for (int k = 0; k < terms; ++k) {
        dom_u += u[k] * zk;
        dom_v += airy_v(k) * zk;
        zk *= -1.0 / zeta;
    }
    double mult = singulant.imag() > 0 ? 1 : 0;
    if (singulant.real() > 0) mult = 0.5 * std::erfc(-singulant.imag() / std::sqrt(2 * singulant.real()));
    cplx sub_u = 0, sub_v = 0;
    if (mult > 0) {
        zk = 1;
        double last = INFINITY;
        for (int k = 0; k < terms; ++k) {
            const cplx a = u[k] * zk;
            if (std::abs(a) > last) break;
            last = std::abs(a);
            sub_u += a;
            sub_v += airy_v(k) * zk;
            zk *= 1.0 / zeta;
        }
    }
    const double c = 1 / (2 * std::sqrt(kPi));
    const cplx em = std::exp(-zeta), ep = mult > 0 ? std::exp(zeta) : 0.0;
    cplx ai = c / q * (em * dom_u + kI * mult * ep * sub_u);
    cplx aip = c * q * (-em * dom_v + kI * mult * ep * sub_v);
    if (lower) {
        ai = std::conj(ai);
        aip = std::conj(aip);
    }
    return {ai, aip, AiryMethod::Asymptotic};
}

AiryValue airy(cplx t) {
    if (std::abs(t) > kSeam) return airy_asymptotic(t);
    const AiryBiValue v = airy_series(t);
    return {v.ai, v.ai_prime, AiryMethod::Series};
}

const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Outer: return "outer";
        case Regime::BandPlus: return "band_plus";
        case Regime::BandMinus: return "band_minus";
        case Regime::AiryPlus: return "airy_plus";
    }
    return "?";
}

std::optional<Regime> parse_regime(const std::string& s) {
    for (Regime r : {Regime::Outer, Regime::BandPlus, Regime::BandMinus, Regime::AiryPlus})
        if (s == regime_name(r)) return r;
    return std::nullopt;
}

AsymptoticModel::AsymptoticModel(cplx a)
    : p_(zeros_of_d(a)), graph_(build_critical_graph(p_)), sigma_(build_sigma(graph_)) {
    engine_ = std::make_unique<PhiEngine>(graph_, sigma_);
    ell_ = compute_ell(*engine_);

    const cplx zp = p_.zeta_plus, zm = p_.zeta_minus;
    const Polyline& arc = sigma_.sigma_plus_arc;
    cplx dplus = arc.size() > 1 ? arc[1] - arc[0] : cplx(1.0);
    dplus /= std::abs(dplus);
    // f ~ kappa (z - zeta_+) with kappa^3 = (zeta_+ - zeta_-) / (4 zeta_+^2), f > 0 along Sigma_+
    kappa_ = nearest_root((zp - zm) / (4.0 * zp * zp), 3, std::conj(dplus));

    delta_ = std::min({0.1 * p_.scale(), 0.45 * std::abs(zp - zm), 0.45 * std::abs(zp)});
    for (int halving = 0; halving < 10; ++halving, delta_ *= 0.5) {
        // injectivity on a test lattice: the image of the circle winds once around every image point
        const int m = 96;
        std::vector<cplx> ring(m);
        for (int j = 0; j < m; ++j) ring[j] = f_raw(zp + std::polar(delta_, 2 * kPi * (j + 0.5) / m));
        bool ok = true;
        std::vector<cplx> interior{zp};
        for (double r : {0.3, 0.6, 0.85})
            for (int j = 0; j < 8; ++j) interior.push_back(zp + std::polar(r * delta_, 2 * kPi * j / 8 + 0.1));
        for (cplx w : interior) {
            const cplx fw = f_raw(w);
            double wind = 0;
            for (int j = 0; j < m; ++j) {
                const double step = std::arg((ring[(j + 1) % m] - fw) / (ring[j] - fw));
                if (std::abs(step) > kPi / 2) ok = false;
                wind += step;
            }
            if (std::abs(wind / (2 * kPi) - 1) > 1e-6) ok = false;
            if (!ok) break;
        }
        if (ok) break;
    }

    // branch of Y f^(1/4): at a point of Sigma_+ both factors are continued from outside gamma
    const cplx zr = zp + 0.05 * delta_ * dplus;
    const cplx ref = std::pow(f_raw(zr), 0.25) / cut().quarter_root(zr);
    pref_unit_ = nearest_root((zp - zm) * kappa_, 4, ref);
}

cplx AsymptoticModel::f_raw(cplx z) const {
    const cplx d = z - p_.zeta_plus;
    if (std::abs(d) < 1e-9 * p_.scale()) return kappa_ * d;
    const Side side = cut().distance(z) < cut().on_cut_tolerance() ? Side::Plus : Side::None;
    const cplx phi = engine_->eval(z, PhiVariant::Phi, side).value;
    const cplx u = 1.5 * phi;
    return nearest_root(u * u, 3, kappa_ * d);
}

cplx AsymptoticModel::conformal_f(cplx z) const {
    if (std::abs(z - p_.zeta_plus) > delta_)
        throw Error(ErrorCode::OutOfDisk, "point outside the disk around zeta_+ of radius " + format_real(delta_));
    return f_raw(z);
}

cplx AsymptoticModel::airy_prefactor(cplx z) const {
    const cplx d = z - p_.zeta_plus;
    const cplx ratio = std::abs(d) < 1e-9 * p_.scale() ? kappa_ : conformal_f(z) / d;
    return nearest_root((z - p_.zeta_minus) * ratio, 4, pref_unit_);
}

std::optional<Regime> AsymptoticModel::classify(cplx z, double band_width, double buffer) const {
    const double dp = std::abs(z - p_.zeta_plus), dm = std::abs(z - p_.zeta_minus);
    if (dp <= delta_ - buffer) return Regime::AiryPlus;
    if (dp < delta_ + buffer || dm < delta_ + buffer) return std::nullopt;
    // g has a logarithmic singularity at the origin
    if (std::abs(z) < std::max(buffer, 1e-8)) return std::nullopt;
    const double dg = distance_to_gamma(z);
    if (dg < 10 * cut().on_cut_tolerance()) return std::nullopt;
    // the band formulas hold alongside gamma, not beyond its end points
    const Polyline& g = cut().curve();
    const NearestPoint q = nearest_on_polyline(g, z);
    const bool beyond_end = (q.segment == 0 && q.t <= 0) || (q.segment + 2 == g.size() && q.t >= 1);
    if (!beyond_end && dg < band_width - buffer) return side(z) > 0 ? Regime::BandPlus : Regime::BandMinus;
    if (!beyond_end && dg < band_width + buffer) return std::nullopt;
    return Regime::Outer;
}

std::shared_ptr<const AsymptoticModel> asymptotic_model(cplx a) {
    if (a.imag() < 0) a = std::conj(a);
    static std::mutex mu;
    static std::map<std::pair<long long, long long>, std::shared_ptr<const AsymptoticModel>> cache;
    const std::pair<long long, long long> key{std::llround(a.real() * 1e14), std::llround(a.imag() * 1e14)};
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[key];
    if (!slot) slot = std::make_shared<const AsymptoticModel>(a);
    return slot;
}

namespace {

// Im A < 0 is handled in the conjugate frame, where the two sides of gamma trade places
Regime mirrored(Regime r) {
    if (r == Regime::BandPlus) return Regime::BandMinus;
    if (r == Regime::BandMinus) return Regime::BandPlus;
    return r;
}

AsymptoticResult strong_upper(int n, cplx a_n, cplx z, Regime regime);

}  // namespace

AsymptoticResult strong_asymptotic(int n, cplx a_n, cplx z, Regime regime) {
    if (n < 1) throw Error(ErrorCode::Config, "degree must be positive");
    if (a_n.imag() >= 0) return strong_upper(n, a_n, z, regime);
    AsymptoticResult r = strong_upper(n, std::conj(a_n), std::conj(z), mirrored(regime));
    r.regime = regime;
    r.value = r.value.zero_flag ? r.value : LogComplex::from_log(std::conj(r.value.log_value));
    r.beta = std::conj(r.beta);
    r.beta_bar = std::conj(r.beta_bar);
    return r;
}

namespace {

AsymptoticResult strong_upper(int n, cplx a_n, cplx z, Regime regime) {
    const auto model = asymptotic_model(a_n);
    const Parameter& p = model->param();
    AsymptoticResult res;
    res.regime = regime;
    res.beta = p.zeta_plus;
    res.beta_bar = p.zeta_minus;
    const LogComplex lead = leading_coefficient(n);
    const double nn = n;

    if (regime == Regime::AiryPlus) {
        if (std::abs(z - p.zeta_plus) > model->airy_radius())
            throw Error(ErrorCode::RegimeMismatch, "airy_plus needs |z - zeta_+| <= " + format_real(model->airy_radius()));
        const cplx s = std::pow(nn, 2.0 / 3.0) * model->conformal_f(z);
        const cplx pre = std::pow(nn, 1.0 / 6.0) * model->airy_prefactor(z);
        const AiryValue ai = airy(s);
        const cplx bracket = std::sqrt(kPi) * (pre * ai.ai - ai.ai_prime / pre);
        const cplx expo = 0.5 * nn * (-a_n * log_cut_positive(z) + z + model->ell());
        res.value = lead * LogComplex::from_log(expo) * LogComplex::from_value(bracket);
        return res;
    }

    if (model->distance_to_gamma(z) < 10 * model->cut().on_cut_tolerance())
        throw Error(ErrorCode::RegimeMismatch, "point on gamma");
    const cplx y = 1.0 / model->cut().quarter_root(z);
    const LogComplex eg = LogComplex::from_log(nn * g_eval(model->engine(), model->ell(), z).log_value);
    const LogComplex outer = LogComplex::from_value(0.5 * (y + 1.0 / y));
    if (regime == Regime::Outer) {
        res.value = lead * eg * outer;
        return res;
    }
    const int want = regime == Regime::BandPlus ? 1 : -1;
    if (model->side(z) != want)
        throw Error(ErrorCode::RegimeMismatch, std::string(regime_name(regime)) + " on the other side of gamma");
    // ((1 - R')/(1 + R'))^(1/2) = -i (Y - 1/Y)/(Y + 1/Y); the "+" side subtracts it
    const cplx phi = model->engine().eval(z, PhiVariant::Phi).value;
    const cplx c = want > 0 ? kI : -kI;
    const LogComplex band = LogComplex::from_value(0.5 * c * (y - 1.0 / y)) * LogComplex::from_log(2.0 * nn * phi);
    res.value = lead * eg * (outer + band);
    return res;
}

}  // namespace

CompareTable compare(int n, cplx a_n, const std::vector<cplx>& grid, double band_width, double buffer) {
    const auto model = asymptotic_model(a_n);
    CompareTable table;
    table.n = n;
    table.a = a_n;
    std::map<Regime, std::vector<double>> by_regime;
    for (cplx z : grid) {
        ComparePoint pt;
        pt.z = z;
        const bool flip = a_n.imag() < 0;
        pt.regime = model->classify(flip ? std::conj(z) : z, band_width, buffer);
        if (pt.regime && flip) pt.regime = mirrored(*pt.regime);
        if (pt.regime) {
            const LogComplex exact = rescaled_eval(n, a_n, z);
            pt.rel_error = relative_difference(exact, strong_asymptotic(n, a_n, z, *pt.regime).value);
            by_regime[*pt.regime].push_back(pt.rel_error);
        }
        table.points.push_back(pt);
    }
    for (auto& [r, errs] : by_regime) {
        RegimeStats st{r};
        st.count = static_cast<int>(errs.size());
        std::sort(errs.begin(), errs.end());
        st.max = errs.back();
        st.median = errs.size() % 2 ? errs[errs.size() / 2]
                                     : 0.5 * (errs[errs.size() / 2 - 1] + errs[errs.size() / 2]);
        table.stats.push_back(st);
    }
    return table;
}

DecayFit fit_decay(const std::vector<int>& ns, const std::vector<double>& errors) {
    if (ns.size() != errors.size() || ns.size() < 2) throw Error(ErrorCode::Config, "decay fit needs two or more points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const double x = std::log(double(ns[i])), y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return {-slope, std::exp((sy - slope * sx) / m)};
}

ZeroSideReport zero_side_check(int n, cplx a_n) {
    const auto model = asymptotic_model(a_n);
    ZeroSideReport rep;
    rep.n = n;
    rep.zeros = rescaled_zeros(n, a_n).roots;
    const bool flip = a_n.imag() < 0;
    for (cplx z0 : rep.zeros) {
        // side and distance in the frame Im A >= 0; both sides swap under conjugation
        const cplx z = flip ? std::conj(z0) : z0;
        const int s = flip ? -model->side(z) : model->side(z);
        rep.sides.push_back(s);
        (s > 0 ? rep.plus_side : rep.minus_side)++;
        rep.max_distance = std::max(rep.max_distance, model->distance_to_gamma(z));
        const cplx rp = model->cut().r_prime(z);
        if (!(std::abs(1.0 + rp) < std::abs(1.0 - rp))) ++rep.inequality_failures;
    }
    return rep;
}

}  // namespace stokeslab
