#include <cmath>

#include "doctest.h"
#include "stokeslab/asymptotics.hpp"
#include "stokeslab/laguerre.hpp"

using namespace stokeslab;

namespace {

const cplx kA(-3, 2);

double err(int n, cplx a, cplx z, Regime r) {
    return relative_difference(rescaled_eval(n, a, z), strong_asymptotic(n, a, z, r).value);
}

// point at distance d from gamma on the given side, at distribution value t
cplx off_gamma(const AsymptoticModel& m, double t, double d, int side) {
    const cplx z0 = m.engine().gamma_map().point_exact(t);
    const cplx q = m.cut().r(z0, Side::Plus) / z0;
    const cplx tangent = kI * std::conj(q) / std::abs(q);
    return z0 + double(side) * d * kI * tangent;
}

}  // namespace

TEST_CASE("Airy values at the origin and known points") {
    const AiryValue a0 = airy(0.0);
    CHECK(std::abs(a0.ai - 0.355028053887817239260) < 1e-16);
    CHECK(std::abs(a0.ai_prime + 0.258819403792806798405) < 1e-16);
    CHECK(a0.method == AiryMethod::Series);
    CHECK(std::abs(airy(1.0).ai - 0.135292416312881415524) < 1e-16);
    const AiryValue a10 = airy(10.0);
    CHECK(a10.method == AiryMethod::Asymptotic);
    CHECK(std::abs(a10.ai / 1.1047532552898687e-10 - 1.0) < 1e-13);
    // conjugation symmetry
    const cplx t(-2.3, 4.1);
    CHECK(std::abs(airy(std::conj(t)).ai - std::conj(airy(t).ai)) < 1e-15 * std::abs(airy(t).ai));
}

TEST_CASE("Wronskian in the series region") {
    for (double r : {0.5, 2.0, 4.0, 6.0})
        for (int j = 0; j < 16; ++j) {
            const AiryBiValue v = airy_series(std::polar(r, 2 * kPi * j / 16 + 0.2));
            CHECK(std::abs(v.wronskian - 1 / kPi) < 1e-10);
        }
}

TEST_CASE("Airy equation by finite differences") {
    const double h = 1e-4;
    for (double r : {1.0, 5.5, 6.5, 9.0, 14.0})
        for (int j = 0; j < 12; ++j) {
            const cplx t = std::polar(r, 2 * kPi * j / 12 + 0.05);
            const cplx a = airy(t).ai;
            const cplx d2 = (airy(t + h).ai - 2.0 * a + airy(t - h).ai) / (h * h);
            CHECK(std::abs(d2 - t * a) < 1e-6 * std::abs(t * a));
            const cplx d1 = (airy(t + h).ai - airy(t - h).ai) / (2 * h);
            CHECK(std::abs(d1 - airy(t).ai_prime) < 1e-6 * std::abs(airy(t).ai_prime));
        }
}

TEST_CASE("series and expansion agree on the seam") {
    double worst = 0;
    for (int j = 0; j < 32; ++j) {
        const cplx t = std::polar(6.0, 2 * kPi * j / 32);
        const AiryBiValue s = airy_series(t);
        const AiryValue a = airy_asymptotic(t);
        worst = std::max(worst, std::abs(a.ai / s.ai - 1.0));
        worst = std::max(worst, std::abs(a.ai_prime / s.ai_prime - 1.0));
    }
    CHECK(worst < 1e-9);
    // further out the expansion is checked against a high-precision series
    for (int j = 0; j < 24; ++j) {
        const cplx t = std::polar(11.0, 2 * kPi * j / 24 + 0.01);
        CHECK(std::abs(airy(t).ai / airy_series(t, 80).ai - 1.0) < 1e-13);
    }
}

TEST_CASE("conformal map near zeta_+") {
    const auto m = asymptotic_model(kA);
    const cplx zp = m->param().zeta_plus;
    CHECK(std::abs(m->conformal_f(zp)) == 0.0);
    CHECK(m->airy_radius() > 0.1);
    // f'(zeta_+) = kappa, nonzero
    const double h = 1e-5;
    for (int j = 0; j < 4; ++j) {
        const cplx dz = std::polar(h, kPi * j / 2 + 0.3);
        CHECK(std::abs(m->conformal_f(zp + dz) / dz - m->kappa()) < 1e-3 * std::abs(m->kappa()));
    }
    // inside the disk Sigma_+ follows the steepest ascent of Re phi, the ray f > 0
    for (const cplx z : m->sigma().sigma_plus_arc) {
        const double d = std::abs(z - zp);
        if (d < 1e-3 || d > 0.9 * m->airy_radius()) continue;
        const cplx f = m->conformal_f(z);
        CHECK(f.real() > 0);
        CHECK(std::abs(std::arg(f)) < 2e-3);
    }
    // f is real on gamma, negative
    for (double t : {0.97, 0.99, 0.999}) {
        const cplx z = m->engine().gamma_map().point_exact(t);
        if (std::abs(z - zp) > m->airy_radius()) continue;
        const cplx f = m->conformal_f(z);
        CHECK(f.real() < 0);
        CHECK(std::abs(f.imag()) < 1e-6 * std::abs(f));
    }
    // continuous across gamma
    for (double t : {0.98, 0.995}) {
        const cplx a = m->conformal_f(off_gamma(*m, t, 1e-7, 1)), b = m->conformal_f(off_gamma(*m, t, 1e-7, -1));
        CHECK(std::abs(a - b) < 1e-5 * std::abs(a));
    }
    CHECK_THROWS_AS(m->conformal_f(zp + 2.0 * m->airy_radius()), Error);
}

TEST_CASE("outer formula decays like 1/n") {
    for (cplx z : {cplx(4, 4), cplx(-6, 0), cplx(2, -4)}) {
        const double e20 = err(20, kA, z, Regime::Outer), e40 = err(40, kA, z, Regime::Outer);
        CHECK(e40 / e20 > 0.3);
        CHECK(e40 / e20 < 0.7);
    }
}

TEST_CASE("outer formula is continuous across the positive axis") {
    // g carries the jumps of log z and varphi; exp(n g) does not jump
    for (double x : {3.0, 12.0}) {
        const LogComplex up = strong_asymptotic(30, kA, cplx(x, 1e-9), Regime::Outer).value;
        const LogComplex down = strong_asymptotic(30, kA, cplx(x, -1e-9), Regime::Outer).value;
        CHECK(relative_difference(up, down) < 1e-7);
    }
}

TEST_CASE("band formulas near gamma") {
    const auto m = asymptotic_model(kA);
    for (double t : {0.3, 0.6}) {
        for (int side : {1, -1}) {
            const Regime r = side > 0 ? Regime::BandPlus : Regime::BandMinus;
            // close to gamma the exponential term is of order one
            const cplx z = off_gamma(*m, t, 0.03, side);
            const double band40 = err(40, kA, z, r);
            CHECK(band40 < 1e-2);
            // negative control: the outer formula alone misses it
            CHECK(err(40, kA, z, Regime::Outer) > 0.1);
            // further away the band and outer formulas coincide
            const cplx far = off_gamma(*m, t, 0.3, side);
            const LogComplex b = strong_asymptotic(80, kA, far, r).value;
            const LogComplex o = strong_asymptotic(80, kA, far, Regime::Outer).value;
            CHECK(relative_difference(b, o) < 1e-6);
        }
    }
}

TEST_CASE("regime mismatches are rejected") {
    const auto m = asymptotic_model(kA);
    const cplx plus = off_gamma(*m, 0.5, 0.1, 1), minus = off_gamma(*m, 0.5, 0.1, -1);
    CHECK_THROWS_AS(strong_asymptotic(20, kA, plus, Regime::BandMinus), Error);
    CHECK_THROWS_AS(strong_asymptotic(20, kA, minus, Regime::BandPlus), Error);
    CHECK_THROWS_AS(strong_asymptotic(20, kA, cplx(8, 8), Regime::AiryPlus), Error);
    const Polyline& g = m->cut().curve();
    CHECK_THROWS_AS(strong_asymptotic(20, kA, g[g.size() / 2], Regime::Outer), Error);
    CHECK(m->classify(plus).value() == Regime::BandPlus);
    CHECK(m->classify(minus).value() == Regime::BandMinus);
    CHECK(m->classify(cplx(8, 8)).value() == Regime::Outer);
    CHECK(m->classify(m->param().zeta_plus + 0.01).value() == Regime::AiryPlus);
    CHECK_FALSE(m->classify(m->param().zeta_minus + 0.01).has_value());
}

TEST_CASE("Airy formula near zeta_+") {
    const auto m = asymptotic_model(kA);
    const cplx zp = m->param().zeta_plus;
    // finite at the branch point itself
    const LogComplex at = strong_asymptotic(40, kA, zp, Regime::AiryPlus).value;
    CHECK(std::isfinite(at.log_abs()));
    CHECK(relative_difference(rescaled_eval(40, kA, zp), at) < 0.05);
    double worst = 0;
    for (double r : {0.03, 0.07, 0.1})
        for (int j = 0; j < 8; ++j) worst = std::max(worst, err(40, kA, zp + std::polar(r, 2 * kPi * j / 8 + 0.1), Regime::AiryPlus));
    CHECK(worst < 0.05);
    // decays with n
    const cplx z = zp + std::polar(0.05, 1.0);
    CHECK(err(80, kA, z, Regime::AiryPlus) < err(20, kA, z, Regime::AiryPlus));
}

TEST_CASE("conjugation equivariance") {
    const cplx z(1.5, 3.0);
    const LogComplex v = strong_asymptotic(20, kA, z, Regime::Outer).value;
    const LogComplex w = strong_asymptotic(20, std::conj(kA), std::conj(z), Regime::Outer).value;
    CHECK(relative_difference(w, LogComplex::from_log(std::conj(v.log_value))) < 1e-8);
}

TEST_CASE("lower half plane parameters") {
    const ZeroSideReport r = zero_side_check(20, std::conj(kA));
    // mirror image: the zeros sit on the other side of the mirrored curve
    CHECK(r.plus_side == 20);
    CHECK(r.inequality_failures == 0);
    const cplx z(0.5, -4.0);
    CHECK(err(30, std::conj(kA), z, Regime::Outer) < 2e-2);
}

TEST_CASE("comparison table and decay fit") {
    const std::vector<cplx> grid{cplx(4, 4), cplx(-6, 0), cplx(-2.2871885, -1.1075479), cplx(0.3, 5.1)};
    const CompareTable t = compare(20, kA, grid);
    CHECK(t.points.size() == grid.size());
    CHECK(t.points[0].regime.value() == Regime::Outer);
    CHECK_FALSE(t.points[2].regime.has_value());  // next to zeta_-
    CHECK(t.points[3].regime.value() == Regime::AiryPlus);
    for (const RegimeStats& s : t.stats) CHECK(s.max < 0.05);

    const DecayFit fit = fit_decay({10, 20, 40}, {0.3, 0.15, 0.075});
    CHECK(std::abs(fit.exponent - 1) < 1e-12);
    CHECK(std::abs(fit.constant - 3) < 1e-10);
}

TEST_CASE("zeros lie on the minus side") {
    const ZeroSideReport r20 = zero_side_check(20, kA), r40 = zero_side_check(40, kA);
    CHECK(r40.plus_side == 0);
    CHECK(r40.minus_side == 40);
    CHECK(r40.inequality_failures == 0);
    CHECK(r40.max_distance < r20.max_distance);
}

TEST_CASE("beyond the end of gamma the outer formula applies") {
    const auto m = asymptotic_model(kA);
    const cplx zp = m->param().zeta_plus;
    const cplx dir = m->engine().gamma_map().point_exact(1 - 1e-4) - zp;
    // continue gamma past zeta_+, outside the Airy disk but within a wide band
    const cplx z = zp - 0.9 * dir / std::abs(dir);
    REQUIRE(m->distance_to_gamma(z) < 1.0);
    CHECK(m->classify(z, 1.0, 0.05).value() == Regime::Outer);
    const Regime band = m->side(z) > 0 ? Regime::BandPlus : Regime::BandMinus;
    CHECK(err(80, kA, z, Regime::Outer) < 0.05);
    CHECK(err(80, kA, z, band) > 0.1);
}
