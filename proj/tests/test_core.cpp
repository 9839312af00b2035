#include <cmath>
#include <random>

#include "doctest.h"
#include "stokeslab/core.hpp"

using namespace stokeslab;

namespace {

Polyline circle(cplx c, double rad, int n) {
    Polyline out;
    for (int k = 0; k <= n; ++k) out.push_back(c + rad * std::polar(1.0, 2 * kPi * k / n));
    return out;
}

Polyline segment(cplx a, cplx b, int n) {
    Polyline out;
    for (int k = 0; k <= n; ++k) out.push_back(a + (b - a) * (double(k) / n));
    return out;
}

}  // namespace

TEST_CASE("zeros of D for real and degenerate parameters") {
    Parameter p = zeros_of_d(3.0);
    CHECK(std::abs(p.zeta_minus - 1.0) < 1e-14);
    CHECK(std::abs(p.zeta_plus - 9.0) < 1e-14);
    CHECK_FALSE(p.degenerate());

    Parameter q = zeros_of_d(-1.0);
    CHECK(q.double_zero);
    CHECK(std::abs(q.zeta_minus - 1.0) < 1e-14);
    CHECK(std::abs(q.zeta_plus - 1.0) < 1e-14);

    CHECK(zeros_of_d(0.0).pole_vanishes);
}

TEST_CASE("zeros for A=-3+2i match the 50-digit oracle") {
    Parameter p = zeros_of_d({-3, 2});
    const cplx zm(-2.287188505811165249470887, -1.107547948060074614688318);
    const cplx zp(0.2871885058111652494708869, 5.107547948060074614688318);
    CHECK(std::abs(p.zeta_minus - zm) < 1e-14);
    CHECK(std::abs(p.zeta_plus - zp) < 1e-14);
    CHECK(std::abs(p.zeta_plus - p.zeta_minus - 4.0 * std::sqrt(p.a + 1.0)) < 1e-13);
}

TEST_CASE("zeros are roots and respect conjugation") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int i = 0; i < 50; ++i) {
        const cplx a(u(rng), u(rng));
        Parameter p = zeros_of_d(a);
        CHECK(p.a.imag() >= 0);
        CHECK(p.conjugated == (a.imag() < 0));
        const double tol = 1e-12 * std::max(1.0, std::norm(a));
        CHECK(std::abs(d_of(p, p.zeta_minus)) < tol);
        CHECK(std::abs(d_of(p, p.zeta_plus)) < tol);
        Parameter c = zeros_of_d(std::conj(a));
        CHECK(std::abs(c.zeta_plus - p.zeta_plus) < 1e-12);
    }
}

TEST_CASE("segment root normalization and squares") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int i = 0; i < 20; ++i) {
        Parameter p = zeros_of_d({u(rng), std::abs(u(rng))});
        const cplx z = 1e6 * std::polar(1.0, u(rng));
        CHECK(std::abs(r_segment(p, z) / z - 1.0) < 1e-5);
        const cplx w(u(rng), u(rng));
        const cplx r = r_segment(p, w);
        CHECK(std::abs(r * r - d_of(p, w)) < 1e-12 * std::max(1.0, std::abs(d_of(p, w))));
    }
}

TEST_CASE("boundary values on the real segment for A=3") {
    Parameter p = zeros_of_d(3.0);
    Polyline seg = segment(1.0, 9.0, 8);
    const cplx r = r_global(p, 5.0, seg, Side::Plus);
    CHECK(std::abs(r.real()) < 1e-9);
    CHECK(std::abs(r - cplx(0, 4)) < 1e-12);
    // continuation from +infinity through the upper half plane lands on the same value
    const cplx r6 = r_global(p, 6.0, seg, Side::Plus);
    CHECK(std::abs(r6 - cplx(0, std::sqrt(15.0))) < 1e-12);
    CHECK(std::abs(r_global(p, 6.0, seg, Side::Minus) + r6) < 1e-12);
    CHECK_THROWS_AS(r_global(p, 5.0, seg), Error);
}

TEST_CASE("R(0) = -A for a cut in the class avoiding the positive axis") {
    Parameter p = zeros_of_d({-3, 2});
    Polyline seg = segment(p.zeta_minus, p.zeta_plus, 16);
    CHECK(std::abs(r_global(p, 0.0, seg) + p.a) < 1e-12);
}

TEST_CASE("lens sign flip keeps R continuous across the straight segment") {
    Parameter p = zeros_of_d({1, 1});
    // a bent arc from zeta_- to zeta_+ passing to the right of the segment
    const cplx mid = 0.5 * (p.zeta_minus + p.zeta_plus);
    const cplx d = p.zeta_plus - p.zeta_minus;
    Polyline arc{p.zeta_minus, mid - 0.3 * kI * d, p.zeta_plus};
    Cut cut(p, arc);
    const cplx n = kI * d / std::abs(d);
    const cplx above = cut.r(mid + 1e-6 * n), below = cut.r(mid - 1e-6 * n);
    CHECK(std::abs(above - below) < 1e-4);
    // and it jumps across the arc
    const cplx on = mid - 0.3 * kI * d;
    CHECK(std::abs(cut.r(on, Side::Plus) + cut.r(on, Side::Minus)) < 1e-10);
    CHECK(std::abs(cut.r(on, Side::Plus)) > 0.1);
}

TEST_CASE("r_prime against finite differences and at infinity") {
    Parameter p = zeros_of_d({-3, 2});
    Polyline seg = segment(p.zeta_minus, p.zeta_plus, 4);
    Cut cut(p, seg);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-6, 6);
    for (int i = 0; i < 20; ++i) {
        const cplx z(u(rng), u(rng));
        if (cut.distance(z) < 0.1) continue;
        const double h = 1e-5;
        const cplx fd = (cut.r(z + h) - cut.r(z - h)) / (2 * h);
        CHECK(std::abs(cut.r_prime(z) - fd) < 1e-7 * std::max(1.0, std::abs(fd)));
        CHECK(std::abs(cut.r_prime(z) * cut.r(z) - (z - p.b())) < 1e-12 * std::abs(z - p.b()) + 1e-13);
    }
    CHECK(std::abs(cut.r_prime(cplx(1e6, 3e5)) - 1.0) < 1e-5);
    CHECK_THROWS_AS(cut.r_prime(p.zeta_plus), Error);

    Parameter q = zeros_of_d(3.0);
    Cut realcut(q, segment(1.0, 9.0, 8));
    CHECK(std::abs(realcut.r_prime(cplx(5, 1e-6)).real()) < 1e-5);
}

TEST_CASE("closed-form antiderivative differentiates to R/z") {
    Parameter p = zeros_of_d({-3, 2});
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-6, 6);
    for (int i = 0; i < 30; ++i) {
        const cplx z(u(rng), u(rng));
        const cplx r = r_segment(p, z);
        const double h = 1e-5;
        WState s(p, z - h, r_segment(p, z - h));
        const cplx w0 = s.w();
        s.continue_to(z + h);
        const cplx expected = 2 * h * r / z;
        CHECK(std::abs((s.w() - w0) - expected) < 1e-8 * 2 * h * std::max(1.0, std::abs(r / z)));
    }
}

TEST_CASE("loop integrals: contractible, origin residue, residue at infinity") {
    Parameter p = zeros_of_d({-3, 2});
    // contractible loop away from all singularities
    Polyline loop = circle({3, -3}, 0.5, 64);
    CHECK(std::abs(antiderivative_w(p, loop, r_segment(p, loop[0]))) < 1e-12);
    // small loop around the origin on the sheet with R(0) = -A
    Polyline small = circle(0.0, 0.3, 64);
    const cplx res = antiderivative_w(p, small, r_segment(p, small[0]));
    CHECK(std::abs(res - 2 * kPi * kI * (-p.a)) < 1e-10);
    // big loop: R/t = 1 - (A+2)/t + O(t^-2)
    Polyline big = circle(0.0, 100.0, 256);
    const cplx inf = antiderivative_w(p, big, r_segment(p, big[0]));
    CHECK(std::abs(inf - 2 * kPi * kI * (-(p.a + 2.0))) < 1e-9);
}

TEST_CASE("closed form agrees with panelled quadrature along a path") {
    Parameter p = zeros_of_d({1, 1});
    Polyline path{{-3, -2}, {-1, 3}, {4, 3}, {5, -1}, {2, -4}};
    const cplx r0 = r_segment(p, path[0]);
    const cplx a = antiderivative_w(p, path, r0);
    const cplx b = quadrature_w(p, path, r0);
    CHECK(std::abs(a - b) < 1e-10);
}

TEST_CASE("one-sided integral over the straight segment is a period") {
    Parameter p = zeros_of_d({-3, 2});
    Polyline seg = segment(p.zeta_minus, p.zeta_plus, 32);
    Cut cut(p, seg);
    WState st(p, seg[0], 0.0);
    const cplx w0 = st.w();
    st.step_to(seg[1], cut.r(seg[1], Side::Plus));
    for (std::size_t i = 2; i < seg.size(); ++i) st.continue_to(seg[i]);
    // the sign depends on which side of the segment the true short trajectory lies
    const cplx period = st.w() - w0;
    CHECK(std::abs(period.real()) < 1e-10);
    CHECK(std::abs(std::abs(period.imag()) - 2 * kPi) < 1e-10);
}

TEST_CASE("zero location report") {
    ZeroLocation q1 = classify_zero_location(zeros_of_d({1, 1}));
    CHECK(q1.minus_upper);
    CHECK(q1.plus_upper);
    ZeroLocation q2 = classify_zero_location(zeros_of_d({-4, 1}));
    CHECK(q2.predicate_minus_lower);
    CHECK(q2.minus_lower);
    Parameter r = zeros_of_d(2.0);
    ZeroLocation q3 = classify_zero_location(r);
    CHECK(q3.minus_real);
    CHECK(q3.plus_real);
    CHECK(r.zeta_minus.real() > 0);
    CHECK(r.zeta_minus.real() < r.zeta_plus.real());
    for (double x : {-3.0, -1.0, 0.5}) {
        for (double y : {0.3, 1.0, 4.0}) {
            Parameter s = zeros_of_d({x, y});
            ZeroLocation q = classify_zero_location(s);
            CHECK(q.predicate_minus_lower == q.minus_lower);
            CHECK(q.plus_in_image);
            CHECK(q.minus_in_image);
        }
    }
}

TEST_CASE("complex flag syntax") {
    CHECK(parse_complex("-3+2i") == cplx(-3, 2));
    CHECK(parse_complex("1+i") == cplx(1, 1));
    CHECK(parse_complex("4i") == cplx(0, 4));
    CHECK(parse_complex("-i") == cplx(0, -1));
    CHECK(parse_complex("-1") == cplx(-1, 0));
    CHECK(parse_complex(" 2 - 0.5 i ") == cplx(2, -0.5));
    CHECK(parse_complex("1e-3-2.5e2i") == cplx(1e-3, -250));
    CHECK(parse_complex("1.5E+1+3*j") == cplx(15, 3));
    CHECK(parse_complex(".5-.25i") == cplx(0.5, -0.25));
    for (const char* bad : {"", "i3", "1+2", "1++2i", "abc", "3i+1", "1e", "--1"})
        CHECK_THROWS_AS(parse_complex(bad), Error);
}
