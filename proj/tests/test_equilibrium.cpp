#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include "doctest.h"
#include "stokeslab/equilibrium.hpp"
#include "stokeslab/quadrature.hpp"

using namespace stokeslab;

namespace {

const cplx kParams[] = {{-3, 2}, {1, 1}, {0, 4}, {-2, 1}};

struct Setup {
    Parameter p;
    CriticalGraph graph;
    ContourSigmaA sigma;
    std::unique_ptr<PhiEngine> engine;  // with the contour attached
    EllResult ell;
};

// graph, contour and engine are costly enough to share between test cases
const Setup& setup(cplx a) {
    static std::map<std::pair<double, double>, std::unique_ptr<Setup>> cache;
    auto& slot = cache[{a.real(), a.imag()}];
    if (!slot) {
        auto s = std::make_unique<Setup>();
        s->p = zeros_of_d(a);
        s->graph = build_critical_graph(s->p);
        s->sigma = build_sigma(s->graph);
        s->engine = std::make_unique<PhiEngine>(s->graph, s->sigma);
        s->ell = compute_ell(*s->engine);
        slot = std::move(s);
    }
    return *slot;
}

double circ_dist(double a, double b) { return std::abs(std::remainder(a - b, 2 * kPi)); }

// point of gamma at distribution value t and the unit tangent there (direction of increasing t)
std::pair<cplx, cplx> gamma_point(const GammaMap& m, double t) {
    const cplx z = m.point_exact(t);
    const cplx q = m.cut().r(z, Side::Plus) / z;
    return {z, kI * std::conj(q) / std::abs(q)};
}

}  // namespace

TEST_CASE("u substitution is a smooth bijection of [0,1]") {
    for (double t : {1e-9, 0.01, 0.3, 0.5, 0.77, 1 - 1e-7}) CHECK(GammaMap::t_of_u(GammaMap::u_of_t(t)) == doctest::Approx(t).epsilon(1e-13));
    for (double u : {0.1, 0.4, 0.9}) {
        const double h = 1e-6;
        const double fd = (GammaMap::t_of_u(u + h) - GammaMap::t_of_u(u - h)) / (2 * h);
        CHECK(GammaMap::dt_du(u) == doctest::Approx(fd).epsilon(1e-8));
    }
}

TEST_CASE("gamma map hits the prescribed w") {
    const Setup& s = setup({-3, 2});
    const GammaMap& M = s.engine->gamma_map();
    for (double t : {0.001, 0.2, 0.5, 0.8, 0.999}) {
        const cplx z = M.point_exact(t);
        CHECK(std::abs(M.w_plus(z) - 2 * kPi * kI * t) < 1e-12);
        CHECK(std::abs(M.point(GammaMap::u_of_t(t)) - z) < 1e-11);
    }
}

TEST_CASE("measure: unit mass and positive density") {
    for (cplx a : kParams) {
        CAPTURE(a);
        const Setup& s = setup(a);
        const EquilibriumMeasure mu = equilibrium_measure(s.engine->gamma_map_ptr(), 256);
        CHECK(std::abs(mu.mass - 1) < 1e-12);
        CHECK(std::all_of(mu.density.begin(), mu.density.end(), [](double d) { return d > 0; }));
        CHECK(std::is_sorted(mu.t.begin(), mu.t.end()));
        CHECK(std::is_sorted(mu.arclength.begin(), mu.arclength.end()));
    }
}

TEST_CASE("moments have the closed forms (A+1) and (A+1)(A+2)") {
    for (cplx a : kParams) {
        CAPTURE(a);
        const EquilibriumMeasure mu = equilibrium_measure(setup(a).engine->gamma_map_ptr(), 256);
        CHECK(std::abs(moment(mu, 1) - (a + 1.0)) < 1e-11);
        CHECK(std::abs(moment(mu, 2) - (a + 1.0) * (a + 2.0)) < 1e-10);
    }
}

TEST_CASE("Cauchy transform far away matches the moment expansion") {
    const Setup& s = setup({1, 1});
    const EquilibriumMeasure mu = equilibrium_measure(s.engine->gamma_map_ptr(), 256);
    const cplx z(40, -25);
    cplx series = 0;
    for (int k = 0; k < 30; ++k) series -= moment(mu, k) / std::pow(z, k + 1);
    CHECK(std::abs(cauchy_transform(mu, z) - series) < 1e-13);
}

TEST_CASE("real A = 3: segment density and equilibrium constant") {
    const Parameter p = zeros_of_d(3.0);
    const Trajectory g = short_trajectory(p);
    CHECK(std::abs(g.w.back() - 2 * kPi * kI) < 1e-12);
    const PhiEngine e(p, g);
    const EquilibriumMeasure mu = equilibrium_measure(e.gamma_map_ptr(), 128);
    for (std::size_t i = 0; i < mu.nodes.size(); ++i) {
        const double x = mu.nodes[i].real();
        CHECK(std::abs(mu.nodes[i].imag()) < 1e-12);
        CHECK(mu.density[i] == doctest::Approx(std::sqrt((9 - x) * (x - 1)) / (2 * kPi * x)).epsilon(1e-12));
    }
    // V(5) + psi(5) with x = 5 - 4 cos(theta), which removes the endpoint square roots
    auto f = [](double th) {
        const double x = 5 - 4 * std::cos(th);
        return -std::log(4 * std::abs(std::cos(th))) * std::sqrt((9 - x) * (x - 1)) / (2 * kPi * x) * 4 * std::sin(th);
    };
    const double oracle = gl16_adaptive(f, 0, kPi / 2, 1e-12) + gl16_adaptive(f, kPi / 2, kPi, 1e-12) + psi_eval(p, 5.0);
    CHECK(v_potential(mu, 5.0) + psi_eval(p, 5.0) == doctest::Approx(oracle).epsilon(1e-10));
    const EllResult ell = compute_ell(e);
    CHECK(-ell.ell / 2 == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(std::abs(ell.value.imag()) < 1e-8);
}

TEST_CASE("psi is harmonic off the positive axis and cut there") {
    const Parameter p = zeros_of_d({-3, 2});
    const double h = 1e-3;
    for (cplx z : {cplx(-2, 1), cplx(1, -3), cplx(0.5, 0.5), cplx(-4, -0.2)}) {
        const double lap = psi_eval(p, z + h) + psi_eval(p, z - h) + psi_eval(p, z + kI * h) +
                           psi_eval(p, z - kI * h) - 4 * psi_eval(p, z);
        CHECK(std::abs(lap / (h * h)) < 1e-5);
    }
    CHECK_THROWS_AS(psi_eval(p, 2.0), Error);
    // jump across the positive axis is pi Im A
    CHECK(psi_eval(p, cplx(2, -1e-12)) - psi_eval(p, cplx(2, 1e-12)) == doctest::Approx(kPi * 2).epsilon(1e-9));
}

TEST_CASE("phi-tilde maps the faces to a half plane, a strip and a half plane") {
    for (cplx a : kParams) {
        CAPTURE(a);
        const Setup& s = setup(a);
        const auto samples = face_samples(s.graph, 100, 7);
        const ConformalReport rep = check_conformal_images(*s.engine, samples);
        for (int f = 0; f < 3; ++f) CHECK(rep.count[f] >= 100);
        CHECK(rep.violations == 0);
        CHECK(rep.strip_width == doctest::Approx(kPi * a.imag()).epsilon(1e-8));
    }
}

TEST_CASE("connection between phi and phi-tilde on the faces") {
    for (cplx a : kParams) {
        CAPTURE(a);
        const Setup& s = setup(a);
        const auto samples = face_samples(s.graph, 100, 11);
        double worst = 0;
        for (cplx z : samples) {
            const PhiValue ph = s.engine->eval(z, PhiVariant::Phi);
            const cplx pt = s.engine->eval(z, PhiVariant::PhiTilde).value;
            const cplx expect = *ph.face == Face::OmegaPlus ? pt - kPi * kI : pt + kPi * kI * (1.0 + a);
            worst = std::max(worst, std::abs(ph.value - expect));
        }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("values do not depend on the base point of the path") {
    for (cplx a : kParams) {
        CAPTURE(a);
        const Setup& s = setup(a);
        const int n = static_cast<int>(s.graph.gamma.points.size());
        double worst = 0;
        for (cplx z : face_samples(s.graph, 20, 5))
            for (PhiVariant v : {PhiVariant::Phi, PhiVariant::PhiTilde, PhiVariant::VarPhi}) {
                const cplx ref = s.engine->eval(z, v).value;
                for (int b : {3, n / 4, 3 * n / 4, n - 4})
                    worst = std::max(worst, std::abs(s.engine->eval(z, v, Side::None, b).value - ref));
            }
        CHECK(worst < 1e-11);
    }
}

TEST_CASE("limits of phi-tilde at the zeros") {
    for (cplx a : kParams) {
        CAPTURE(a);
        const Setup& s = setup(a);
        const PhiEngine& e = *s.engine;
        const Parameter& p = s.p;
        const double r = 1e-7 * p.scale();
        // sample every direction around each zero and group by face
        bool seen_zero = false, seen_shift = false;
        for (int zero : {-1, 1}) {
            const cplx c = zero < 0 ? p.zeta_minus : p.zeta_plus;
            for (int k = 0; k < 24; ++k) {
                const cplx z = c + r * std::polar(1.0, 2 * kPi * (k + 0.5) / 24);
                const PhiValue v = e.eval(z, PhiVariant::PhiTilde);
                if (zero > 0) {
                    // Omega_-^(2) continues Omega_-^(1) across sigma_down
                    const cplx want = *v.face == Face::OmegaPlus ? kPi * kI : -kPi * kI * (a + 1.0);
                    CHECK(std::abs(v.value - want) < 1e-5);
                } else if (*v.face == Face::OmegaPlus) {
                    CHECK(std::abs(v.value) < 1e-5);
                } else {
                    // 0 between sigma_- and sigma_0, -pi i A between sigma_0 and gamma
                    const double d = std::min(std::abs(v.value), std::abs(v.value + kPi * kI * a));
                    CHECK(d < 1e-5);
                    (std::abs(v.value) < 1e-5 ? seen_zero : seen_shift) = true;
                }
            }
        }
        CHECK(seen_zero);
        CHECK(seen_shift);
    }
}

TEST_CASE("boundary values on gamma") {
    for (cplx a : kParams) {
        CAPTURE(a);
        const Setup& s = setup(a);
        const PhiEngine& e = *s.engine;
        for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const auto [c, tan] = gamma_point(e.gamma_map(), t);
            const cplx pp = e.eval(c, PhiVariant::Phi, Side::Plus).value;
            const cplx pm = e.eval(c, PhiVariant::Phi, Side::Minus).value;
            CHECK(std::abs(pp.real()) < 1e-9);
            CHECK(std::abs(pm.real()) < 1e-9);
            CHECK(std::abs(pp + pm) < 1e-12);
            const cplx tp = e.eval(c, PhiVariant::PhiTilde, Side::Plus).value;
            const cplx tm = e.eval(c, PhiVariant::PhiTilde, Side::Minus).value;
            CHECK(std::abs(tp - tm - (2.0 * tp + kPi * kI * a)) < 1e-12);
            // off-gamma evaluation next to the curve agrees with the one-sided value
            const cplx near = c + 1e-9 * kI * tan;
            CHECK(std::abs(e.eval(near, PhiVariant::PhiTilde).value - tp) < 1e-7);
        }
    }
}

TEST_CASE("phi-hat: single cut gamma near zeta_-") {
    for (cplx a : kParams) {
        CAPTURE(a);
        const Setup& s = setup(a);
        const PhiEngine& e = *s.engine;
        const double r = 0.5 * e.phihat_radius();
        for (int k = 0; k < 12; ++k) {
            const cplx z = s.p.zeta_minus + r * std::polar(1.0, 2 * kPi * (k + 0.3) / 12);
            const PhiValue h = e.eval(z, PhiVariant::PhiHat);
            const PhiValue t = e.eval(z, PhiVariant::PhiTilde);
            // equal to phi-tilde except on the gamma-facing side of sigma_0, where it is larger by pi i A
            const double d0 = std::abs(h.value - t.value), d1 = std::abs(h.value - t.value - kPi * kI * a);
            CHECK(std::min(d0, d1) < 1e-10);
        }
        CHECK_THROWS_AS(e.eval(s.p.zeta_minus + 1.1 * e.phihat_radius(), PhiVariant::PhiHat), Error);
    }
}

TEST_CASE("Sigma_A: positivity, placement and orientation") {
    for (cplx a : kParams) {
        CAPTURE(a);
        const Setup& s = setup(a);
        const ContourSigmaA& S = s.sigma;
        CHECK(S.sigma_minus_arc.front() == s.p.zeta_minus);
        CHECK(S.sigma_plus_arc.front() == s.p.zeta_plus);
        CHECK(S.sigma_minus_arc.back().imag() < 0);
        CHECK(S.sigma_plus_arc.back().imag() > 0);
        for (const Polyline* c : {&S.sigma_minus_arc, &S.sigma_plus_arc})
            for (std::size_t i = 1; i < c->size(); i += 7) {
                if (std::abs((*c)[i]) > s.engine->valid_radius()) break;
                CHECK(s.engine->eval((*c)[i], PhiVariant::PhiTilde).value.real() > 0);
            }
        for (std::size_t i = 1; i < S.sigma_plus_arc.size(); i += 11) {
            const cplx z = S.sigma_plus_arc[i];
            if (std::abs(z) > s.engine->valid_radius()) break;
            CHECK(s.graph.face_of(z) == Face::OmegaMinus2);
        }
        // close the contour through the east; it runs clockwise around the origin
        Polyline loop(S.sigma_minus_arc.rbegin(), S.sigma_minus_arc.rend());
        loop.insert(loop.end(), S.gamma.begin() + 1, S.gamma.end());
        loop.insert(loop.end(), S.sigma_plus_arc.begin() + 1, S.sigma_plus_arc.end());
        const double R = 2 * std::max(std::abs(S.sigma_plus_arc.back()), std::abs(S.sigma_minus_arc.back()));
        const double a0 = std::arg(S.sigma_plus_arc.back()), a1 = std::arg(S.sigma_minus_arc.back());
        for (int k = 0; k <= 64; ++k) loop.push_back(std::polar(R, a0 + (a1 - a0) * k / 64));
        loop.push_back(loop.front());
        CHECK(winding_angle(loop) == doctest::Approx(-2 * kPi).epsilon(1e-9));
    }
}

TEST_CASE("varphi jumps: 2 pi i across Sigma_- and pi i A across the positive axis") {
    for (cplx a : kParams) {
        CAPTURE(a);
        const Setup& s = setup(a);
        const PhiEngine& e = *s.engine;
        const double eps = 1e-9;
        for (double x : {0.7, 3.0, 12.0}) {
            const cplx up = e.eval(cplx(x, eps), PhiVariant::VarPhi).value;
            const cplx dn = e.eval(cplx(x, -eps), PhiVariant::VarPhi).value;
            CHECK(std::abs(up - dn - kPi * kI * a) < 1e-7);
        }
        const Polyline& c = s.sigma.sigma_minus_arc;
        for (std::size_t i : {c.size() / 4, c.size() / 2}) {
            const cplx t = (c[i + 1] - c[i - 1]) / std::abs(c[i + 1] - c[i - 1]);
            const cplx l = e.eval(c[i] + eps * kI * t, PhiVariant::VarPhi).value;
            const cplx r = e.eval(c[i] - eps * kI * t, PhiVariant::VarPhi).value;
            CHECK(std::abs(l - r - 2 * kPi * kI) < 1e-7);
        }
        // varphi agrees with phi on Omega_+
        const cplx z = s.p.zeta_minus - 1.0;
        CHECK(std::abs(e.eval(z, PhiVariant::VarPhi).value - e.eval(z, PhiVariant::Phi).value) < 1e-12);
    }
}

TEST_CASE("ell: extrapolation is stable and matches the equilibrium constant") {
    for (cplx a : kParams) {
        CAPTURE(a);
        const Setup& s = setup(a);
        CHECK(s.ell.spread < 1e-6);
        for (int i = 0; i < 3; ++i) CHECK(std::abs(s.ell.raw[i] - s.ell.value) < 1e-2);
        const EquilibriumMeasure mu = equilibrium_measure(s.engine->gamma_map_ptr(), 128);
        const double v = v_potential_on_gamma(mu, 0.37) + psi_eval(s.p, mu.map->point_exact(0.37));
        CHECK(v == doctest::Approx(-s.ell.ell / 2).epsilon(1e-8));
    }
}

TEST_CASE("g: closed form against direct quadrature") {
    for (cplx a : kParams) {
        CAPTURE(a);
        const Setup& s = setup(a);
        const auto samples = face_samples(s.graph, 17, 23);
        int n = 0;
        double worst = 0;
        for (cplx z : samples) {
            if (std::abs(z) < 0.2 || ++n > 50) continue;
            const LogComplex g = g_eval(*s.engine, s.ell.value, z);
            const LogComplex q = g_quadrature(s.engine->gamma_map(), z);
            worst = std::max({worst, std::abs(g.log_abs() - q.log_abs()), circ_dist(g.arg(), q.arg())});
        }
        CHECK(n >= 50);
        CHECK(worst < 1e-8);
    }
}

TEST_CASE("Re g is continuous across gamma") {
    for (cplx a : kParams) {
        CAPTURE(a);
        const Setup& s = setup(a);
        for (double t : {0.25, 0.5, 0.75}) {
            const auto [c, tan] = gamma_point(s.engine->gamma_map(), t);
            const double l = g_eval(*s.engine, s.ell.value, c + 1e-6 * kI * tan).log_abs();
            const double r = g_eval(*s.engine, s.ell.value, c - 1e-6 * kI * tan).log_abs();
            CHECK(std::abs(l - r) < 1e-5);
        }
    }
}

TEST_CASE("equilibrium conditions hold and a rescaled measure fails them") {
    const Setup& s = setup({-3, 2});
    const EquilibriumMeasure mu = equilibrium_measure(s.engine->gamma_map_ptr(), 256);
    const EquilibriumReport rep = check_equilibrium(s.p, mu, &s.sigma, s.ell.ell);
    CHECK(rep.ok());
    CHECK(rep.stdev < 1e-10);
    CHECK(rep.s_mismatch < 1e-6);
    CHECK(rep.ell_eq == doctest::Approx(rep.ell_from_g).epsilon(1e-8));
    const EquilibriumReport bad = check_equilibrium(s.p, scaled(mu, 1.01), &s.sigma, s.ell.ell);
    CHECK_FALSE(bad.ok());
    CHECK_FALSE(bad.mass_ok);
    CHECK_FALSE(bad.constancy_ok);
    CHECK_FALSE(bad.violations.empty());
}

TEST_CASE("energy minimization oracle reproduces the moments") {
    for (cplx a : kParams) {
        CAPTURE(a);
        const Setup& s = setup(a);
        const DiscreteMeasure nu = energy_minimize_oracle(s.p, s.sigma, 200);
        const EquilibriumMeasure mu = equilibrium_measure(s.engine->gamma_map_ptr(), 256);
        CHECK(weight_off_gamma(nu) < 1e-3);
        for (int k = 0; k <= 3; ++k) {
            const cplx m = moment(mu, k);
            CHECK(std::abs(moment(nu, k) - m) <= 1e-2 * std::max(1.0, std::abs(m)));
        }
    }
}
