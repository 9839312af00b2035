#include "stokeslab/trajectories.hpp"

#include <algorithm>
#include <cmath>

namespace stokeslab {

StopRules StopRules::resolved(const Parameter& p) const {
    StopRules r = *this;
    const double sc = p.scale();
    if (r.capture <= 0) r.capture = 1e-4 * sc;
    if (r.r_origin <= 0) r.r_origin = 1e-6 * (1 + std::abs(p.a));
    if (r.r_infinity <= 0) r.r_infinity = 50 * (1 + std::abs(p.a));
    if (r.h_max <= 0) r.h_max = 0.05 * sc;
    return r;
}

std::string terminal_name(const Terminal& t) {
    switch (t.type) {
        case TerminalType::AtZero: return t.zero < 0 ? "zeta-" : "zeta+";
        case TerminalType::AtOrigin: return "origin";
        case TerminalType::ClosedLoop: return "closed-loop";
        case TerminalType::AtInfinity:
            switch (t.direction) {
                case InfDir::PlusI: return "+i*inf";
                case InfDir::MinusI: return "-i*inf";
                case InfDir::PlusReal: return "+inf";
                case InfDir::MinusReal: return "-inf";
            }
    }
    return "?";
}

std::array<cplx, 3> emanating_directions(const Parameter& p, int zero, Kind kind) {
    if (p.degenerate()) throw Error(ErrorCode::DegenerateParameter, "degenerate parameter");
    const cplx zeta = zero < 0 ? p.zeta_minus : p.zeta_plus;
    // near zeta the differential is -D'(zeta)/zeta^2 (z - zeta) dz^2
    const cplx lead = -2.0 * (zeta - p.b()) / (zeta * zeta);
    const double base = (kind == Kind::Horizontal ? 0.0 : kPi) - std::arg(lead);
    std::array<cplx, 3> out;
    for (int k = 0; k < 3; ++k) out[k] = std::polar(1.0, (base + 2 * kPi * k) / 3);
    return out;
}

namespace {

cplx field(const Parameter& p, Kind kind, cplx z, cplx heading) {
    const cplx r = r_segment(p, z);
    if (r == 0.0 || z == 0.0) return heading;
    cplx v = z / r;
    if (kind == Kind::Horizontal) v *= kI;
    v /= std::abs(v);
    if (std::real(v * std::conj(heading)) < 0) v = -v;
    return v;
}

double level_of(Kind kind, cplx w) { return kind == Kind::Horizontal ? w.real() : w.imag(); }

// R with the sign that makes w increase along dir: Im for horizontal, Re for orthogonal.
cplx oriented_r(const Parameter& p, Kind kind, cplx z, cplx dir) {
    cplx r = r_segment(p, z);
    const cplx q = r / z * dir;
    const double v = kind == Kind::Horizontal ? q.imag() : q.real();
    return v < 0 ? -r : r;
}

WState advance(const Parameter& p, const WState& prev, cplx z, cplx ref_r) {
    WState s = prev;
    if (prev.r() == 0.0) {
        // leaving a zero: take the sheet of ref_r
        const cplx r = r_segment(p, z);
        s.step_to(z, std::real(r * std::conj(ref_r)) >= 0 ? r : -r);
    } else {
        s.continue_to(z);
    }
    return s;
}

WState project(const Parameter& p, Kind kind, const WState& prev, cplx z, double level, cplx ref_r) {
    WState s = advance(p, prev, z, ref_r);
    for (int it = 0; it < 4; ++it) {
        const double e = level_of(kind, s.w()) - level;
        if (std::abs(e) < 1e-14 * (1 + std::abs(level))) break;
        const cplx q = s.r() / s.z();
        cplx d = -e * std::conj(q) / std::norm(q);
        if (kind == Kind::Orthogonal) d *= kI;
        s = advance(p, prev, s.z() + d, ref_r);
    }
    return s;
}

// Dormand-Prince 5(4)
struct RkResult {
    cplx z5, z4;
};

RkResult dp_step(const Parameter& p, Kind kind, cplx z, cplx heading, double h) {
    auto f = [&](cplx x) { return field(p, kind, x, heading); };
    const cplx k1 = f(z);
    const cplx k2 = f(z + h * (k1 / 5.0));
    const cplx k3 = f(z + h * (3.0 / 40 * k1 + 9.0 / 40 * k2));
    const cplx k4 = f(z + h * (44.0 / 45 * k1 - 56.0 / 15 * k2 + 32.0 / 9 * k3));
    const cplx k5 = f(z + h * (19372.0 / 6561 * k1 - 25360.0 / 2187 * k2 + 64448.0 / 6561 * k3 - 212.0 / 729 * k4));
    const cplx k6 = f(z + h * (9017.0 / 3168 * k1 - 355.0 / 33 * k2 + 46732.0 / 5247 * k3 + 49.0 / 176 * k4 -
                               5103.0 / 18656 * k5));
    const cplx z5 = z + h * (35.0 / 384 * k1 + 500.0 / 1113 * k3 + 125.0 / 192 * k4 - 2187.0 / 6784 * k5 +
                             11.0 / 84 * k6);
    const cplx k7 = f(z5);
    const cplx z4 = z + h * (5179.0 / 57600 * k1 + 7571.0 / 16695 * k3 + 393.0 / 640 * k4 -
                             92097.0 / 339200 * k5 + 187.0 / 2100 * k6 + 1.0 / 40 * k7);
    return {z5, z4};
}

}  // namespace

Trajectory trace(const Parameter& p, cplx start, cplx dir, Kind kind, const StopRules& rules_in) {
    if (p.degenerate()) throw Error(ErrorCode::DegenerateParameter, "degenerate parameter");
    const StopRules rules = rules_in.resolved(p);
    const double sc = p.scale();
    Trajectory T;
    T.kind = kind;
    if (std::abs(start - p.zeta_minus) < 1e-12 * sc) {
        T.start_zero = -1;
        start = p.zeta_minus;
    } else if (std::abs(start - p.zeta_plus) < 1e-12 * sc) {
        T.start_zero = 1;
        start = p.zeta_plus;
    }
    cplx heading = dir / std::abs(dir);
    const cplx zetas[2] = {p.zeta_minus, p.zeta_plus};

    cplx r0 = T.start_zero != 0 ? cplx(0) : oriented_r(p, kind, start, heading);
    WState st(p, start, r0);
    const double level = level_of(kind, st.w());
    const cplx w0 = st.w();
    T.points.push_back(start);
    T.w.push_back(0.0);
    T.s.push_back(0.0);
    double s = 0, wind = 0;

    auto push = [&](const WState& x) {
        s += std::abs(x.z() - T.points.back());
        if (T.points.back() != 0.0 && x.z() != 0.0) wind += std::arg(x.z() / T.points.back());
        T.points.push_back(x.z());
        T.w.push_back(x.w() - w0);
        T.s.push_back(s);
    };

    if (T.start_zero != 0) {
        const double h0 = std::min(0.5 * rules.capture, 0.1 * std::abs(start));
        const cplx z1 = start + h0 * heading;
        const cplx r1 = oriented_r(p, kind, z1, heading);
        st = project(p, kind, st, z1, level, r1);
        heading = field(p, kind, st.z(), heading);
        push(st);
    }

    double h = std::min(rules.h_max, 0.01 * sc);
    int homing = -1;
    double home_dist = 0;
    WState prev_state = st;
    for (std::size_t step = 0; step < rules.max_steps; ++step) {
        const cplx z = st.z();
        double hb = std::min(rules.h_max, 0.1 * std::abs(z));
        for (int k = 0; k < 2; ++k) {
            const int idx = k == 0 ? -1 : 1;
            if (idx == T.start_zero && s < 20 * rules.capture) continue;
            hb = std::min(hb, 0.5 * std::abs(z - zetas[k]));
        }
        h = std::min(h, hb);
        const double tolz = rules.tol * std::max(std::min(std::abs(z), sc), 1e-300);
        const RkResult rk = dp_step(p, kind, z, heading, h);
        const double err = std::abs(rk.z5 - rk.z4);
        if (err > tolz) {
            h *= std::max(0.1, 0.9 * std::pow(tolz / err, 0.2));
            if (h < 1e-13 * std::max(std::abs(z), 1e-300)) throw Error(ErrorCode::StepCollapse, "step size underflow");
            continue;
        }
        WState next = project(p, kind, st, rk.z5, level, 0.0);
        heading = field(p, kind, next.z(), (next.z() - z) / std::abs(next.z() - z));
        st = next;
        push(st);
        h *= std::min(5.0, err > 0 ? 0.9 * std::pow(tolz / err, 0.2) : 5.0);

        const cplx zn = st.z();
        if (homing >= 0) {
            // inside the capture disk: walk on toward the zero until it is hit or the distance grows
            const double d = std::abs(zn - zetas[homing]);
            if (d < 1e-10 * sc || d >= home_dist) {
                if (d >= home_dist) {
                    T.points.pop_back();
                    T.w.pop_back();
                    T.s.pop_back();
                    st = prev_state;
                }
                st.continue_to(zetas[homing]);
                push(st);
                return T;
            }
            home_dist = d;
            prev_state = st;
            continue;
        }
        for (int k = 0; k < 2; ++k) {
            const int idx = k == 0 ? -1 : 1;
            if (std::abs(zn - zetas[k]) >= rules.capture) continue;
            if (idx == T.start_zero) {
                if (s < 20 * rules.capture) continue;
                T.terminal.type = TerminalType::ClosedLoop;
            } else {
                T.terminal.type = TerminalType::AtZero;
            }
            T.terminal.zero = idx;
            homing = k;
            home_dist = std::abs(zn - zetas[k]);
            prev_state = st;
        }
        if (homing >= 0) continue;
        if (std::abs(zn) < rules.r_origin || std::abs(wind) > 2 * kPi * rules.max_winding) {
            T.terminal.type = TerminalType::AtOrigin;
            T.terminal.truncated = std::abs(zn) >= rules.r_origin;
            T.terminal.winding_angle = wind;
            T.terminal.winding = static_cast<int>(wind / (2 * kPi));
            return T;
        }
        if (std::abs(zn) > rules.r_infinity) {
            T.terminal.type = TerminalType::AtInfinity;
            if (std::abs(zn.imag()) >= std::abs(zn.real()))
                T.terminal.direction = zn.imag() > 0 ? InfDir::PlusI : InfDir::MinusI;
            else
                T.terminal.direction = zn.real() > 0 ? InfDir::PlusReal : InfDir::MinusReal;
            return T;
        }
    }
    throw Error(ErrorCode::MaxLengthExceeded, "trace exceeded the step budget");
}

double level_drift(const Trajectory& t) {
    double m = 0;
    for (cplx w : t.w) m = std::max(m, std::abs(t.kind == Kind::Horizontal ? w.real() : w.imag()));
    return m;
}

HomotopyClass homotopy_class(const Polyline& arc, const Parameter& p) {
    for (std::size_t i = 0; i + 1 < arc.size(); ++i)
        if (distance_to_segment(0.0, arc[i], arc[i + 1]) < 1e-12 * p.scale())
            throw Error(ErrorCode::ArcThroughOrigin, "arc passes through the origin");
    // arcs in C minus R_+ change arg by exactly the difference of the [0, 2pi) arguments
    const double expected = arg_0_2pi(arc.back()) - arg_0_2pi(arc.front());
    const long k = std::lround((winding_angle(arc, 0.0) - expected) / (2 * kPi));
    return k == 0 ? HomotopyClass::FA : HomotopyClass::Complement;
}

std::vector<Trajectory> find_short_trajectories(const Parameter& p, const StopRules& rules) {
    std::vector<Trajectory> out;
    for (cplx d : emanating_directions(p, -1, Kind::Horizontal)) {
        try {
            Trajectory t = trace(p, p.zeta_minus, d, Kind::Horizontal, rules);
            if (t.terminal.type == TerminalType::AtZero && t.terminal.zero == 1) out.push_back(std::move(t));
        } catch (const Error&) {
        }
    }
    return out;
}

cplx one_sided_period(const Parameter& p, const Polyline& gamma) {
    Cut cut(p, gamma);
    WState st(p, gamma.front(), 0.0);
    const cplx w0 = st.w();
    st.step_to(gamma[1], cut.r(gamma[1], Side::Plus));
    for (std::size_t i = 2; i < gamma.size(); ++i) st.continue_to(gamma[i]);
    return st.w() - w0;
}

cplx two_sided_period(const Parameter& p, const Polyline& gamma) {
    Cut cut(p, gamma);
    auto side_integral = [&](double sign) {
        Polyline off;
        for (std::size_t i = 1; i + 1 < gamma.size(); ++i) {
            const cplx t = gamma[i + 1] - gamma[i - 1];
            const double d =
                0.2 * std::min(std::abs(gamma[i] - gamma[i - 1]), std::abs(gamma[i + 1] - gamma[i]));
            off.push_back(gamma[i] + sign * d * kI * t / std::abs(t));
        }
        const cplx r1 = cut.r(off.front());
        WState head(p, off.front(), r1);
        const cplx wa = head.w();
        head.continue_to(gamma.front());
        WState st(p, off.front(), r1);
        for (std::size_t i = 1; i < off.size(); ++i) st.continue_to(off[i]);
        st.continue_to(gamma.back());
        return (st.w() - wa) - (head.w() - wa);
    };
    return 0.5 * (side_integral(1.0) - side_integral(-1.0));
}

Trajectory find_short_trajectory(const Parameter& p, const StopRules& rules) {
    if (p.degenerate()) throw Error(ErrorCode::DegenerateParameter, "degenerate parameter");
    std::vector<Trajectory> cands = find_short_trajectories(p, rules);
    std::vector<Trajectory> fa;
    for (auto& t : cands)
        if (homotopy_class(t.points, p) == HomotopyClass::FA) fa.push_back(std::move(t));
    if (fa.empty())
        throw Error(ErrorCode::NotFound,
                    "no short trajectory in class F_A among " + std::to_string(cands.size()) + " candidates");
    auto period_gap = [&](const Trajectory& t) { return std::abs(t.w.back() - 2 * kPi * kI); };
    std::sort(fa.begin(), fa.end(),
              [&](const Trajectory& a, const Trajectory& b) { return period_gap(a) < period_gap(b); });
    Trajectory g = std::move(fa.front());
    // re-continue w on the "+" side so it equals the integral of R_+/t from zeta_-
    Cut cut(p, g.points);
    WState st(p, g.points.front(), 0.0);
    const cplx w0 = st.w();
    st.step_to(g.points[1], cut.r(g.points[1], Side::Plus));
    g.w[0] = 0.0;
    g.w[1] = st.w() - w0;
    for (std::size_t i = 2; i < g.points.size(); ++i) {
        st.continue_to(g.points[i]);
        g.w[i] = st.w() - w0;
    }
    return g;
}

const char* face_name(Face f) {
    switch (f) {
        case Face::OmegaPlus: return "Omega+";
        case Face::OmegaMinus1: return "Omega-1";
        case Face::OmegaMinus2: return "Omega-2";
    }
    return "?";
}

namespace {

Polyline close_east(Polyline c, double big) {
    const cplx top = c.back(), bot = c.front();
    c.push_back({top.real(), big});
    c.push_back({big, big});
    c.push_back({big, -big});
    c.push_back({bot.real(), -big});
    return c;
}

// the first point of the arc at distance >= rho from its start, as a unit direction
cplx arc_direction(const Polyline& arc, double rho) {
    for (cplx z : arc)
        if (std::abs(z - arc.front()) >= rho) return (z - arc.front()) / std::abs(z - arc.front());
    return (arc.back() - arc.front()) / std::abs(arc.back() - arc.front());
}

Polyline reversed(const Polyline& c) { return Polyline(c.rbegin(), c.rend()); }

}  // namespace

Face CriticalGraph::face_of(cplx z) const {
    // the reference probes sit in the sectors at zeta_+ between gamma and sigma_up
    // (Omega_+) and between sigma_up and sigma_down (Omega_-^(2))
    const double rho = std::min(0.02 * p.scale(), 0.25 * std::abs(p.zeta_plus));
    Polyline g = reversed(gamma.points);
    const cplx dg = arc_direction(g, rho), du = arc_direction(sigma_up.points, rho),
               dd = arc_direction(sigma_down.points, rho);
    auto bis = [](cplx a, cplx b) { return (a + b) / std::abs(a + b); };
    const cplx probe_plus = p.zeta_plus + 0.5 * rho * bis(dg, du);
    const cplx probe_m2 = p.zeta_plus + 0.5 * rho * bis(du, dd);
    if (inside_polygon(east2, z) == inside_polygon(east2, probe_m2)) return Face::OmegaMinus2;
    if (inside_polygon(east1, z) == inside_polygon(east1, probe_plus)) return Face::OmegaPlus;
    return Face::OmegaMinus1;
}

std::vector<Terminal> CriticalGraph::terminals() const {
    return {gamma.terminal, sigma0.terminal, sigma_minus.terminal, sigma_up.terminal, sigma_down.terminal};
}

bool CriticalGraph::convex_check() const {
    const double cap = rules.capture;
    for (const Crossing& c : segment_crossings(p.zeta_minus, p.zeta_plus, gamma.points)) {
        if (std::abs(c.point - p.zeta_minus) < cap || std::abs(c.point - p.zeta_plus) < cap) continue;
        return false;
    }
    return true;
}

CriticalGraph build_critical_graph(const Parameter& p, const StopRules& rules_in) {
    if (p.degenerate()) throw Error(ErrorCode::DegenerateParameter, "degenerate parameter");
    if (!(p.a.imag() > 0)) throw Error(ErrorCode::DegenerateParameter, "critical graph requires Im A > 0");
    CriticalGraph G;
    G.p = p;
    G.rules = rules_in.resolved(p);
    G.gamma = find_short_trajectory(p, G.rules);

    // remaining arcs at zeta_-
    const cplx dgm = arc_direction(G.gamma.points, 0.5 * G.rules.capture);
    bool have0 = false, haveM = false;
    for (cplx d : emanating_directions(p, -1, Kind::Horizontal)) {
        if (std::abs(d - dgm) < 0.5) continue;
        Trajectory t = trace(p, p.zeta_minus, d, Kind::Horizontal, G.rules);
        if (t.terminal.type == TerminalType::AtOrigin && !have0) {
            G.sigma0 = std::move(t);
            have0 = true;
        } else if (t.terminal.type == TerminalType::AtInfinity && t.terminal.direction == InfDir::MinusI && !haveM) {
            G.sigma_minus = std::move(t);
            haveM = true;
        } else {
            throw Error(ErrorCode::GraphInconsistent, "unexpected arc from zeta-: " + terminal_name(t.terminal));
        }
    }
    // remaining arcs at zeta_+
    const cplx dgp = arc_direction(reversed(G.gamma.points), 0.5 * G.rules.capture);
    bool haveU = false, haveD = false;
    for (cplx d : emanating_directions(p, 1, Kind::Horizontal)) {
        if (std::abs(d - dgp) < 0.5) continue;
        Trajectory t = trace(p, p.zeta_plus, d, Kind::Horizontal, G.rules);
        if (t.terminal.type == TerminalType::AtInfinity && t.terminal.direction == InfDir::PlusI && !haveU) {
            G.sigma_up = std::move(t);
            haveU = true;
        } else if (t.terminal.type == TerminalType::AtInfinity && t.terminal.direction == InfDir::MinusI &&
                   !haveD) {
            G.sigma_down = std::move(t);
            haveD = true;
        } else {
            throw Error(ErrorCode::GraphInconsistent, "unexpected arc from zeta+: " + terminal_name(t.terminal));
        }
    }
    if (!(have0 && haveM && haveU && haveD))
        throw Error(ErrorCode::GraphInconsistent, "missing critical arcs");

    const double big = 3 * G.rules.r_infinity;
    Polyline c1 = reversed(G.sigma_minus.points);
    c1.insert(c1.end(), G.gamma.points.begin() + 1, G.gamma.points.end());
    c1.insert(c1.end(), G.sigma_up.points.begin() + 1, G.sigma_up.points.end());
    G.east1 = close_east(std::move(c1), big);
    Polyline c2 = reversed(G.sigma_down.points);
    c2.insert(c2.end(), G.sigma_up.points.begin() + 1, G.sigma_up.points.end());
    G.east2 = close_east(std::move(c2), big);
    return G;
}

OrthogonalGraph trace_orthogonal_arcs(const Parameter& p, const StopRules& rules) {
    OrthogonalGraph O;
    for (int zero : {-1, 1}) {
        const cplx zeta = zero < 0 ? p.zeta_minus : p.zeta_plus;
        for (cplx d : emanating_directions(p, zero, Kind::Orthogonal)) {
            Trajectory t = trace(p, zeta, d, Kind::Orthogonal, rules);
            if (t.terminal.type == TerminalType::AtOrigin) ++O.origin_count;
            if (t.terminal.type == TerminalType::ClosedLoop) ++O.closed_loops;
            O.arcs.push_back(std::move(t));
        }
    }
    return O;
}

OrthogonalGraph orthogonal_critical_graph(const Parameter& p, const StopRules& rules) {
    if (p.degenerate()) throw Error(ErrorCode::DegenerateParameter, "degenerate parameter");
    const double tol = 1e-12 * (1 + std::abs(p.a));
    if (std::abs(p.a.real()) < tol || std::abs(p.a.real() + 1) < tol)
        throw Error(ErrorCode::BoundaryCase, "Re A = 0 or Re(A+1) = 0");
    return trace_orthogonal_arcs(p, rules);
}

}  // namespace stokeslab
