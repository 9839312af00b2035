#include "stokeslab/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "stokeslab/quadrature.hpp"

namespace stokeslab {

Trajectory short_trajectory(const Parameter& p, const StopRules& rules) {
    if (p.degenerate()) throw Error(ErrorCode::DegenerateParameter, "degenerate parameter");
    if (p.a.imag() != 0 || p.a.real() < -1) return find_short_trajectory(p, rules);
    const cplx d = (p.zeta_plus - p.zeta_minus) / std::abs(p.zeta_plus - p.zeta_minus);
    Trajectory g = trace(p, p.zeta_minus, d, Kind::Horizontal, rules);
    if (g.terminal.type != TerminalType::AtZero || g.terminal.zero != 1)
        throw Error(ErrorCode::NotFound, "real segment is not a trajectory");
    Cut cut(p, g.points);
    WState st(p, g.points.front(), 0.0);
    const cplx w0 = st.w();
    st.step_to(g.points[1], cut.r(g.points[1], Side::Plus));
    g.w[1] = st.w() - w0;
    for (std::size_t i = 2; i < g.points.size(); ++i) {
        st.continue_to(g.points[i]);
        g.w[i] = st.w() - w0;
    }
    return g;
}

// ---------------------------------------------------------------- GammaMap

double GammaMap::t_of_u(double u) {
    if (u <= 0) return 0;
    if (u >= 1) return 1;
    const double a = u * u * u, b = (1 - u) * (1 - u) * (1 - u);
    return a / (a + b);
}

double GammaMap::u_of_t(double t) {
    if (t <= 0) return 0;
    if (t >= 1) return 1;
    return 1.0 / (1.0 + std::cbrt((1 - t) / t));
}

double GammaMap::dt_du(double u) {
    const double a = u * u * u, b = (1 - u) * (1 - u) * (1 - u);
    const double s = a + b;
    return 3 * u * u * (1 - u) * (1 - u) / (s * s);
}

GammaMap::GammaMap(const Parameter& p, const Trajectory& gamma, int panels)
    : p_(p), gamma_(gamma.points), w_(gamma.w), cut_(p, gamma.points), panels_(panels) {
    if (gamma_.size() < 3 || std::abs(w_.back() - 2 * kPi * kI) > 1e-6)
        throw Error(ErrorCode::ConstructionFailed, "gamma does not carry the + side period");
    q_.resize(gamma_.size());
    for (std::size_t k = 0; k < gamma_.size(); ++k)
        q_[k] = u_of_t(std::clamp(w_[k].imag() / (2 * kPi), 0.0, 1.0));
    q_.front() = 0;
    q_.back() = 1;
    for (std::size_t k = 1; k < q_.size(); ++k) q_[k] = std::max(q_[k], q_[k - 1]);

    const GaussRule& g = gl16();
    bary_.resize(g.x.size());
    for (std::size_t j = 0; j < g.x.size(); ++j) {
        double prod = 1;
        for (std::size_t k = 0; k < g.x.size(); ++k)
            if (k != j) prod *= g.x[j] - g.x[k];
        bary_[j] = 1.0 / prod;
    }
    samples_.reserve(panels_ * g.x.size());
    for (int P = 0; P < panels_; ++P)
        for (double x : g.x) samples_.push_back(point_exact(t_of_u((P + 0.5 * (1 + x)) / panels_)));
}

cplx GammaMap::w_plus(cplx c) const {
    const NearestPoint np = nearest_on_polyline(gamma_, c);
    std::size_t j = np.t < 0.5 ? np.segment : np.segment + 1;
    if (c == gamma_[j]) return w_[j];
    const cplx rj = (j == 0 || j + 1 == gamma_.size()) ? cplx(0) : cut_.r(gamma_[j], Side::Plus);
    WState st(p_, gamma_[j], rj);
    const cplx w0 = st.w();
    st.step_to(c, cut_.r(c, Side::Plus));
    return w_[j] + (st.w() - w0);
}

cplx GammaMap::point_exact(double t) const {
    if (t <= 0) return p_.zeta_minus;
    if (t >= 1) return p_.zeta_plus;
    const double u = u_of_t(t);
    std::size_t k = std::upper_bound(q_.begin(), q_.end(), u) - q_.begin();
    k = std::clamp<std::size_t>(k, 1, q_.size() - 1) - 1;
    const double span = q_[k + 1] - q_[k];
    const double f = span > 0 ? (u - q_[k]) / span : 0.0;
    cplx z = gamma_[k] + f * (gamma_[k + 1] - gamma_[k]);
    const cplx target = 2 * kPi * kI * t;
    const double tol = 1e-15 * 2 * kPi;
    for (int it = 0; it < 60; ++it) {
        const cplx F = w_plus(z) - target;
        if (std::abs(F) <= tol) break;
        const cplx r = cut_.r(z, Side::Plus);
        if (r == 0.0) break;
        cplx dz = -F * z / r;
        const double lim = 0.5 * std::min(std::abs(z - p_.zeta_minus), std::abs(z - p_.zeta_plus));
        if (std::abs(dz) > lim) dz *= lim / std::abs(dz);
        z += dz;
        if (std::abs(dz) < 1e-17 * std::abs(z)) break;
    }
    return z;
}

cplx GammaMap::point(double u) const {
    if (u <= 0) return p_.zeta_minus;
    if (u >= 1) return p_.zeta_plus;
    const int P = std::min(panels_ - 1, static_cast<int>(u * panels_));
    const double x = 2 * (u * panels_ - P) - 1;
    const GaussRule& g = gl16();
    const std::size_t n = g.x.size();
    cplx num = 0;
    double den = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const double d = x - g.x[j];
        if (d == 0) return samples_[P * n + j];
        const double c = bary_[j] / d;
        num += c * samples_[P * n + j];
        den += c;
    }
    return num / den;
}

std::pair<double, double> GammaMap::closest(cplx z) const {
    const GaussRule& g = gl16();
    const std::size_t n = g.x.size();
    double best = std::abs(z - p_.zeta_minus), bu = 0;
    if (std::abs(z - p_.zeta_plus) < best) {
        best = std::abs(z - p_.zeta_plus);
        bu = 1;
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const double d = std::abs(z - samples_[i]);
        if (d < best) {
            best = d;
            bu = (static_cast<double>(i / n) + 0.5 * (1 + g.x[i % n])) / panels_;
        }
    }
    return {best, bu};
}

// ---------------------------------------------------------------- PhiEngine

const char* variant_name(PhiVariant v) {
    switch (v) {
        case PhiVariant::Phi: return "phi";
        case PhiVariant::PhiTilde: return "phitilde";
        case PhiVariant::PhiHat: return "phihat";
        case PhiVariant::VarPhi: return "varphi";
    }
    return "?";
}

namespace {

cplx first_direction(const Polyline& arc, double rho) {
    for (cplx z : arc)
        if (std::abs(z - arc.front()) >= rho) return (z - arc.front()) / std::abs(z - arc.front());
    return (arc.back() - arc.front()) / std::abs(arc.back() - arc.front());
}

cplx left_probe(const Polyline& c, double delta) {
    const std::size_t m = c.size() / 2;
    const cplx t = c[std::min(m + 1, c.size() - 1)] - c[m - 1];
    return c[m] + delta * kI * t / std::abs(t);
}

const Polyline& positive_axis() {
    static const Polyline axis{0.0, 1e15};
    return axis;
}

struct CutRef {
    const Polyline* curve;
    bool gamma;
    cplx jump;  // left minus right for constant cuts
};

// detour around `center` when the segment passes closer than a quarter of its end distances
void add_leg(Polyline& path, cplx b, cplx center, double min_clear) {
    const cplx a = path.back();
    const cplx e = b - a;
    const double len2 = std::norm(e);
    if (len2 > 0) {
        const double s = std::real(std::conj(e) * (center - a)) / len2;
        if (s > 0 && s < 1) {
            const cplx m = a + s * e;
            const double ra = std::abs(a - center), rb = std::abs(b - center);
            const double dist = std::abs(m - center);
            const double clear = std::max(0.25 * std::min(ra, rb), min_clear);
            if (dist < clear) {
                cplx n = dist > 0 ? (m - center) / dist : kI * e / std::sqrt(len2);
                path.push_back(center + std::max(0.5 * std::min(ra, rb), 2 * min_clear) * n);
            }
        }
    }
    path.push_back(b);
}

}  // namespace

PhiEngine::PhiEngine(const CriticalGraph& graph) : p_(graph.p), graph_(graph) {
    map_ = std::make_shared<GammaMap>(p_, graph.gamma);
    init_common();
    const double rho = std::min(0.02 * p_.scale(), 0.25 * std::abs(p_.zeta_minus));
    const cplx d0 = first_direction(graph.sigma0.points, rho);
    const cplx dm = first_direction(graph.sigma_minus.points, rho);
    const cplx dg = first_direction(graph.gamma.points, rho);
    // the "+" side of sigma_0 faces sigma_- and phi-tilde is smaller by pi i A on the other side
    j0_ = arg_0_2pi(dm / d0) < arg_0_2pi(dg / d0) ? kPi * kI * p_.a : -kPi * kI * p_.a;
    const double probe = 1e-3 * p_.scale();
    const bool m_left_plus = graph.face_of(left_probe(graph.sigma_minus.points, probe)) == Face::OmegaPlus;
    jm_ = (m_left_plus ? -1.0 : 1.0) * kPi * kI * (p_.a + 2.0);
    const bool u_left_plus = graph.face_of(left_probe(graph.sigma_up.points, probe)) == Face::OmegaPlus;
    ju_ = (u_left_plus ? 1.0 : -1.0) * kPi * kI * (p_.a + 2.0);
    r_in_ = std::max(4 * std::abs(graph.sigma0.points.back()), 1e-12);
    r_valid_ = 0.9 * std::min({std::abs(graph.sigma_minus.points.back()), std::abs(graph.sigma_up.points.back()),
                               std::abs(graph.sigma_down.points.back())});
}

PhiEngine::PhiEngine(const CriticalGraph& graph, const ContourSigmaA& sigma) : PhiEngine(graph) {
    sigma_ = sigma;
    r_valid_ = std::min(r_valid_, 0.9 * std::abs(sigma.sigma_minus_arc.back()));
}

PhiEngine::PhiEngine(const Parameter& p, const Trajectory& gamma) : p_(p) {
    map_ = std::make_shared<GammaMap>(p_, gamma);
    init_common();
    r_in_ = 1e-12;
    r_valid_ = std::numeric_limits<double>::infinity();
}

void PhiEngine::init_common() {
    r_hat_ = 0.5 * std::min(std::abs(p_.zeta_minus), std::abs(p_.zeta_plus - p_.zeta_minus));
}

cplx PhiEngine::plus_value(PhiVariant v, cplx w) const {
    switch (v) {
        case PhiVariant::PhiTilde:
        case PhiVariant::PhiHat: return 0.5 * w;
        case PhiVariant::Phi:
        case PhiVariant::VarPhi: return 0.5 * w - kPi * kI;
    }
    return 0.0;
}

cplx PhiEngine::gamma_offset(PhiVariant v) const {
    switch (v) {
        case PhiVariant::PhiTilde: return kPi * kI * p_.a;
        case PhiVariant::PhiHat: return 0.0;
        case PhiVariant::Phi:
        case PhiVariant::VarPhi: return -2 * kPi * kI;
    }
    return 0.0;
}

PhiValue PhiEngine::eval(cplx z, PhiVariant v, Side side, int base) const {
    PhiValue out;
    out.variant = v;
    if (v == PhiVariant::VarPhi && !sigma_)
        throw Error(ErrorCode::OutOfDomain, "varphi needs the contour Sigma_A");
    const GammaMap& M = *map_;
    if (side != Side::None) {
        const cplx wc = M.w_plus(z);
        out.value = plus_value(v, wc);
        if (side == Side::Minus) out.value -= wc + gamma_offset(v);
        if (graph_) out.face = side == Side::Plus ? Face::OmegaPlus : Face::OmegaMinus1;
        return out;
    }
    const double excl = p_.exclusion();
    if (std::abs(z - p_.zeta_minus) < excl || std::abs(z - p_.zeta_plus) < excl)
        throw Error(ErrorCode::AtBranchPoint, "evaluation at a zero of D_A");
    if (v == PhiVariant::PhiHat) {
        if (std::abs(z - p_.zeta_minus) >= r_hat_)
            throw Error(ErrorCode::OutOfDomain, "phihat is defined near zeta_- only");
    } else {
        if (std::abs(z) < r_in_) throw Error(ErrorCode::OutOfDomain, "too close to the origin");
        if (std::abs(z) > r_valid_) {
            const double c = std::cos(std::arg(z));
            const bool ok = v == PhiVariant::VarPhi ? c <= std::cos(kPi / 6) : std::abs(c) >= 0.5;
            if (!ok) throw Error(ErrorCode::OutOfDomain, "far point in the direction of an unresolved cut");
        }
    }
    if (graph_) out.face = graph_->face_of(z);

    // base vertex on gamma
    const Polyline& G = M.curve();
    const std::size_t n = G.size();
    std::size_t k = 0;
    if (base >= 0) {
        k = std::clamp<std::size_t>(base, 1, n - 2);
    } else if (v == PhiVariant::PhiHat) {
        double best = 1e300;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double e = std::abs(std::abs(G[i] - p_.zeta_minus) - 0.3 * r_hat_);
            if (e < best) {
                best = e;
                k = i;
            }
        }
    } else {
        double best = 1e300;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double e = std::abs(M.vertex_w()[i].imag() - kPi);
            if (e < best) {
                best = e;
                k = i;
            }
        }
    }

    std::vector<CutRef> cuts{{&G, true, 0.0}};
    if (graph_ && v != PhiVariant::PhiHat) {
        if (v == PhiVariant::Phi) {
            cuts.push_back({&graph_->sigma0.points, false, j0_});
            cuts.push_back({&graph_->sigma_minus.points, false, jm_});
        } else if (v == PhiVariant::PhiTilde) {
            cuts.push_back({&graph_->sigma0.points, false, j0_});
            cuts.push_back({&graph_->sigma_up.points, false, ju_});
        } else {
            cuts.push_back({&sigma_->sigma_minus_arc, false, 2 * kPi * kI});
            cuts.push_back({&positive_axis(), false, kPi * kI * p_.a});
        }
    }

    // step off gamma to the "+" side
    const cplx tan = (G[k + 1] - G[k - 1]) / std::abs(G[k + 1] - G[k - 1]);
    double delta = v == PhiVariant::PhiHat ? 0.1 * r_hat_ : 0.05 * p_.scale();
    delta = std::min(delta, 0.25 * std::abs(G[k]));
    cplx b0;
    for (int tries = 0;; ++tries) {
        b0 = G[k] + delta * kI * tan;
        bool clean = true;
        for (const CutRef& c : cuts)
            for (const Crossing& cr : segment_crossings(G[k], b0, *c.curve))
                if (!(c.gamma && cr.t_path < 1e-9)) clean = false;
        if (clean) break;
        if (tries > 40) throw Error(ErrorCode::ConstructionFailed, "no clean base point");
        delta *= 0.5;
    }

    Polyline path{G[k], b0};
    if (v == PhiVariant::PhiHat) {
        path.push_back(z);
    } else {
        cplx target = z;
        if (std::abs(z) > r_valid_) target = 0.99 * r_valid_ * z / std::abs(z);
        const double clear0 = 2 * r_in_;
        const double clearz = 1e-3 * p_.scale();
        Polyline tmp{b0};
        add_leg(tmp, target, 0.0, clear0);
        for (std::size_t i = 1; i < tmp.size(); ++i) {
            Polyline seg{path.back()};
            add_leg(seg, tmp[i], p_.zeta_minus, clearz);
            Polyline seg2{seg.front()};
            for (std::size_t j = 1; j < seg.size(); ++j) add_leg(seg2, seg[j], p_.zeta_plus, clearz);
            path.insert(path.end(), seg2.begin() + 1, seg2.end());
        }
        if (target != z) path.push_back(z);
    }

    WState st(p_, G[k], M.cut().r(G[k], Side::Plus));
    cplx wref = st.w();
    cplx acc = plus_value(v, M.vertex_w()[k]);
    struct Hit {
        double t;
        const CutRef* cut;
        Crossing cr;
    };
    for (std::size_t leg = 0; leg + 1 < path.size(); ++leg) {
        const cplx a = path[leg], b = path[leg + 1];
        std::vector<Hit> hits;
        for (const CutRef& c : cuts)
            for (const Crossing& cr : segment_crossings(a, b, *c.curve)) {
                if (leg == 0 && c.gamma && cr.t_path < 1e-9) continue;
                hits.push_back({cr.t_path, &c, cr});
            }
        std::sort(hits.begin(), hits.end(), [](const Hit& x, const Hit& y) { return x.t < y.t; });
        for (const Hit& h : hits) {
            st.continue_to(h.cr.point);
            if (h.cut->gamma) {
                acc += 0.5 * (st.w() - wref);
                acc += static_cast<double>(h.cr.side) * (M.w_plus(h.cr.point) + gamma_offset(v));
                st.flip_sheet();
                wref = st.w();
            } else {
                acc += static_cast<double>(h.cr.side) * h.cut->jump;
            }
        }
        st.continue_to(b);
    }
    acc += 0.5 * (st.w() - wref);
    out.value = acc;
    return out;
}

PhiValue phi_eval(const PhiEngine& engine, cplx z, PhiVariant v, Side side) { return engine.eval(z, v, side); }

// ---------------------------------------------------------------- conformal images

std::vector<cplx> face_samples(const CriticalGraph& graph, int per_face, unsigned seed) {
    const Parameter& p = graph.p;
    std::mt19937 rng(seed);
    const cplx c = 0.5 * (p.zeta_minus + p.zeta_plus);
    double half = 2 * p.scale();
    std::vector<cplx> out;
    int count[3] = {0, 0, 0};
    const double keep = 1e-3 * p.scale();
    const Polyline* arcs[] = {&graph.gamma.points, &graph.sigma0.points, &graph.sigma_minus.points,
                              &graph.sigma_up.points, &graph.sigma_down.points};
    for (int attempt = 0; attempt < 200000; ++attempt) {
        if (attempt % 20000 == 19999) half *= 1.5;
        std::uniform_real_distribution<double> u(-half, half);
        const cplx z = c + cplx(u(rng), u(rng));
        if (std::abs(z) < 0.05 * p.scale()) continue;
        bool near = false;
        for (const Polyline* a : arcs)
            if (nearest_on_polyline(*a, z).distance < keep) near = true;
        if (near) continue;
        const int f = static_cast<int>(graph.face_of(z));
        if (count[f] >= per_face) continue;
        ++count[f];
        out.push_back(z);
        if (count[0] >= per_face && count[1] >= per_face && count[2] >= per_face) return out;
    }
    throw Error(ErrorCode::ConstructionFailed, "could not sample every face");
}

ConformalReport check_conformal_images(const PhiEngine& engine, const std::vector<cplx>& samples) {
    if (!engine.has_graph()) throw Error(ErrorCode::OutOfDomain, "conformal check needs the critical graph");
    const CriticalGraph& G = engine.graph();
    const Parameter& p = engine.param();
    const double width = kPi * p.a.imag();
    ConformalReport rep;
    for (int f = 0; f < 3; ++f) {
        rep.min_re[f] = 1e300;
        rep.max_re[f] = -1e300;
    }
    for (cplx z : samples) {
        const PhiValue pv = engine.eval(z, PhiVariant::PhiTilde);
        const int f = static_cast<int>(*pv.face);
        const double re = pv.value.real();
        ++rep.count[f];
        rep.min_re[f] = std::min(rep.min_re[f], re);
        rep.max_re[f] = std::max(rep.max_re[f], re);
        bool ok = true;
        switch (*pv.face) {
            case Face::OmegaPlus: ok = re < 0; break;
            case Face::OmegaMinus1: ok = re > 0 && re < width; break;
            case Face::OmegaMinus2: ok = re > width; break;
        }
        if (!ok) {
            ++rep.violations;
            rep.messages.push_back(std::string(face_name(*pv.face)) + " sample " + format_cplx(z) +
                                   " maps to Re " + format_real(re));
        }
    }
    // boundary-adjacent points of Omega_-^(1): sigma_- and the "+" side of sigma_0 on the left
    // edge of the strip, sigma_down on the right edge
    const double eps = 1e-10 * p.scale();
    double lo = rep.min_re[1], hi = rep.max_re[1];
    auto side_toward = [&](const Polyline& c, Face f) {
        return G.face_of(left_probe(c, 1e-3 * p.scale())) == f ? 1.0 : -1.0;
    };
    auto scan = [&](const Polyline& c, double s) {
        const std::size_t n = c.size();
        for (std::size_t i = 1; i + 1 < n; i += std::max<std::size_t>(1, n / 60)) {
            if (std::abs(c[i]) > 0.5 * engine.valid_radius() || std::abs(c[i]) < 4 * engine.inner_radius()) continue;
            const cplx t = (c[i + 1] - c[i - 1]) / std::abs(c[i + 1] - c[i - 1]);
            const double re = engine.eval(c[i] + s * eps * kI * t, PhiVariant::PhiTilde).value.real();
            lo = std::min(lo, re);
            hi = std::max(hi, re);
        }
    };
    scan(G.sigma_minus.points, side_toward(G.sigma_minus.points, Face::OmegaMinus1));
    scan(G.sigma_down.points, side_toward(G.sigma_down.points, Face::OmegaMinus1));
    // the "+" side of sigma_0 is its left side when phi-tilde jumps by +pi i A from right to left
    const double s0 = std::abs(engine.jump_sigma0() - kPi * kI * p.a) < 1e-12 ? 1.0 : -1.0;
    scan(G.sigma0.points, s0);
    scan(G.sigma0.points, -s0);
    rep.strip_width = hi - lo;
    if (std::abs(rep.strip_width - width) > 1e-6) {
        ++rep.violations;
        rep.messages.push_back("strip width " + format_real(rep.strip_width) + " vs " + format_real(width));
    }
    return rep;
}

// ---------------------------------------------------------------- Sigma_A

namespace {

Polyline ascent_arc(const CriticalGraph& G, const Cut& cut, cplx zeta, cplx dir0, bool plus) {
    const Parameter& p = G.p;
    const double sc = p.scale();
    const double rho = std::min(0.01 * sc, 0.25 * std::abs(zeta));
    const double r_stop = G.rules.r_infinity;
    const double cone = 75.0 * kPi / 180;
    Polyline arc{zeta, zeta + rho * dir0};
    auto direction = [&](cplx z) {
        const cplx r = cut.r(z);
        const cplx fp = r / (2.0 * z);
        const cplx g = std::conj(fp) / std::abs(fp);
        const double th = std::arg(z);
        cplx guide;
        if (plus)
            guide = (th >= 0 && th <= kPi / 2) ? cplx(1) : -kI * z / std::abs(z);
        else
            guide = (th <= 0 && th >= -kPi / 2) ? cplx(1) : kI * z / std::abs(z);
        guide += 0.3 * z / std::abs(z);
        guide /= std::abs(guide);
        const double a = std::arg(guide / g);
        if (std::abs(a) <= cone) return guide;
        return g * std::polar(1.0, a > 0 ? cone : -cone);
    };
    auto steepest = [&](cplx z, cplx prev) {
        const cplx fp = cut.r(z) / (2.0 * z);
        const cplx g = std::conj(fp) / std::abs(fp);
        return std::real(g * std::conj(prev)) >= 0 ? g : -g;
    };
    for (int step = 0; step < 200000; ++step) {
        const cplx z = arc.back();
        const double az = std::abs(z);
        if (az > r_stop && std::cos(std::arg(z)) > std::cos(kPi / 4)) return arc;
        const double h = std::min({0.05 * std::max(std::abs(z - zeta), rho), 0.05 * az + 0.01 * sc, 0.1 * sc + 0.05 * az});
        try {
            cplx d1, d2;
            if (plus && std::abs(z - zeta) < 0.1 * sc) {
                // steepest ascent of Re phi inside the Airy disk, where f maps the arc onto f > 0
                const cplx prev = arc.back() - arc[arc.size() - 2];
                d1 = steepest(z, prev);
                d2 = steepest(z + 0.5 * h * d1, d1);
            } else {
                d1 = direction(z);
                d2 = direction(z + 0.5 * h * d1);
            }
            arc.push_back(z + h * d2);
        } catch (const Error& e) {
            throw Error(ErrorCode::ConstructionFailed, std::string("ascent arc met a cut: ") + e.what());
        }
    }
    throw Error(ErrorCode::ConstructionFailed, "ascent arc did not reach the far field");
}

bool crosses_positive_axis(const Polyline& c) {
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        const cplx a = c[i], b = c[i + 1];
        if ((a.imag() > 0) == (b.imag() > 0)) continue;
        if (a.imag() == b.imag()) continue;
        const double x = a.real() + (b.real() - a.real()) * (-a.imag()) / (b.imag() - a.imag());
        if (x > 0) return true;
    }
    return false;
}

bool crosses(const Polyline& a, const Polyline& b, double skip_near, cplx skip_center) {
    for (std::size_t i = 0; i + 1 < a.size(); ++i)
        for (const Crossing& c : segment_crossings(a[i], a[i + 1], b))
            if (std::abs(c.point - skip_center) > skip_near) return true;
    return false;
}

}  // namespace

ContourSigmaA build_sigma(const CriticalGraph& G) {
    const Parameter& p = G.p;
    const Cut cut(p, G.gamma.points);
    const double rho = std::min(0.02 * p.scale(), 0.25 * std::abs(p.zeta_minus));
    auto bis = [](cplx a, cplx b) { return (a + b) / std::abs(a + b); };
    const double rp = std::min(0.02 * p.scale(), 0.25 * std::abs(p.zeta_plus));
    const cplx dplus = bis(first_direction(G.sigma_up.points, rp), first_direction(G.sigma_down.points, rp));
    const cplx dminus = bis(first_direction(G.sigma_minus.points, rho), first_direction(G.sigma0.points, rho));

    ContourSigmaA S;
    S.gamma = G.gamma.points;
    S.sigma_plus_arc = ascent_arc(G, cut, p.zeta_plus, dplus, true);
    S.sigma_minus_arc = ascent_arc(G, cut, p.zeta_minus, dminus, false);

    if (crosses_positive_axis(S.sigma_plus_arc) || crosses_positive_axis(S.sigma_minus_arc))
        throw Error(ErrorCode::ConstructionFailed, "Sigma arc crosses the positive axis");
    if (!(S.sigma_plus_arc.back().imag() > 0 && S.sigma_minus_arc.back().imag() < 0))
        throw Error(ErrorCode::ConstructionFailed, "Sigma arcs leave on the wrong sides of the positive axis");
    const double skip = 1e-9 * p.scale();
    for (const Polyline* c : {&G.gamma.points, &G.sigma0.points, &G.sigma_minus.points, &G.sigma_up.points}) {
        if (crosses(S.sigma_minus_arc, *c, skip, p.zeta_minus))
            throw Error(ErrorCode::ConstructionFailed, "Sigma_- crosses a critical arc");
        if (crosses(S.sigma_plus_arc, *c, skip, p.zeta_plus))
            throw Error(ErrorCode::ConstructionFailed, "Sigma_+ crosses a critical arc");
    }
    if (crosses(S.sigma_plus_arc, G.sigma_down.points, skip, p.zeta_plus) ||
        crosses(S.sigma_plus_arc, S.sigma_minus_arc, skip, p.zeta_plus))
        throw Error(ErrorCode::ConstructionFailed, "Sigma_+ leaves Omega_-^(2)");

    // positivity of Re phi-tilde along both arcs
    PhiEngine eng(G);
    for (const Polyline* c : {&S.sigma_plus_arc, &S.sigma_minus_arc}) {
        for (std::size_t i = 1; i < c->size(); i += std::max<std::size_t>(1, c->size() / 200)) {
            const cplx z = (*c)[i];
            if (std::abs(z) > eng.valid_radius()) break;
            if (!(eng.eval(z, PhiVariant::PhiTilde).value.real() > 0))
                throw Error(ErrorCode::ConstructionFailed, "Re phi-tilde not positive on Sigma at " + format_cplx(z));
        }
    }
    return S;
}

// ---------------------------------------------------------------- measure

EquilibriumMeasure equilibrium_measure(std::shared_ptr<const GammaMap> map, int m) {
    if (m < 16) throw Error(ErrorCode::Config, "node count below 16");
    const GammaMap& M = *map;
    const Parameter& p = M.param();
    const int panels = (m + 15) / 16;
    const GaussRule& g = gl16();
    EquilibriumMeasure mu;
    mu.map = map;
    const std::vector<double> cum = cumulative_length(M.curve());
    for (int P = 0; P < panels; ++P) {
        for (std::size_t j = 0; j < g.x.size(); ++j) {
            const double u = (P + 0.5 * (1 + g.x[j])) / panels;
            const double t = GammaMap::t_of_u(u);
            const cplx z = M.point_exact(t);
            const cplx r = M.cut().r(z, Side::Plus);
            const NearestPoint np = nearest_on_polyline(M.curve(), z);
            // the "+" boundary value makes int R/t increase in Im along gamma
            if (!(std::imag(r / z * np.tangent) > 0))
                throw Error(ErrorCode::NegativeDensity, "density not positive at " + format_cplx(z));
            mu.nodes.push_back(z);
            mu.u.push_back(u);
            mu.t.push_back(t);
            mu.weights.push_back(GammaMap::dt_du(u) * g.w[j] * 0.5 / panels);
            mu.density.push_back(std::abs(r / (2 * kPi * z)));
            mu.arclength.push_back(cum[np.segment] + np.t * std::abs(M.curve()[np.segment + 1] - M.curve()[np.segment]));
        }
    }
    mu.mass = std::accumulate(mu.weights.begin(), mu.weights.end(), 0.0);
    (void)p;
    return mu;
}

EquilibriumMeasure equilibrium_measure(const Parameter& p, const Trajectory& gamma, int m) {
    return equilibrium_measure(std::make_shared<GammaMap>(p, gamma), m);
}

EquilibriumMeasure scaled(const EquilibriumMeasure& mu, double c) {
    EquilibriumMeasure out = mu;
    for (double& w : out.weights) w *= c;
    for (double& d : out.density) d *= c;
    out.mass *= c;
    out.factor *= c;
    return out;
}

cplx moment(const EquilibriumMeasure& mu, int k) {
    cplx s = 0;
    for (std::size_t i = 0; i < mu.nodes.size(); ++i) s += mu.weights[i] * std::pow(mu.nodes[i], k);
    return s;
}

cplx cauchy_transform(const EquilibriumMeasure& mu, cplx z) {
    cplx s = 0;
    for (std::size_t i = 0; i < mu.nodes.size(); ++i) s += mu.weights[i] / (mu.nodes[i] - z);
    return s;
}

double psi_eval(const Parameter& p, cplx z) {
    if (z == 0.0) throw Error(ErrorCode::OnCut, "psi at the origin");
    if (p.a.imag() != 0 && z.real() > 0 && std::abs(z.imag()) <= 1e-15 * z.real())
        throw Error(ErrorCode::OnCut, "psi on the positive axis");
    return -0.5 * p.a.real() * std::log(std::abs(z)) + 0.5 * p.a.imag() * arg_0_2pi(z) + 0.5 * z.real();
}

namespace {

double log_integral(const GammaMap& M, cplx z, double u0, double u1, double tol) {
    auto f = [&](double u) { return std::log(std::abs(z - M.point(u))) * GammaMap::dt_du(u); };
    return gl16_adaptive(f, u0, u1, tol);
}

}  // namespace

double v_potential(const EquilibriumMeasure& mu, cplx z) {
    const GammaMap& M = *mu.map;
    const auto [d, us] = M.closest(z);
    const double panel = polyline_length(M.curve()) / (mu.nodes.size() / 16.0);
    if (d > 0.5 * panel) {
        double s = 0;
        for (std::size_t i = 0; i < mu.nodes.size(); ++i) s -= mu.weights[i] * std::log(std::abs(z - mu.nodes[i]));
        return s;
    }
    // move the split onto the nearest point so the log singularity sits at a panel end
    double lo = std::max(0.0, us - 2.0 / (16 * 64)), hi = std::min(1.0, us + 2.0 / (16 * 64));
    auto dist = [&](double u) { return std::abs(z - M.point(u)); };
    const double gr = 0.5 * (std::sqrt(5.0) - 1);
    for (int it = 0; it < 80 && hi - lo > 1e-16; ++it) {
        const double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        if (dist(x1) < dist(x2))
            hi = x2;
        else
            lo = x1;
    }
    const double split = 0.5 * (lo + hi);
    if (dist(split) <= 1e-12 * M.param().scale() && split > 0 && split < 1)
        return v_potential_on_gamma(mu, GammaMap::t_of_u(split));
    const double tol = 1e-12;
    double s = 0;
    if (split > 0) s += log_integral(M, z, 0.0, split, tol);
    if (split < 1) s += log_integral(M, z, split, 1.0, tol);
    return -mu.factor * s;
}

double v_potential_on_gamma(const EquilibriumMeasure& mu, double t0) {
    const GammaMap& M = *mu.map;
    const cplx z0 = M.point_exact(t0);
    const double u0 = GammaMap::u_of_t(t0);
    auto f = [&](double u) {
        const double t = GammaMap::t_of_u(u);
        return std::log(std::abs(z0 - M.point(u)) / std::abs(t - t0)) * GammaMap::dt_du(u);
    };
    const double tol = 1e-12;
    double s = gl16_adaptive(f, 0.0, u0, tol) + gl16_adaptive(f, u0, 1.0, tol);
    s += t0 * std::log(t0) + (1 - t0) * std::log(1 - t0) - 1;
    return -mu.factor * s;
}

// ---------------------------------------------------------------- ell and g

EllResult compute_ell(const PhiEngine& engine) {
    const Parameter& p = engine.param();
    EllResult res;
    const double xs[3] = {1e3, 1e4, 1e5};
    for (int i = 0; i < 3; ++i) {
        const cplx z(-xs[i], 0.0);
        const cplx ph = engine.eval(z, PhiVariant::Phi).value;
        res.raw[i] = (2.0 + p.a) * log_cut_positive(z) - z + 2.0 * ph;
    }
    // L(X) = ell + a/X + b/X^2 + ...; the three-point combination removes a and b
    const cplx e2 = (10.0 * res.raw[2] - res.raw[1]) / 9.0;
    const cplx e3 = (1000.0 * res.raw[2] - 110.0 * res.raw[1] + res.raw[0]) / 891.0;
    res.value = e3;
    res.spread = std::abs(e3 - e2);
    res.ell = e3.real();
    if (res.spread > 1e-6) throw Error(ErrorCode::NoConvergence, "ell extrapolants differ by " + format_real(res.spread));
    return res;
}

LogComplex g_eval(const PhiEngine& engine, cplx ell, cplx z) {
    const Parameter& p = engine.param();
    if (z == 0.0) throw Error(ErrorCode::OnCut, "g at the origin");
    if (engine.gamma_map().cut().distance(z) < engine.gamma_map().cut().on_cut_tolerance())
        throw Error(ErrorCode::OnCut, "g on gamma");
    const cplx vp = engine.eval(z, PhiVariant::VarPhi).value;
    const cplx g = 0.5 * (-p.a * log_cut_positive(z) + z + ell) - vp;
    return LogComplex::from_log(g);
}

LogComplex g_quadrature(const GammaMap& M, cplx z, int panels) {
    const GaussRule& g = gl16();
    double re = 0, im = 0;
    cplx prev = M.param().zeta_minus;
    double a = std::arg(z - prev);
    for (int P = 0; P < panels; ++P) {
        for (std::size_t j = 0; j < g.x.size(); ++j) {
            const double u = (P + 0.5 * (1 + g.x[j])) / panels;
            const double w = GammaMap::dt_du(u) * g.w[j] * 0.5 / panels;
            const cplx s = M.point(u);
            a += std::arg((z - s) / (z - prev));
            prev = s;
            re += w * std::log(std::abs(z - s));
            im += w * a;
        }
    }
    return LogComplex::from_log({re, im});
}

// ---------------------------------------------------------------- checks

EquilibriumReport check_equilibrium(const Parameter& p, const EquilibriumMeasure& mu, const ContourSigmaA* sigma,
                                    double ell, int s_stride) {
    EquilibriumReport rep;
    rep.mass = mu.mass;
    rep.mass_ok = std::abs(mu.mass - 1) <= 1e-8;
    if (!rep.mass_ok) rep.violations.push_back("mass " + format_real(mu.mass));

    const std::size_t n = mu.nodes.size();
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = v_potential_on_gamma(mu, mu.t[i]) + psi_eval(p, mu.nodes[i]);
    const double mean = std::accumulate(f.begin(), f.end(), 0.0) / n;
    double var = 0;
    for (double x : f) var += (x - mean) * (x - mean);
    rep.ell_eq = mean;
    rep.ell_from_g = -0.5 * ell;
    rep.stdev = std::sqrt(var / n);
    rep.constancy_ok = rep.stdev <= 1e-6 * (1 + std::abs(mean));
    if (!rep.constancy_ok) rep.violations.push_back("V+psi spread on gamma " + format_real(rep.stdev));

    rep.min_sigma_gap = 0;
    if (sigma) {
        double gap = 1e300;
        for (const Polyline* c : {&sigma->sigma_minus_arc, &sigma->sigma_plus_arc}) {
            const double lim = 2 * p.scale();
            for (std::size_t i = 0; i < c->size(); ++i) {
                const cplx z = (*c)[i];
                if (std::abs(z - c->front()) > lim) break;
                const double val = (i == 0 ? mean : v_potential(mu, z) + psi_eval(p, z)) - mean;
                gap = std::min(gap, val);
            }
        }
        rep.min_sigma_gap = gap;
    }
    rep.sigma_ok = rep.min_sigma_gap >= -1e-6;
    if (!rep.sigma_ok) rep.violations.push_back("V+psi below ell on Sigma by " + format_real(-rep.min_sigma_gap));

    const double h = 1e-4;
    double worst = 0;
    const Cut& cut = mu.map->cut();
    auto F = [&](cplx z) { return v_potential(mu, z) + psi_eval(p, z); };
    for (std::size_t i = s_stride / 2; i < n; i += std::max(1, s_stride)) {
        const cplx z0 = mu.nodes[i];
        const cplx q = cut.r(z0, Side::Plus) / z0;
        const cplx tau = kI * std::conj(q) / std::abs(q);
        const cplx nplus = kI * tau;
        const double f0 = f[i];
        const double dp = (-3 * f0 + 4 * F(z0 + h * nplus) - F(z0 + 2 * h * nplus)) / (2 * h);
        const double dm = (-3 * f0 + 4 * F(z0 - h * nplus) - F(z0 - 2 * h * nplus)) / (2 * h);
        worst = std::max(worst, std::abs(dp - dm));
    }
    rep.s_mismatch = worst;
    rep.s_ok = worst < 1e-4;
    if (!rep.s_ok) rep.violations.push_back("S-property mismatch " + format_real(worst));
    return rep;
}

// ---------------------------------------------------------------- energy oracle

namespace {

// points at arclengths s along a polyline
std::vector<cplx> points_at(const Polyline& c, const std::vector<double>& s) {
    const std::vector<double> cum = cumulative_length(c);
    std::vector<cplx> out;
    std::size_t k = 0;
    for (double x : s) {
        while (k + 2 < c.size() && cum[k + 1] < x) ++k;
        const double len = cum[k + 1] - cum[k];
        const double f = len > 0 ? std::clamp((x - cum[k]) / len, 0.0, 1.0) : 0.0;
        out.push_back(c[k] + f * (c[k + 1] - c[k]));
    }
    return out;
}

void project_simplex(std::vector<double>& v) {
    std::vector<double> s(v);
    std::sort(s.begin(), s.end(), std::greater<>());
    double cum = 0, theta = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        cum += s[i];
        const double t = (cum - 1) / (i + 1);
        if (i + 1 == s.size() || s[i + 1] <= t) {
            theta = t;
            break;
        }
    }
    for (double& x : v) x = std::max(0.0, x - theta);
}

}  // namespace

cplx moment(const DiscreteMeasure& nu, int k) {
    cplx s = 0;
    for (std::size_t i = 0; i < nu.nodes.size(); ++i) s += nu.weights[i] * std::pow(nu.nodes[i], k);
    return s;
}

double weight_off_gamma(const DiscreteMeasure& nu) {
    double s = 0;
    for (std::size_t i = 0; i < nu.nodes.size(); ++i)
        if (!nu.on_gamma[i]) s += nu.weights[i];
    return s;
}

DiscreteMeasure energy_minimize_oracle(const Parameter& p, const ContourSigmaA& sigma, int m, int max_iterations) {
    if (m < 16) throw Error(ErrorCode::Config, "node count below 16");
    const int mg = static_cast<int>(std::lround(0.75 * m));
    const int ms = (m - mg) / 2;
    const double L = polyline_length(sigma.gamma);
    const double delta = L / mg;
    DiscreteMeasure nu;
    std::vector<double> spacing;
    {
        std::vector<double> s;
        for (int j = 0; j < mg; ++j) s.push_back(delta * (j + 0.5));
        for (cplx z : points_at(sigma.gamma, s)) {
            nu.nodes.push_back(z);
            nu.on_gamma.push_back(1);
            spacing.push_back(delta);
        }
    }
    for (const Polyline* arc : {&sigma.sigma_minus_arc, &sigma.sigma_plus_arc}) {
        std::vector<double> s;
        for (int j = 0; j < ms; ++j) s.push_back(delta * (j + 0.5));
        for (cplx z : points_at(*arc, s)) {
            nu.nodes.push_back(z);
            nu.on_gamma.push_back(0);
            spacing.push_back(delta);
        }
    }
    const std::size_t n = nu.nodes.size();
    // log kernel; the diagonal carries the self-energy of a uniform segment of the local spacing
    std::vector<double> K(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            K[i * n + j] = i == j ? -std::log(spacing[i]) + 1.5 : -std::log(std::abs(nu.nodes[i] - nu.nodes[j]));
    std::vector<double> psi(n);
    for (std::size_t i = 0; i < n; ++i) psi[i] = psi_eval(p, nu.nodes[i]);

    auto energy = [&](const std::vector<double>& w, std::vector<double>* grad) {
        double e = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double kw = 0;
            for (std::size_t j = 0; j < n; ++j) kw += K[i * n + j] * w[j];
            e += w[i] * kw + 2 * w[i] * psi[i];
            if (grad) (*grad)[i] = 2 * kw + 2 * psi[i];
        }
        return e;
    };
    // largest eigenvalue of K by power iteration fixes the base step
    std::vector<double> x(n, 1.0 / std::sqrt(double(n))), y(n);
    double lam = 1;
    for (int it = 0; it < 50; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0;
            for (std::size_t j = 0; j < n; ++j) s += K[i * n + j] * x[j];
            y[i] = s;
        }
        double nr = 0;
        for (double v : y) nr += v * v;
        nr = std::sqrt(nr);
        lam = nr;
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / nr;
    }
    const double eta0 = 1.0 / (2 * lam);

    std::vector<double> w(n, 1.0 / n), grad(n);
    const double e_start = energy(w, nullptr);
    int it = 0;
    for (; it < max_iterations; ++it) {
        energy(w, &grad);
        const double eta = eta0 / (1.0 + it / 2000.0);
        std::vector<double> next(n);
        for (std::size_t i = 0; i < n; ++i) next[i] = w[i] - eta * grad[i];
        project_simplex(next);
        double change = 0;
        for (std::size_t i = 0; i < n; ++i) change += std::abs(next[i] - w[i]);
        w.swap(next);
        if (change < 1e-13) break;
    }
    nu.weights = w;
    nu.iterations = it;
    nu.energy = energy(w, nullptr);
    if (!(nu.energy < e_start)) throw Error(ErrorCode::NoDescentProgress, "energy did not decrease");
    return nu;
}

}  // namespace stokeslab
