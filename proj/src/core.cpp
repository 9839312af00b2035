#include "stokeslab/core.hpp"

#include <algorithm>
#include <cmath>

#include "stokeslab/quadrature.hpp"

namespace stokeslab {

Parameter zeros_of_d(cplx a) {
    Parameter p;
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
        throw Error(ErrorCode::DegenerateParameter, "non-finite parameter");
    if (a.imag() < 0) {
        a = std::conj(a);
        p.conjugated = true;
    }
    // a real A < -1 takes the limit from the upper half plane
    if (a.imag() == 0.0) a = cplx(a.real(), 0.0);
    p.a = a;
    cplx s = std::sqrt(a + 1.0);
    p.sqrt_a1 = s;
    const cplx zp = (1.0 + s) * (1.0 + s);
    const cplx zm = (1.0 - s) * (1.0 - s);
    // the smaller root loses digits to cancellation; recover it from the product A^2
    if (std::abs(zp) >= std::abs(zm)) {
        p.zeta_plus = zp;
        p.zeta_minus = zp != 0.0 ? a * a / zp : zm;
    } else {
        p.zeta_minus = zm;
        p.zeta_plus = zm != 0.0 ? a * a / zm : zp;
    }
    p.double_zero = std::abs(a + 1.0) < 1e-14;
    p.pole_vanishes = std::abs(a) < 1e-14;
    return p;
}

cplx d_of(const Parameter& p, cplx z) { return (z - p.a) * (z - p.a) - 4.0 * z; }

cplx r_segment(const Parameter& p, cplx z) {
    const cplx dm = z - p.zeta_minus;
    if (dm == 0.0) return 0.0;
    return dm * std::sqrt((z - p.zeta_plus) / dm);
}

Cut::Cut(const Parameter& p, Polyline gamma) : p_(p), gamma_(std::move(gamma)) {
    if (gamma_.size() < 2) throw Error(ErrorCode::GraphInconsistent, "cut needs two points");
    xmin_ = xmax_ = gamma_[0].real();
    ymin_ = ymax_ = gamma_[0].imag();
    for (cplx z : gamma_) {
        xmin_ = std::min(xmin_, z.real());
        xmax_ = std::max(xmax_, z.real());
        ymin_ = std::min(ymin_, z.imag());
        ymax_ = std::max(ymax_, z.imag());
    }
    // the lens lies on one side of the segment; on its left Im m > 0
    const cplx d = p_.zeta_plus - p_.zeta_minus;
    const cplx mid = 0.5 * (p_.zeta_plus + p_.zeta_minus);
    const cplx left = mid + 1e-7 * kI * d;
    const cplx right = mid - 1e-7 * kI * d;
    const bool l = in_lens(left), r = in_lens(right);
    if (l == r) {
        // gamma coincides with the segment (real A > -1); the lens is empty
        sigma_ = 0;
    } else {
        sigma_ = l ? 1.0 : -1.0;
    }
}

bool Cut::in_lens(cplx z) const {
    if (z.real() < xmin_ || z.real() > xmax_ || z.imag() < ymin_ || z.imag() > ymax_) return false;
    return inside_polygon(gamma_, z);
}

double Cut::distance(cplx z) const { return nearest_on_polyline(gamma_, z).distance; }

int Cut::side_of(cplx z) const {
    const NearestPoint np = nearest_on_polyline(gamma_, z);
    const cplx d = z - np.point;
    const double c = np.tangent.real() * d.imag() - np.tangent.imag() * d.real();
    return c >= 0 ? 1 : -1;
}

bool Cut::lens_at(cplx z, Side side) const {
    if (side == Side::None) {
        if (distance(z) < on_cut_tolerance())
            throw Error(ErrorCode::OnCut, "point on the cut without a side");
        return in_lens(z);
    }
    const NearestPoint np = nearest_on_polyline(gamma_, z);
    const double eps = 1e-7 * p_.scale();
    if (np.distance > 10 * eps) return in_lens(z);
    return in_lens(np.point + static_cast<double>(side) * eps * kI * np.tangent);
}

cplx Cut::r(cplx z, Side side) const {
    const cplx v = r_segment(p_, z);
    if (side != Side::None) {
        const NearestPoint np = nearest_on_polyline(gamma_, z);
        const double eps = 1e-7 * p_.scale();
        if (np.distance <= 10 * eps) {
            // one-sided limit: match the sign of the value just off the curve
            const cplx q = np.point + static_cast<double>(side) * eps * kI * np.tangent;
            const cplx vq = in_lens(q) ? -r_segment(p_, q) : r_segment(p_, q);
            return std::abs(v - vq) <= std::abs(v + vq) ? v : -v;
        }
    }
    return lens_at(z, side) ? -v : v;
}

cplx Cut::r_prime(cplx z, Side side) const {
    if (std::abs(z - p_.zeta_minus) < p_.exclusion() || std::abs(z - p_.zeta_plus) < p_.exclusion())
        throw Error(ErrorCode::AtBranchPoint, "derivative at a zero of D_A");
    return (z - p_.b()) / r(z, side);
}

namespace {

// the one of the four fourth roots of m closest to ref
cplx snap_quarter(cplx m, cplx ref) {
    cplx q = std::pow(m, 0.25), best = q;
    for (int k = 1; k < 4; ++k) {
        q *= kI;
        if (std::abs(q - ref) < std::abs(best - ref)) best = q;
    }
    return best;
}

}  // namespace

cplx Cut::quarter_root(cplx z, Side side) const {
    const cplx m = (z - p_.zeta_plus) / (z - p_.zeta_minus);
    if (side != Side::None) {
        const NearestPoint np = nearest_on_polyline(gamma_, z);
        const double eps = 1e-7 * p_.scale();
        if (np.distance <= 10 * eps)
            return snap_quarter(m, quarter_root(np.point + static_cast<double>(side) * eps * kI * np.tangent));
    }
    const cplx q = std::pow(m, 0.25);
    return lens_at(z, Side::None) ? q * (-kI * sigma_) : q;
}

cplx Cut::quarter_root_continued(cplx z, Side side) const {
    const cplx m = (z - p_.zeta_plus) / (z - p_.zeta_minus);
    if (side != Side::None) {
        const NearestPoint np = nearest_on_polyline(gamma_, z);
        const double eps = 1e-7 * p_.scale();
        if (np.distance <= 10 * eps)
            return snap_quarter(
                m, quarter_root_continued(np.point + static_cast<double>(side) * eps * kI * np.tangent));
    }
    const cplx q = std::pow(m, 0.25);
    if (sigma_ == 0) return q * (m.imag() >= 0 ? -kI : kI);
    return lens_at(z, Side::None) ? q : q * (-kI * sigma_);
}

cplx r_global(const Parameter& p, cplx z, const Polyline& cut, Side side) {
    return Cut(p, cut).r(z, side);
}

cplx r_prime(const Parameter& p, cplx z, const Polyline& cut, Side side) {
    return Cut(p, cut).r_prime(z, side);
}

cplx w_u1(const Parameter& p, cplx z, cplx r) {
    const cplx b = p.b();
    const cplx t1 = z - b + r, t2 = z - b - r;
    if (std::abs(t1) >= std::abs(t2)) return t1;
    // (z-b+R)(z-b-R) = b^2 - A^2 = 4(A+1)
    return 4.0 * (p.a + 1.0) / t2;
}

cplx w_u2(const Parameter& p, cplx z, cplx r) {
    const cplx a = p.a, b = p.b();
    const cplx n1 = a * a - b * z + a * r, n2 = a * a - b * z - a * r;
    if (std::abs(n1) >= std::abs(n2)) return n1 / z;
    // n1 n2 = 4(A+1) z^2
    return 4.0 * (a + 1.0) * z / n2;
}

WState::WState(const Parameter& p, cplx z, cplx r) : p_(p) {
    const cplx u1 = w_u1(p, z, r), u2 = w_u2(p, z, r);
    if (u1 == 0.0 || u2 == 0.0 || !std::isfinite(std::abs(u2)))
        throw Error(ErrorCode::PathTooCloseToSingularity, "antiderivative singular at start");
    u1_ = u1;
    u2_ = u2;
    set(z, r, std::arg(u1), std::arg(u2));
}

void WState::set(cplx z, cplx r, double arg1, double arg2) {
    z_ = z;
    r_ = r;
    arg_u1_ = arg1;
    arg_u2_ = arg2;
    const cplx l1(std::log(std::abs(u1_)), arg1), l2(std::log(std::abs(u2_)), arg2);
    w_ = r - p_.b() * l1 - p_.a * l2;
}

void WState::step_to(cplx z1, cplx r1) {
    const cplx u1 = w_u1(p_, z1, r1), u2 = w_u2(p_, z1, r1);
    const double d1 = std::arg(u1 / u1_), d2 = std::arg(u2 / u2_);
    u1_ = u1;
    u2_ = u2;
    set(z1, r1, arg_u1_ + d1, arg_u2_ + d2);
}

void WState::flip_sheet() {
    const cplx r = -r_;
    u1_ = w_u1(p_, z_, r);
    u2_ = w_u2(p_, z_, r);
    set(z_, r, std::arg(u1_), std::arg(u2_));
}

void WState::continue_to(cplx z1) {
    const double tol = 1e-12 * p_.scale();
    if (distance_to_segment(0.0, z_, z1) < tol && z1 != 0.0)
        throw Error(ErrorCode::PathTooCloseToSingularity, "path through the origin");
    continue_rec(z1, 0);
}

void WState::continue_rec(cplx z1, int depth) {
    if (z1 == z_) return;
    if (depth > 60) throw Error(ErrorCode::PathTooCloseToSingularity, "continuation did not resolve");
    const cplx dz = z1 - z_;
    const cplx c = r_segment(p_, z1);
    cplx r1;
    bool ok = true;
    if (std::abs(r_) == 0.0 || c == 0.0) {
        r1 = c;
    } else {
        const cplx pred = r_ + dz * (z_ - p_.b()) / r_;
        r1 = std::abs(c - pred) <= std::abs(-c - pred) ? c : -c;
        if (std::abs(r1 - pred) > 0.3 * std::abs(r1)) ok = false;
    }
    if (ok) {
        const cplx u1 = w_u1(p_, z1, r1), u2 = w_u2(p_, z1, r1);
        if (std::abs(std::arg(u1 / u1_)) > 1.0 || std::abs(std::arg(u2 / u2_)) > 1.0) ok = false;
    }
    if (!ok) {
        const cplx mid = 0.5 * (z_ + z1);
        continue_rec(mid, depth + 1);
        continue_rec(z1, depth + 1);
        return;
    }
    step_to(z1, r1);
}

namespace {

void check_path(const Parameter& p, const Polyline& path) {
    const double tol = p.exclusion();
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const cplx a = path[i], b = path[i + 1];
        if (distance_to_segment(0.0, a, b) < tol)
            throw Error(ErrorCode::PathTooCloseToSingularity, "path meets the origin");
        for (cplx zeta : {p.zeta_minus, p.zeta_plus}) {
            // a path may start or end at a zero, never pass through one
            if (std::abs(a - zeta) < tol || std::abs(b - zeta) < tol) continue;
            if (distance_to_segment(zeta, a, b) < tol)
                throw Error(ErrorCode::PathTooCloseToSingularity, "path meets a zero of D_A");
        }
    }
}

}  // namespace

cplx antiderivative_w(const Parameter& p, const Polyline& path, cplx r0) {
    if (path.size() < 2) return 0.0;
    check_path(p, path);
    WState st(p, path[0], r0);
    const cplx w0 = st.w();
    for (std::size_t i = 1; i < path.size(); ++i) st.continue_to(path[i]);
    return st.w() - w0;
}

cplx antiderivative_w(const Parameter& p, cplx z0, cplx z1, const Polyline& path) {
    Polyline full = path;
    if (full.empty() || full.front() != z0) full.insert(full.begin(), z0);
    if (full.back() != z1) full.push_back(z1);
    return antiderivative_w(p, full, r_segment(p, z0));
}

cplx quadrature_w(const Parameter& p, const Polyline& path, cplx r0) {
    if (path.size() < 2) return 0.0;
    check_path(p, path);
    cplx r = r0;
    cplx total = 0.0;
    const GaussRule& g = gl16();
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        const cplx a = path[i], e = path[i + 1] - a;
        double t = 0;
        while (t < 1.0) {
            const cplx z = a + t * e;
            const double d = std::min({std::abs(z), std::abs(z - p.zeta_minus), std::abs(z - p.zeta_plus)});
            double h = std::min(1.0 - t, std::max(0.05 * d, 1e-6) / std::abs(e));
            if (1.0 - t - h < 1e-12) h = 1.0 - t;
            // R at each node by continuity from the panel start
            cplx sum = 0.0;
            cplx rprev = r, zprev = z;
            for (std::size_t k = 0; k < g.x.size(); ++k) {
                const double tk = t + 0.5 * h * (1.0 + g.x[k]);
                const cplx zk = a + tk * e;
                const cplx c = r_segment(p, zk);
                cplx rk = c;
                if (std::abs(rprev) > 0) {
                    const cplx pred = rprev + (zk - zprev) * (zprev - p.b()) / rprev;
                    rk = std::abs(c - pred) <= std::abs(-c - pred) ? c : -c;
                }
                sum += g.w[k] * rk / zk;
                rprev = rk;
                zprev = zk;
            }
            total += sum * 0.5 * h * e;
            const cplx zend = a + (t + h) * e;
            const cplx c = r_segment(p, zend);
            if (std::abs(rprev) > 0) {
                const cplx pred = rprev + (zend - zprev) * (zprev - p.b()) / rprev;
                r = std::abs(c - pred) <= std::abs(-c - pred) ? c : -c;
            } else {
                r = c;
            }
            t += h;
        }
    }
    return total;
}

ZeroLocation classify_zero_location(const Parameter& p) {
    ZeroLocation z;
    const double tol = 1e-12 * p.scale();
    auto cls = [tol](cplx v, bool& up, bool& lo, bool& re) {
        if (std::abs(v.imag()) <= tol) re = true;
        else if (v.imag() > 0) up = true;
        else lo = true;
    };
    cls(p.zeta_minus, z.minus_upper, z.minus_lower, z.minus_real);
    cls(p.zeta_plus, z.plus_upper, z.plus_lower, z.plus_real);
    const double ia = p.a.imag(), ra = p.a.real();
    z.predicate_minus_lower = ia * ia < -4 * ra && ia > 0;
    // images of the upper half plane under (1 +- sqrt(A+1))^2, bounded by arcs of the
    // parabola 1 - t^2 + 2it
    auto right_of_parabola = [](cplx v) {
        const double t = v.imag() / 2;
        return v.real() > 1 - t * t;
    };
    z.plus_in_image = p.zeta_plus.imag() >= -tol && right_of_parabola(p.zeta_plus);
    z.minus_in_image = !(p.zeta_minus.imag() <= tol && right_of_parabola(p.zeta_minus) &&
                         !(std::abs(p.zeta_minus.imag()) <= tol && p.zeta_minus.real() >= 0));
    return z;
}

}  // namespace stokeslab
