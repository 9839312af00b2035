#include "stokeslab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cctype>
#include <cstdio>
#include <limits>
#include <regex>

namespace stokeslab {

const char* error_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::OnCut: return "OnCut";
        case ErrorCode::AtBranchPoint: return "AtBranchPoint";
        case ErrorCode::PathTooCloseToSingularity: return "PathTooCloseToSingularity";
        case ErrorCode::DegenerateParameter: return "DegenerateParameter";
        case ErrorCode::StepCollapse: return "StepCollapse";
        case ErrorCode::MaxLengthExceeded: return "MaxLengthExceeded";
        case ErrorCode::NotFound: return "NotFound";
        case ErrorCode::GraphInconsistent: return "GraphInconsistent";
        case ErrorCode::BoundaryCase: return "BoundaryCase";
        case ErrorCode::ArcThroughOrigin: return "ArcThroughOrigin";
        case ErrorCode::OutOfDomain: return "OutOfDomain";
        case ErrorCode::ConstructionFailed: return "ConstructionFailed";
        case ErrorCode::NegativeDensity: return "NegativeDensity";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::NoDescentProgress: return "NoDescentProgress";
        case ErrorCode::PrecisionExhausted: return "PrecisionExhausted";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::TailNotDecaying: return "TailNotDecaying";
        case ErrorCode::ZeroArgument: return "ZeroArgument";
        case ErrorCode::OutOfDisk: return "OutOfDisk";
        case ErrorCode::RegimeMismatch: return "RegimeMismatch";
        case ErrorCode::Config: return "Config";
    }
    return "Unknown";
}

std::string format_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string format_cplx(cplx z) { return format_real(z.real()) + "," + format_real(z.imag()); }

cplx parse_complex(const std::string& text) {
    static const std::string num = R"((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)";
    static const std::regex imag_only("^([+-]?)(" + num + ")?\\*?[ij]$");
    static const std::regex general("^([+-]?" + num + ")(?:([+-])(" + num + ")?\\*?[ij])?$");
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    std::smatch m;
    const auto coefficient = [](const std::string& sign, const std::string& digits) {
        const double v = digits.empty() ? 1.0 : std::stod(digits);
        return sign == "-" ? -v : v;
    };
    if (std::regex_match(s, m, imag_only)) return {0.0, coefficient(m[1], m[2])};
    if (std::regex_match(s, m, general)) {
        const double re = std::stod(m[1]);
        return {re, m[2].matched ? coefficient(m[2], m[3]) : 0.0};
    }
    throw Error(ErrorCode::Config, "cannot parse complex number '" + text + "'");
}

namespace {

double cross(cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); }

}  // namespace

std::vector<Crossing> segment_crossings(cplx a, cplx b, const Polyline& curve) {
    std::vector<Crossing> out;
    if (curve.size() < 2) return out;
    const cplx d = b - a;
    const double xmin = std::min(a.real(), b.real()), xmax = std::max(a.real(), b.real());
    const double ymin = std::min(a.imag(), b.imag()), ymax = std::max(a.imag(), b.imag());
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const cplx p = curve[i], q = curve[i + 1];
        if (std::max(p.real(), q.real()) < xmin || std::min(p.real(), q.real()) > xmax ||
            std::max(p.imag(), q.imag()) < ymin || std::min(p.imag(), q.imag()) > ymax)
            continue;
        const cplx e = q - p;
        const double den = cross(d, e);
        if (den == 0.0) continue;
        const cplx ap = p - a;
        const double t = cross(ap, e) / den;
        const double s = cross(ap, d) / den;
        // half-open on the polyline so a shared vertex counts once
        if (t < 0.0 || t > 1.0 || s < 0.0 || s >= 1.0) continue;
        if (s == 0.0 && i > 0) {
            // passing exactly through a vertex: count only if the curve really changes side
            const cplx prev = curve[i - 1];
            const double c1 = cross(d, prev - a), c2 = cross(d, q - a);
            if (c1 * c2 > 0) continue;
        }
        Crossing c;
        c.segment = i;
        c.t_path = t;
        c.t_seg = s;
        c.point = p + s * e;
        c.side = cross(e, d) > 0 ? +1 : -1;
        out.push_back(c);
    }
    std::sort(out.begin(), out.end(),
              [](const Crossing& x, const Crossing& y) { return x.t_path < y.t_path; });
    return out;
}

bool inside_polygon(const Polyline& poly, cplx z) {
    bool inside = false;
    const std::size_t n = poly.size();
    if (n < 3) return false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double yi = poly[i].imag(), yj = poly[j].imag();
        if ((yi > z.imag()) != (yj > z.imag())) {
            const double x = poly[j].real() +
                             (z.imag() - yj) * (poly[i].real() - poly[j].real()) / (yi - yj);
            if (z.real() < x) inside = !inside;
        }
    }
    return inside;
}

double distance_to_segment(cplx z, cplx a, cplx b) {
    const cplx e = b - a;
    const double l2 = std::norm(e);
    if (l2 == 0.0) return std::abs(z - a);
    double t = std::real((z - a) * std::conj(e)) / l2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(z - (a + t * e));
}

NearestPoint nearest_on_polyline(const Polyline& curve, cplx z) {
    NearestPoint best;
    best.distance = std::numeric_limits<double>::infinity();
    if (curve.empty()) return best;
    if (curve.size() == 1) {
        best.point = curve[0];
        best.distance = std::abs(z - curve[0]);
        best.tangent = 1.0;
        return best;
    }
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
        const cplx a = curve[i], e = curve[i + 1] - a;
        const double l2 = std::norm(e);
        double t = l2 > 0 ? std::real((z - a) * std::conj(e)) / l2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const cplx p = a + t * e;
        const double dist = std::abs(z - p);
        if (dist < best.distance) {
            best.distance = dist;
            best.segment = i;
            best.t = t;
            best.point = p;
            best.tangent = l2 > 0 ? e / std::sqrt(l2) : cplx(1.0);
        }
    }
    return best;
}

double polyline_length(const Polyline& curve) {
    double s = 0;
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) s += std::abs(curve[i + 1] - curve[i]);
    return s;
}

std::vector<double> cumulative_length(const Polyline& curve) {
    std::vector<double> s(curve.size(), 0.0);
    for (std::size_t i = 1; i < curve.size(); ++i) s[i] = s[i - 1] + std::abs(curve[i] - curve[i - 1]);
    return s;
}

double winding_angle(const Polyline& curve, cplx center) {
    double total = 0;
    for (std::size_t i = 0; i + 1 < curve.size(); ++i)
        total += std::arg((curve[i + 1] - center) / (curve[i] - center));
    return total;
}

}  // namespace stokeslab
