#pragma once

#include "stokeslab/common.hpp"
#include "stokeslab/geometry.hpp"

namespace stokeslab {

struct Parameter {
    cplx a;
    cplx zeta_minus;
    cplx zeta_plus;
    cplx sqrt_a1;  // principal sqrt(A+1), so zeta_plus - zeta_minus = 4*sqrt_a1
    bool conjugated = false;
    bool double_zero = false;  // A = -1
    bool pole_vanishes = false;  // A = 0

    bool degenerate() const { return double_zero || pole_vanishes; }
    cplx b() const { return a + 2.0; }
    double scale() const { return 1.0 + std::abs(zeta_plus - zeta_minus); }
    // branch-point exclusion radius
    double exclusion() const { return 1e-8 * scale(); }
};

Parameter zeros_of_d(cplx a);

cplx d_of(const Parameter& p, cplx z);

// sqrt(D_A) with its cut on the straight segment [zeta_-, zeta_+], ~ z at infinity.
cplx r_segment(const Parameter& p, cplx z);

enum class Side { None = 0, Plus = 1, Minus = -1 };

// The square root R_A cut along a polyline from zeta_- to zeta_+. The region
// between the polyline and the straight segment is where R_A = -r_segment.
class Cut {
public:
    Cut() = default;
    Cut(const Parameter& p, Polyline gamma);

    const Polyline& curve() const { return gamma_; }
    const Parameter& param() const { return p_; }

    bool in_lens(cplx z) const;
    // Side of the curve: +1 left, -1 right, using the nearest polyline point.
    int side_of(cplx z) const;
    double distance(cplx z) const;

    cplx r(cplx z, Side side = Side::None) const;
    cplx r_prime(cplx z, Side side = Side::None) const;

    // ((z - zeta_+)/(z - zeta_-))^{1/4}, cut on the curve, -> 1 at infinity
    cplx quarter_root(cplx z, Side side = Side::None) const;
    // analytic continuation of quarter_root across the curve, evaluated at z
    cplx quarter_root_continued(cplx z, Side side = Side::None) const;

    double on_cut_tolerance() const { return 1e-10 * p_.scale(); }

private:
    bool lens_at(cplx z, Side side) const;

    Parameter p_;
    Polyline gamma_;
    double xmin_ = 0, xmax_ = 0, ymin_ = 0, ymax_ = 0;
    double sigma_ = 1;  // sign of Im m on the lens side of the segment midpoint, 0 if no lens
};

cplx r_global(const Parameter& p, cplx z, const Polyline& cut, Side side = Side::None);
cplx r_prime(const Parameter& p, cplx z, const Polyline& cut, Side side = Side::None);

// Branch-tracked evaluation of W(z) = R - b log(u1) - A log(u2), an antiderivative of R/z,
// with u1 = z - b + R and u2 = (A^2 - b z + A R)/z.
class WState {
public:
    WState(const Parameter& p, cplx z, cplx r);

    cplx z() const { return z_; }
    cplx r() const { return r_; }
    cplx w() const { return w_; }

    // Move to z1 along a straight segment, choosing R by continuity.
    void continue_to(cplx z1);
    // Move to a nearby z1 with R given explicitly.
    void step_to(cplx z1, cplx r1);
    // Flip the sheet in place (crossing a cut): R -> -R, log arguments reset.
    void flip_sheet();

private:
    void continue_rec(cplx z1, int depth);
    void set(cplx z, cplx r, double arg1, double arg2);

    Parameter p_;
    cplx z_, r_, w_;
    double arg_u1_ = 0, arg_u2_ = 0;
    cplx u1_, u2_;
};

cplx w_u1(const Parameter& p, cplx z, cplx r);
cplx w_u2(const Parameter& p, cplx z, cplx r);

// Integral of R/t along the polyline path, branch continued from r0 at path.front().
cplx antiderivative_w(const Parameter& p, const Polyline& path, cplx r0);
// Same with R at the start taken from r_segment.
cplx antiderivative_w(const Parameter& p, cplx z0, cplx z1, const Polyline& path);

// Panelled Gauss-Legendre quadrature of R/t along a polyline, R continued node to node.
cplx quadrature_w(const Parameter& p, const Polyline& path, cplx r0);

struct ZeroLocation {
    bool minus_upper = false, minus_lower = false, minus_real = false;
    bool plus_upper = false, plus_lower = false, plus_real = false;
    bool predicate_minus_lower = false;  // (Im A)^2 < -4 Re A and Im A > 0
    bool plus_in_image = false;   // zeta_+ right of the parabola, upper half plane
    bool minus_in_image = false;  // zeta_- outside the parabola interior in the lower half plane
};

ZeroLocation classify_zero_location(const Parameter& p);

}  // namespace stokeslab
