#pragma once

#include <memory>
#include <optional>

#include "stokeslab/logcomplex.hpp"
#include "stokeslab/trajectories.hpp"

namespace stokeslab {

// Short trajectory with w re-continued on the "+" side. For real A > -1 it is the
// real segment [zeta_-, zeta_+], which has no F_A class to select from.
Trajectory short_trajectory(const Parameter& p, const StopRules& rules = {});

// Points of gamma addressed by the mu-distribution t in [0,1]: w(z(t)) = 2 pi i t.
// u in [0,1] is the endpoint-smoothing variable, t = u^3 / (u^3 + (1-u)^3).
class GammaMap {
public:
    GammaMap(const Parameter& p, const Trajectory& gamma, int panels = 64);

    const Parameter& param() const { return p_; }
    const Polyline& curve() const { return gamma_; }
    const std::vector<cplx>& vertex_w() const { return w_; }
    const Cut& cut() const { return cut_; }

    static double t_of_u(double u);
    static double u_of_t(double t);
    static double dt_du(double u);

    // Newton-refined point with w = 2 pi i t
    cplx point_exact(double t) const;
    // interpolated from the precomputed panels
    cplx point(double u) const;
    // w on the "+" side at a point of the polyline (or of gamma itself)
    cplx w_plus(cplx c) const;
    // distance to the sampled curve and the u of the closest sample
    std::pair<double, double> closest(cplx z) const;

private:
    Parameter p_;
    Polyline gamma_;
    std::vector<cplx> w_;
    std::vector<double> q_;  // interpolation variable at the vertices
    Cut cut_;
    int panels_;
    std::vector<cplx> samples_;  // panels_ x 16 points at the Gauss nodes
    std::vector<double> bary_;   // barycentric weights of the 16-point rule
};

enum class PhiVariant { Phi, PhiTilde, PhiHat, VarPhi };

const char* variant_name(PhiVariant v);

struct PhiValue {
    cplx value;
    PhiVariant variant = PhiVariant::Phi;
    std::optional<Face> face;
};

struct ContourSigmaA {
    Polyline sigma_minus_arc;  // from zeta_- outward
    Polyline gamma;
    Polyline sigma_plus_arc;   // from zeta_+ outward
    int orientation = -1;      // -1: traversed clockwise, origin on the right
};

// Evaluator for the branches of (1/2) int R_A/t. A value is the integral along a straight
// path from a base point next to gamma, plus the known jump of the function at every cut
// the path crosses.
class PhiEngine {
public:
    // full cut structure; VarPhi becomes available once a contour is attached
    explicit PhiEngine(const CriticalGraph& graph);
    PhiEngine(const CriticalGraph& graph, const ContourSigmaA& sigma);
    // gamma as the only cut: real A, or evaluation in the region reached from the
    // "+" side of gamma without crossing other arcs
    PhiEngine(const Parameter& p, const Trajectory& gamma);

    const Parameter& param() const { return p_; }
    const GammaMap& gamma_map() const { return *map_; }
    std::shared_ptr<const GammaMap> gamma_map_ptr() const { return map_; }
    bool has_graph() const { return graph_.has_value(); }
    const CriticalGraph& graph() const { return *graph_; }
    bool has_sigma() const { return sigma_.has_value(); }
    const ContourSigmaA& sigma() const { return *sigma_; }

    // side != None: z lies on gamma and the boundary value from that side is returned.
    // base selects the gamma vertex next to which the path starts (-1: default).
    PhiValue eval(cplx z, PhiVariant v, Side side = Side::None, int base = -1) const;

    double valid_radius() const { return r_valid_; }
    double inner_radius() const { return r_in_; }
    double phihat_radius() const { return r_hat_; }

    // jumps (left minus right) of phi-tilde across sigma_0 and sigma_up, of phi across sigma_-
    cplx jump_sigma0() const { return j0_; }
    cplx jump_sigma_minus() const { return jm_; }
    cplx jump_sigma_up() const { return ju_; }

private:
    void init_common();
    cplx plus_value(PhiVariant v, cplx w) const;
    cplx gamma_offset(PhiVariant v) const;

    Parameter p_;
    std::optional<CriticalGraph> graph_;
    std::optional<ContourSigmaA> sigma_;
    std::shared_ptr<const GammaMap> map_;
    double r_valid_ = 0, r_in_ = 0, r_hat_ = 0;
    cplx j0_, jm_, ju_;
};

PhiValue phi_eval(const PhiEngine& engine, cplx z, PhiVariant v, Side side = Side::None);

struct ConformalReport {
    int count[3] = {0, 0, 0};
    int violations = 0;
    double min_re[3], max_re[3];
    double strip_width = 0;  // Re extent of the Omega_-^(1) image including boundary-adjacent points
    std::vector<std::string> messages;
};

// Half plane / strip pattern of phi-tilde on each face.
ConformalReport check_conformal_images(const PhiEngine& engine, const std::vector<cplx>& samples);

// Random sample points classified by face, at least `per_face` in each.
std::vector<cplx> face_samples(const CriticalGraph& graph, int per_face, unsigned seed = 1);

ContourSigmaA build_sigma(const CriticalGraph& graph);

struct EquilibriumMeasure {
    std::vector<cplx> nodes;
    std::vector<double> weights;
    std::vector<double> density;  // dmu/|dz|
    std::vector<double> t;        // mu(gamma from zeta_- to the node)
    std::vector<double> u;
    std::vector<double> arclength;
    double mass = 0;
    double factor = 1;  // multiplies the measure in refined potential evaluations
    std::shared_ptr<const GammaMap> map;
};

EquilibriumMeasure equilibrium_measure(const Parameter& p, const Trajectory& gamma, int m);
EquilibriumMeasure equilibrium_measure(std::shared_ptr<const GammaMap> map, int m);
// the same measure multiplied by c (negative controls)
EquilibriumMeasure scaled(const EquilibriumMeasure& mu, double c);

cplx moment(const EquilibriumMeasure& mu, int k);
// int dmu(t)/(t - z)
cplx cauchy_transform(const EquilibriumMeasure& mu, cplx z);

// -(Re A/2) log|z| + (Im A/2) arg z + Re z/2 with arg z in (0, 2 pi).
double psi_eval(const Parameter& p, cplx z);

double v_potential(const EquilibriumMeasure& mu, cplx z);
// at the point of gamma with distribution value t
double v_potential_on_gamma(const EquilibriumMeasure& mu, double t);

struct EllResult {
    cplx value;          // Richardson limit of the defining combination
    double ell = 0;      // real part
    double spread = 0;   // difference of the two extrapolants
    cplx raw[3];
};

// ell = lim (2 + A) log z - z + 2 phi(z) as z -> -infinity, so that
// g = (1/2)(-A log z + z + ell) - varphi. The equilibrium constant of V + psi is -ell/2.
EllResult compute_ell(const PhiEngine& engine);

// g as a LogComplex: log_value = g itself, so value() = exp(g)
LogComplex g_eval(const PhiEngine& engine, cplx ell, cplx z);
// direct quadrature of int log(z - s) dmu(s), imaginary part reduced to (-pi, pi]
LogComplex g_quadrature(const GammaMap& map, cplx z, int panels = 256);

struct EquilibriumReport {
    double mass = 0;
    double ell_eq = 0;          // mean of V + psi over interior nodes
    double ell_from_g = 0;      // -ell/2
    double stdev = 0;
    double min_sigma_gap = 0;   // min over the contour samples of V + psi - ell_eq
    double s_mismatch = 0;
    bool mass_ok = false, constancy_ok = false, sigma_ok = false, s_ok = false;
    std::vector<std::string> violations;
    bool ok() const { return mass_ok && constancy_ok && sigma_ok && s_ok; }
};

// s_stride: S-property evaluated at every s_stride-th interior node.
EquilibriumReport check_equilibrium(const Parameter& p, const EquilibriumMeasure& mu,
                                    const ContourSigmaA* sigma, double ell, int s_stride = 8);

struct DiscreteMeasure {
    std::vector<cplx> nodes;
    std::vector<double> weights;
    std::vector<int> on_gamma;  // 1 for nodes of gamma, 0 for the arcs Sigma_+-
    int iterations = 0;
    double energy = 0;
};

cplx moment(const DiscreteMeasure& nu, int k);
double weight_off_gamma(const DiscreteMeasure& nu);

// Projected gradient descent of the discrete weighted energy on a fixed node set of Sigma_A.
DiscreteMeasure energy_minimize_oracle(const Parameter& p, const ContourSigmaA& sigma, int m,
                                       int max_iterations = 20000);

}  // namespace stokeslab
