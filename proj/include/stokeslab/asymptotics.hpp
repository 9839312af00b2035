#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "stokeslab/equilibrium.hpp"
#include "stokeslab/logcomplex.hpp"
#include "stokeslab/trajectories.hpp"

namespace stokeslab {

enum class AiryMethod { Series, Asymptotic };

struct AiryValue {
    cplx ai;
    cplx ai_prime;
    AiryMethod method = AiryMethod::Series;
};

// Maclaurin series for |t| <= 6, the large-argument expansion beyond
AiryValue airy(cplx t);

struct AiryBiValue {
    cplx ai, ai_prime, bi, bi_prime;
    cplx wronskian;  // Ai Bi' - Ai' Bi at the working precision
};
// both solutions from the Maclaurin series, at `digits` decimal digits
AiryBiValue airy_series(cplx t, int digits = 40);
// the large-|t| expansion alone, at any t != 0
AiryValue airy_asymptotic(cplx t);

enum class Regime { Outer, BandPlus, BandMinus, AiryPlus };

const char* regime_name(Regime r);
std::optional<Regime> parse_regime(const std::string& s);

// Geometry for one parameter value: critical graph, contour, phi engine, ell and the
// conformal map near zeta_+. Built once, read-only afterwards. Everything is in the frame
// Im A >= 0; the free functions below conjugate for Im A < 0.
class AsymptoticModel {
public:
    explicit AsymptoticModel(cplx a);

    const Parameter& param() const { return p_; }
    const CriticalGraph& graph() const { return graph_; }
    const ContourSigmaA& sigma() const { return sigma_; }
    const PhiEngine& engine() const { return *engine_; }
    const Cut& cut() const { return engine_->gamma_map().cut(); }
    cplx ell() const { return ell_.value; }

    // radius of the disk around zeta_+ where f is verified injective
    double airy_radius() const { return delta_; }
    // f'(zeta_+); positive along the initial direction of Sigma_+
    cplx kappa() const { return kappa_; }
    // [3/2 phi]^(2/3), analytic in the disk; OutOfDisk outside it
    cplx conformal_f(cplx z) const;
    // ((z - zeta_-)/(z - zeta_+))^(1/4) f^(1/4), analytic in the disk
    cplx airy_prefactor(cplx z) const;

    // +1 left of gamma (oriented zeta_- to zeta_+), -1 right
    int side(cplx z) const { return cut().side_of(z); }
    double distance_to_gamma(cplx z) const { return cut().distance(z); }

    // regime of z, or nothing when z lies within `buffer` of a regime boundary, of the origin,
    // or near zeta_-.
    // band_width: distance from gamma below which the band formulas are used.
    std::optional<Regime> classify(cplx z, double band_width = 0.5, double buffer = 0.05) const;

private:
    cplx f_raw(cplx z) const;

    Parameter p_;
    CriticalGraph graph_;
    ContourSigmaA sigma_;
    std::unique_ptr<PhiEngine> engine_;
    EllResult ell_;
    cplx kappa_{0.0, 0.0};
    cplx pref_unit_{1.0, 0.0};
    double delta_ = 0;
};

// cached per parameter value (keys rounded to 1e-14); A and conj A share one model
std::shared_ptr<const AsymptoticModel> asymptotic_model(cplx a);

struct AsymptoticResult {
    Regime regime = Regime::Outer;
    LogComplex value;
    cplx beta, beta_bar;  // zeta_+ and zeta_- of a_n
};

// leading term of p_n(z) = L_n^(n a_n)(n z) in the given regime; RegimeMismatch when z is
// on the wrong side of gamma, on gamma, or (airy_plus) outside the disk
AsymptoticResult strong_asymptotic(int n, cplx a_n, cplx z, Regime regime);

struct ComparePoint {
    cplx z;
    std::optional<Regime> regime;  // empty: skipped by the buffer rule
    double rel_error = 0;          // |exact/asymptotic - 1|
};

struct RegimeStats {
    Regime regime;
    int count = 0;
    double max = 0, median = 0;
};

struct CompareTable {
    int n = 0;
    cplx a;
    std::vector<ComparePoint> points;
    std::vector<RegimeStats> stats;
};

CompareTable compare(int n, cplx a_n, const std::vector<cplx>& grid, double band_width = 0.5,
                     double buffer = 0.05);

// least-squares fit of e_n = C n^(-exponent)
struct DecayFit {
    double exponent = 0;
    double constant = 0;
};
DecayFit fit_decay(const std::vector<int>& ns, const std::vector<double>& errors);

struct ZeroSideReport {
    int n = 0;
    int plus_side = 0, minus_side = 0;
    double max_distance = 0;
    int inequality_failures = 0;  // zeros where |1 + R'| < |1 - R'| fails
    std::vector<cplx> zeros;
    std::vector<int> sides;
};

ZeroSideReport zero_side_check(int n, cplx a_n);

}  // namespace stokeslab
