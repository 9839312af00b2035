#pragma once

#include <vector>

#include "stokeslab/equilibrium.hpp"
#include "stokeslab/logcomplex.hpp"

namespace stokeslab {

struct LaguerreContext {
    int n = 0;
    cplx alpha{0.0, 0.0};
    int precision_digits = 0;  // 0: default policy (see default_precision)
};

// 15 digits for n <= 15, else 30; STOKESLAB_PRECISION overrides.
int default_precision(int n);

struct EvalInfo {
    int digits = 0;          // working precision that was accepted
    double mismatch = 0;     // relative gap between explicit sum and recurrence
    double cancellation = 0; // log10 of sum |terms| / |value|
};

// L_n^(alpha)(z) by the explicit sum, checked against the three-term recurrence.
// Precision escalates until the two agree and the cancellation is covered.
LogComplex laguerre_eval(const LaguerreContext& ctx, cplx z, EvalInfo* info = nullptr);

// p_n(z) = L_n^(n a_n)(n z); with monic = true the monic P_n = (-1)^n n!/n^n p_n.
LogComplex rescaled_eval(int n, cplx a_n, cplx z, bool monic = false);
// log of (-n)^n / n!
LogComplex leading_coefficient(int n);

// coefficients of z^k, k = 0..n, in double precision
std::vector<cplx> laguerre_coefficients(int n, cplx alpha);

struct ZeroSet {
    std::vector<cplx> roots;
    std::vector<double> residuals;  // log10 |p(root)|
    double lead_log10 = 0;          // log10 |leading coefficient|
    int iterations = 0;
    int digits = 0;
    int zeros_at_origin = 0;
};

// zeros of L_n^(alpha); for alpha = -k in {-1..-n} the k-fold zero at the origin
// comes from the reduction formula
ZeroSet zeros(const LaguerreContext& ctx);
// zeros of p_n(z) = L_n^(n a_n)(n z)
ZeroSet rescaled_zeros(int n, cplx a_n, int precision_digits = 0);

struct OrthogonalityResult {
    LogComplex value;
    double peak_log = 0;   // log |integrand| at its maximum on the contour
    int evaluations = 0;
};

// int_Sigma z^k L_n^(alpha)(z) z^alpha e^{-z} dz along n * Sigma_A with z^alpha on arg in [0, 2pi)
OrthogonalityResult orthogonality_integral(int n, int k, cplx alpha, const ContourSigmaA& sigma);
// (-1)^(n+1) 2i e^(pi i alpha) sin(pi alpha) Gamma(alpha + n + 1)
LogComplex orthogonality_closed_form(int n, cplx alpha);

// log Gamma(z), up to a multiple of 2 pi i
cplx log_gamma(cplx z);

// m_k = (1/n) sum root^k for k = 0..K
std::vector<cplx> zero_moments(const ZeroSet& zs, int K);

// B_n^(alpha)(z) = z^n L_n^(-2n-alpha+1)(2/z)
LogComplex bessel_eval(int n, cplx alpha, cplx z);

}  // namespace stokeslab
