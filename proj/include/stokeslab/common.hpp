#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace stokeslab {

using cplx = std::complex<double>;
using Polyline = std::vector<cplx>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

enum class ErrorCode {
    OnCut,
    AtBranchPoint,
    PathTooCloseToSingularity,
    DegenerateParameter,
    StepCollapse,
    MaxLengthExceeded,
    NotFound,
    GraphInconsistent,
    BoundaryCase,
    ArcThroughOrigin,
    OutOfDomain,
    ConstructionFailed,
    NegativeDensity,
    NoConvergence,
    NoDescentProgress,
    PrecisionExhausted,
    NonConvergence,
    TailNotDecaying,
    ZeroArgument,
    OutOfDisk,
    RegimeMismatch,
    Config,
};

const char* error_name(ErrorCode c);

class Error : public std::runtime_error {
public:
    Error(ErrorCode c, const std::string& what)
        : std::runtime_error(std::string(error_name(c)) + ": " + what), code_(c) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// Principal argument mapped to [0, 2*pi).
inline double arg_0_2pi(cplx z) {
    double a = std::arg(z);
    if (a < 0) a += 2 * kPi;
    return a;
}

// Logarithm with cut along the positive real axis, arg in [0, 2*pi).
inline cplx log_cut_positive(cplx z) { return {std::log(std::abs(z)), arg_0_2pi(z)}; }

// 17 significant digits, the serialization used for every complex value.
std::string format_real(double x);
std::string format_cplx(cplx z);

// "re", "im i", "re+im i" or "re-im i"; scientific notation, j for i and a '*' before i are accepted
cplx parse_complex(const std::string& text);

}  // namespace stokeslab
