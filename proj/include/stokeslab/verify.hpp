#pragma once

#include <string>
#include <vector>

#include "stokeslab/common.hpp"

namespace stokeslab {

// Thresholds of the verification suite. Every field must be positive.
struct Tolerances {
    double period = 1e-8;
    double mass = 1e-8;
    double stdev = 1e-6;         // relative to 1 + |ell|
    double sigma_gap = 1e-6;
    double s_mismatch = 1e-4;
    double oracle_moment = 1e-2;
    double oracle_off_gamma = 1e-2;
    double orthogonality = 1e-8;
    double moment_ratio = 0.7;
    double decay_low = 0.3, decay_high = 0.7;
    double airy = 0.05;
    double strip = 1e-6;
    double figure_distance = 0.15;

    // Config error naming the first field that is not a positive finite number
    void validate() const;
};

struct CheckResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0;
    double budget = 0;  // seconds allowed
    std::string detail;
    std::vector<std::pair<std::string, double>> values;
};

struct VerifyOptions {
    cplx a{-3, 2};
    Tolerances tol;
    int oracle_nodes = 400;
    int samples_per_face = 200;
    int measure_nodes = 256;
    bool enforce_budget = true;
};

// criterion ids 1..11, in order
std::vector<int> all_checks();
// the fast subset run by `verify --quick`
std::vector<int> quick_checks();

CheckResult run_check(int id, const VerifyOptions& opt);

CheckResult check_period(const VerifyOptions& opt);
CheckResult check_topology(const VerifyOptions& opt);
CheckResult check_equilibrium_conditions(const VerifyOptions& opt);
CheckResult check_oracle(const VerifyOptions& opt);
CheckResult check_orthogonality(const VerifyOptions& opt);
CheckResult check_weak_asymptotics(const VerifyOptions& opt);
CheckResult check_strong_decay(const VerifyOptions& opt);
CheckResult check_airy(const VerifyOptions& opt);
CheckResult check_zero_sides(const VerifyOptions& opt);
CheckResult check_conformal(const VerifyOptions& opt);
CheckResult check_figure(const VerifyOptions& opt);

// Outer-regime test points: dist(z, gamma) >= 0.5, away from regime boundaries.
std::vector<cplx> outer_points(cplx a, int count);
// two points at distance d from gamma on each side (t = 0.3, 0.6), "+" side first
std::vector<cplx> band_points(cplx a, double d);

}  // namespace stokeslab
