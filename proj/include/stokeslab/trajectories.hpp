#pragma once

#include <array>
#include <optional>

#include "stokeslab/core.hpp"

namespace stokeslab {

enum class Kind { Horizontal, Orthogonal };

enum class TerminalType { AtZero, AtOrigin, AtInfinity, ClosedLoop };

enum class InfDir { PlusI, MinusI, PlusReal, MinusReal };

struct Terminal {
    TerminalType type = TerminalType::AtZero;
    int zero = 0;  // -1 for zeta_-, +1 for zeta_+
    double winding_angle = 0;  // total change of arg z, origin terminals
    int winding = 0;
    bool truncated = false;  // stopped by the winding cap
    InfDir direction = InfDir::PlusI;
};

struct Trajectory {
    Kind kind = Kind::Horizontal;
    Polyline points;
    std::vector<cplx> w;  // integral of R/t from the start, branch continued
    std::vector<double> s;  // arclength
    Terminal terminal;
    int start_zero = 0;  // -1, +1, or 0 for a regular start point
};

struct StopRules {
    double capture = -1;  // default 1e-4 (1 + |zeta_+ - zeta_-|)
    double r_origin = -1;  // default 1e-6 (1 + |A|)
    double r_infinity = -1;  // default 50 (1 + |A|)
    double max_winding = 20;
    double h_max = -1;  // default 0.05 (1 + |zeta_+ - zeta_-|)
    double tol = 1e-10;
    std::size_t max_steps = 400000;

    StopRules resolved(const Parameter& p) const;
};

std::string terminal_name(const Terminal& t);

std::array<cplx, 3> emanating_directions(const Parameter& p, int zero, Kind kind);

Trajectory trace(const Parameter& p, cplx start, cplx dir, Kind kind, const StopRules& rules = {});

// Level drift along a trace: max |Re w - Re w_0| (horizontal) or |Im w - Im w_0|.
double level_drift(const Trajectory& t);

enum class HomotopyClass { FA, Complement };

HomotopyClass homotopy_class(const Polyline& arc, const Parameter& p);

// All horizontal traces from zeta_- that end at zeta_+.
std::vector<Trajectory> find_short_trajectories(const Parameter& p, const StopRules& rules = {});
// The one in class F_A with w re-continued on the "+" side, so w.back() = 2 pi i.
Trajectory find_short_trajectory(const Parameter& p, const StopRules& rules = {});

// (1/2)(int_+ - int_-) of R/t along gamma, each side integrated on an offset copy of gamma.
cplx two_sided_period(const Parameter& p, const Polyline& gamma);
// int R_+/t along gamma.
cplx one_sided_period(const Parameter& p, const Polyline& gamma);

enum class Face { OmegaPlus, OmegaMinus1, OmegaMinus2 };

const char* face_name(Face f);

struct CriticalGraph {
    Parameter p;
    Trajectory gamma, sigma0, sigma_minus, sigma_up, sigma_down;
    StopRules rules;

    Face face_of(cplx z) const;
    std::vector<Terminal> terminals() const;
    // true when gamma meets [zeta_-, zeta_+] only inside the capture disks
    bool convex_check() const;

    // closed polygons east of sigma_- + gamma + sigma_up and of sigma_down + sigma_up
    Polyline east1, east2;
};

CriticalGraph build_critical_graph(const Parameter& p, const StopRules& rules = {});

struct OrthogonalGraph {
    std::vector<Trajectory> arcs;  // three from each zero
    int origin_count = 0;
    int closed_loops = 0;
};

// All six orthogonal critical arcs, including the boundary cases.
OrthogonalGraph trace_orthogonal_arcs(const Parameter& p, const StopRules& rules = {});
// Generic case only: throws BoundaryCase if Re A = 0 or Re(A+1) = 0.
OrthogonalGraph orthogonal_critical_graph(const Parameter& p, const StopRules& rules = {});

}  // namespace stokeslab
