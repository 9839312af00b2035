#pragma once

#include "stokeslab/common.hpp"

namespace stokeslab {

struct Crossing {
    std::size_t segment = 0;  // index i of polyline segment [p_i, p_{i+1}]
    double t_path = 0;        // parameter along the query segment, in [0,1]
    double t_seg = 0;         // parameter along the polyline segment
    cplx point;
    int side = 0;  // +1 when the query moves from the right to the left of the polyline
};

// All transversal crossings of the segment a->b with the polyline, sorted by t_path.
std::vector<Crossing> segment_crossings(cplx a, cplx b, const Polyline& curve);

// Even-odd rule; the polygon is implicitly closed.
bool inside_polygon(const Polyline& polygon, cplx z);

struct NearestPoint {
    std::size_t segment = 0;
    double t = 0;
    cplx point;
    double distance = 0;
    cplx tangent;  // unit, in the orientation of the polyline
};

NearestPoint nearest_on_polyline(const Polyline& curve, cplx z);

double distance_to_segment(cplx z, cplx a, cplx b);

double polyline_length(const Polyline& curve);

// Cumulative arclength at each vertex.
std::vector<double> cumulative_length(const Polyline& curve);

// Total change of arg(z - center) along the polyline.
double winding_angle(const Polyline& curve, cplx center = 0.0);

}  // namespace stokeslab
