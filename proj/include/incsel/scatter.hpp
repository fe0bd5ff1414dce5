#pragma once

#include <vector>

#include "incsel/rng.hpp"

namespace incsel {

// One point of a planar Poisson scatter: arrival time and mark (or reserve
// increment, for the stacked representation on [0,1] x [0, u_max]).
struct Atom {
    double t = 0.0;
    double x = 0.0;
};

struct Rect {
    double t0 = 0.0, t1 = 1.0;
    double x0 = 0.0, x1 = 1.0;

    double area() const { return (t1 - t0) * (x1 - x0); }
};

// Homogeneous Poisson scatter of intensity nu on the rectangle, sorted by
// time (count drawn first, then uniform placement). Zero-measure regions give
// an empty list.
std::vector<Atom> sample_scatter(double nu, const Rect& region, Seed seed);

} // namespace incsel
