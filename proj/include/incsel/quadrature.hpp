#pragma once

#include <functional>
#include <vector>

namespace incsel {

// Adaptive Gauss-Kronrod (G7,K15) with bisection until the local error
// estimate is below the absolute tolerance share of the interval.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-9);

// Same, but the interval is pre-split at the given interior breakpoints
// (useful when the integrand has known kinks).
double integrate_split(const std::function<double(double)>& f, double a, double b,
                       std::vector<double> breakpoints, double abs_tol = 1e-9);

} // namespace incsel
