#pragma once

#include <vector>

#include "incsel/control.hpp"
#include "incsel/engine.hpp"
#include "incsel/grid.hpp"

namespace incsel {

// concave stand-in for the optimal value function: sqrt(2y) - log(1+y)/12
double fhat(double y);

struct ValueFunctionHat {
    double operator()(double y) const { return fhat(y); }
};

// default evaluation grid: 101 equispaced points on [0,1]
inline std::vector<double> default_grid() { return uniform_grid(101); }

// centred and scaled running maximum and length:
//   Xtilde(t) = nu^{1/4} (X(t) - t)
//   Ltilde(t) = nu^{1/4} (L(t)/sqrt(2 nu) - t)
GridSeries normalize(const SelectionPath& path, const std::vector<double>& grid);

// predictable compensators
//   CX(t) = (nu/2) int_0^t psi(s, X(s))^2 ds
//   CL(t) = nu int_0^t psi(s, X(s)) ds
// integrated piecewise between jumps (closed form when the window does not
// depend on s, adaptive quadrature with clip breakpoints otherwise). Throws
// std::invalid_argument if a recorded jump exceeds the control's window by
// more than 1e-9, or if the control's intensity disagrees with the path's.
GridSeries compensators(const SelectionPath& path, const ControlSpec& control,
                        const std::vector<double>& grid, double tol = 1e-9);

// value-function martingale Mhat(t) = L(t) + fhat(nu(1-t)(1-X(t))) - fhat(nu)
GridSeries martingale_m(const SelectionPath& path, const std::vector<double>& grid);

// square-root process Z(t) = sqrt(nu(1-t)(1-X(t))) (argument clamped at 0),
// the display normalization Ztilde(t) = nu^{1/4} (Z(t)/sqrt(2 nu) - (1-t))
// (which keeps a deterministic offset nu^{1/4}(1-t)(1/sqrt(2)-1)), and the
// centred normalization Zcentred(t) = nu^{1/4} (Z(t)/sqrt(nu) - (1-t)),
// the one that converges to -Y1/2
GridSeries z_process(const SelectionPath& path, const std::vector<double>& grid);

// the four normalized series whose terminal laws coincide:
//   cx_norm        = nu^{1/4} (CX(t) - t)
//   cl_norm        = 2 nu^{1/4} (CL(t)/sqrt(2 nu) - t)
//   m_norm         = sqrt(2) nu^{-1/4} Mhat(t)
//   two_l_minus_x  = 2 Ltilde(t) - Xtilde(t)
GridSeries derived_processes(const SelectionPath& path, const ControlSpec& control,
                             const std::vector<double>& grid, double tol = 1e-9);

} // namespace incsel
