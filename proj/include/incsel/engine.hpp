#pragma once

#include <cstdint>
#include <vector>

#include "incsel/control.hpp"
#include "incsel/grid.hpp"
#include "incsel/rng.hpp"
#include "incsel/scatter.hpp"

namespace incsel {

struct Jump {
    double t = 0.0;          // selection time
    double mark = 0.0;       // running maximum right after the jump
    std::uint64_t len = 0;   // selection count right after the jump
};

// Cadlag pair (X, L): X jumps to `mark`, L to `len` at each jump time.
struct SelectionPath {
    double nu = 1.0;
    double x0 = 0.0;
    std::vector<Jump> jumps;

    double mark_at(double t) const;        // X(t), right-continuous
    std::uint64_t len_at(double t) const;  // L(t), right-continuous
    double final_mark() const { return jumps.empty() ? x0 : jumps.back().mark; }
    std::uint64_t final_len() const { return jumps.empty() ? 0 : jumps.back().len; }
};

// One pass of the record rule over a t-sorted mark scatter: the atom (t, x')
// is selected iff X(t-) < x' <= X(t-) + psi(t, X(t-)).
SelectionPath select_markwise(const ControlSpec& control, const std::vector<Atom>& atoms,
                              double x0 = 0.0);

// Same dynamics driven by the increment reserve: at reserve atom (t, u) the
// increment is taken iff u <= psi(t, X(t-)).
SelectionPath select_knapsack(const ControlSpec& control, const std::vector<Atom>& reserve,
                              double x0 = 0.0);

// Increment reserve on [0,1] x [0, u_max] (atoms above every reachable window
// are never accepted, so the truncation is harmless).
std::vector<Atom> sample_reserve(double nu, double u_max, Seed seed);

// True when hi's running maximum stays >= lo's at every event time of either
// path (both start at their own x0).
bool pathwise_dominates(const SelectionPath& hi, const SelectionPath& lo);

struct CoupledBundle {
    Seed reserve_seed;
    std::vector<ControlSpec> controls;
    std::vector<SelectionPath> paths;
    std::size_t atoms = 0;
    // per-atom audit: a process whose window is pointwise smaller at the atom
    // accepted while the larger-window process refused
    std::size_t containment_violations = 0;
};

// Runs every control over one shared reserve scatter.
CoupledBundle run_coupled(const std::vector<ControlSpec>& controls, double nu, Seed seed,
                          double x0 = 0.0);

// Majorant: constant window sqrt(2/nu) + beta_plus/(nu(1-t)) switched off
// after t = 1 - K/sqrt(nu), reflected at the line x = t + K/sqrt(nu).
// Returns the gap above the line, S(t) - inf S = Xup(t) - t - K/sqrt(nu),
// which starts and reflects at 0.
GridSeries run_majorant(double nu, const BoundConstants& constants, Seed seed,
                        const std::vector<double>& grid);

// Minorant: window (sqrt(2/nu) - beta_minus/(nu(1-t)))+ capped by t - x,
// frozen after t = 1 - K/sqrt(nu). Returns the gap Xdown(t) - t <= 0.
GridSeries run_minorant(double nu, const BoundConstants& constants, Seed seed,
                        const std::vector<double>& grid);

struct SandwichAudit {
    bool ok = true;
    double violation_time = -1.0; // first event time where the order broke
    std::size_t atoms = 0;
    double min_upper_gap = 0.0;   // min over events of Xup - X
    double min_lower_gap = 0.0;   // min over events of X - Xdown
    SelectionPath main;           // the sandwiched control path
};

// Evolves Xdown <= X <= Xup on one shared reserve and checks the order at
// every atom; the main control must be self-similar (the squeeze that powers
// the sandwich is calibrated for that family).
SandwichAudit run_sandwich(const ControlSpec& control, const BoundConstants& constants,
                           Seed seed);

} // namespace incsel
