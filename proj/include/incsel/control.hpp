#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace incsel {

// Window-profile family for the self-similar control: the window is
// (1-x) * delta(m) with m = nu (1-t) (1-x).
enum class DeltaKind { stationary, optimal, beta_perturbed };

struct DeltaSpec {
    DeltaKind kind = DeltaKind::stationary;
    double beta = 0.0; // beta_perturbed only
};

// Clipped evaluation on [0,1]. At m = 0 every profile evaluates to 1 (the
// clip rule at the boundary); the value there is inert because the window
// carries a factor 1-x which vanishes whenever m can reach 0 at fixed nu.
double delta_eval(const DeltaSpec& spec, double m);

// m-thresholds where the clip in delta_eval switches on or off (ascending,
// positive). Useful as integration breakpoints.
std::vector<double> delta_breakpoints(const DeltaSpec& spec);

enum class ControlKind { greedy, stationary, feasible_stationary, self_similar, constant_c };

struct ControlSpec {
    ControlKind kind = ControlKind::greedy;
    double nu = 1.0;
    DeltaSpec delta{}; // self_similar only
    double c = 1.0;    // constant_c only
};

// Acceptance-window width at (t, x). Zero at t >= 1 for every control and at
// x >= 1 for the feasible controls; the deliberately infeasible controls
// (stationary, constant_c) keep their constant window at every mark so that
// the chain they drive lives on a halfplane rather than [0,1].
double psi(const ControlSpec& control, double t, double x);

struct FeasibilityReport {
    bool feasible = true;
    double worst_violation = 0.0;
    double t = 0.0, x = 0.0; // lattice point of the worst violation
};

// Scans a grid_density x grid_density lattice on [0,1)^2 for violations of
// the feasibility ceiling psi <= 1-x.
FeasibilityReport feasibility_audit(const ControlSpec& control, int grid_density = 512);

struct BoundConstants {
    double beta_minus = 0.0; // lower squeeze slack
    double beta_plus = 0.0;  // upper squeeze slack
    double beta = 1.0;       // max(beta_minus, beta_plus, 1) * 1.05
    double K = 10.0;         // 10 * max(beta, 1)
};

struct CalibrationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerically smallest slacks such that, on the lattice restricted to
// m = nu (1-t)(1-x) >= 1,
//   sqrt(2(1-x)/(nu(1-t))) - beta_minus/(nu(1-t))
//     <= psi(t,x) <= sqrt(2(1-x)/(nu(1-t))) + beta_plus/(nu(1-t)).
// Throws CalibrationFailure when the scaled deviation keeps growing across
// m-decades, i.e. the window does not conform to the sqrt(2/m) profile.
BoundConstants calibrate_beta(const ControlSpec& control, int grid_density = 512);
BoundConstants calibrate_beta(double nu, const std::function<double(double)>& delta_of_m,
                              int grid_density = 512);

// String tags: "greedy", "stationary", "feasible-stationary",
// "self-similar:stationary", "self-similar:optimal", "self-similar:beta=<v>",
// "constant:<v>".
ControlSpec parse_control_tag(const std::string& tag, double nu);
std::string control_tag(const ControlSpec& control);

// Exact supremum of the window over the whole domain (used to truncate the
// increment reserve losslessly).
double sup_window(const ControlSpec& control);

// Mark ceiling for chain simulation: 1 for feasible controls; for the
// infeasible constant-window controls, a drift + 14-sigma allowance above the
// start so that truncating the scatter there is harmless.
double mark_height(const ControlSpec& control, double x0);

} // namespace incsel
