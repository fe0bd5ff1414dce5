#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "incsel/control.hpp"
#include "incsel/engine.hpp"
#include "incsel/grid.hpp"
#include "incsel/rng.hpp"
#include "incsel/stats.hpp"

namespace incsel {

// Pointwise ensemble moments of the selection pair. p_hat and q_hat estimate
// the running means of X(t) and L(t)/sqrt(2 nu); var_x, var_l and cov_xl are
// the raw second moments of X(t) and L(t). With a single replicate the means
// are still reported but every dispersion column is NaN and se_available is
// false; audits that need standard errors reject such reports.
struct MomentReport {
    double nu = 1.0;
    std::size_t reps = 0;
    bool se_available = false;
    std::vector<double> grid;
    std::vector<double> p_hat, q_hat;
    std::vector<double> var_x, var_l, cov_xl;
    std::vector<double> se_p, se_q, se_var_x, se_var_l, se_cov_xl;
};

MomentReport estimate_moments(const std::vector<SelectionPath>& paths,
                              const std::vector<double>& grid);

// One audited bound. Margins are oriented so that a nonnegative value
// satisfies the bound regardless of its direction (slack = bound minus
// observation for upper bounds, observation minus bound for lower bounds);
// an entry is flagged as a violation when margin < -3 se. Audits over a
// restricted time range carry the sub-grid they were evaluated on.
struct BoundAuditResult {
    std::string bound_name;
    std::vector<double> grid;
    std::vector<double> margin;
    std::vector<double> se;
    std::vector<std::size_t> violations;
    // Reported by the length lower bound, whose additive constant is only
    // known to exist: the smallest shift making the bound hold on its grid.
    double fitted_constant = std::numeric_limits<double>::quiet_NaN();
};

// Strategy-free moment inequalities: "pq" (p - t >= 2(q - t)), the two
// Cauchy-Schwarz consequences "pq1" and "pq2", and the terminal-value forms
// "pq3-p", "pq3-q" (which presume a feasible strategy so that q(1) < 1).
std::vector<BoundAuditResult> audit_general_inequalities(const MomentReport& report);

// Squeeze-constant bounds for self-similar controls: "p-up", "p-down2" (on
// t <= 1 - beta_minus/(2 sqrt(nu))), "p-down3", "q-up", and "l-down" (on
// t <= 1 - 1/sqrt(nu), with the additive constant fitted, not asserted).
std::vector<BoundAuditResult> audit_pq_bounds(const MomentReport& report,
                                              const BoundConstants& constants);

// Solution operator of the comparison inequality
//   f(t) <= -int_0^t f(s) (1/(1-s) + a/(1-s)^2) ds + int_0^t g(s) ds:
//   f(t) = (1-t) e^{-a/(1-t)} int_0^t e^{a/(1-s)} g(s)/(1-s) ds.
// g is sampled on the grid and interpolated linearly between knots; the
// integral is evaluated by adaptive quadrature. A grid point at t = 1 is
// excluded from the output with a warning on stderr. Returns component "f".
GridSeries gronwall_bound(const std::vector<double>& grid,
                          const std::vector<double>& g, double a);

// G(b, t) = 1 + b - t - (1 + b)(1 - t) exp(-bt/(1-t)), extended to t = 1 by
// its limit (b for b >= 0, -infinity for b < 0).
double g_function(double b, double t);

// max over t in [0,1) of (2t - 3t^2) / (2(1-t)), located by a lattice scan
// with local refinement; equals 2 - sqrt(3).
double c_plus_threshold();

struct RemainderScan {
    std::vector<double> nus;
    std::vector<double> remainders; // E L(1) - sqrt(2 nu) + (1/12) log nu
    std::vector<double> ses;
    double max_pairwise_diff = 0.0;
};

// Requires at least three intensities spanning at least two decades.
RemainderScan remainder_scan(const std::vector<double>& nus,
                             const std::vector<double>& mean_l1,
                             const std::vector<double>& ses);

struct CovPair {
    double s = 0.0, t = 0.0; // grid points actually used
    std::string component_s, component_t;
    double cov = 0.0;
    double se = 0.0; // leave-one-replicate-out jackknife
    std::size_t reps = 0;
};

// Cross-covariance between two labelled components of a replicated series
// ensemble. Off-grid times snap to the nearest grid point with a warning.
CovPair empirical_cov(const std::vector<GridSeries>& ensemble, double s, double t,
                      const std::string& component_s,
                      const std::string& component_t);

// Draws of 2^{-1/4} min(xi_1/sqrt(3), xi_2) with xi_i standard normal.
std::vector<double> sample_min_normal_limit(std::size_t n, Seed seed);

// Mean of the same law by adaptive quadrature over the min density.
double min_normal_mean_quadrature();

// Two-sample KS of the terminal normalized length against direct draws from
// the min-of-normals law. Paths must share one intensity.
KsResult feasible_stationary_limit_check(const std::vector<SelectionPath>& paths,
                                         std::size_t reps_limit, Seed seed);

} // namespace incsel
