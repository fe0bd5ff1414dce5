#include "incsel/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace incsel {

namespace {

// index of the last jump with time <= t, or -1
std::ptrdiff_t last_jump_before(const std::vector<Jump>& jumps, double t) {
    auto it = std::upper_bound(jumps.begin(), jumps.end(), t,
                               [](double v, const Jump& j) { return v < j.t; });
    return it - jumps.begin() - 1;
}

void require_sorted(const std::vector<Atom>& atoms, const char* who) {
    for (std::size_t i = 1; i < atoms.size(); ++i)
        if (atoms[i].t < atoms[i - 1].t)
            throw std::invalid_argument(std::string(who) + ": atoms not t-sorted");
}

} // namespace

double SelectionPath::mark_at(double t) const {
    const std::ptrdiff_t i = last_jump_before(jumps, t);
    return i < 0 ? x0 : jumps[i].mark;
}

std::uint64_t SelectionPath::len_at(double t) const {
    const std::ptrdiff_t i = last_jump_before(jumps, t);
    return i < 0 ? 0 : jumps[i].len;
}

SelectionPath select_markwise(const ControlSpec& control, const std::vector<Atom>& atoms,
                              double x0) {
    if (x0 >= 1.0 && control.kind != ControlKind::stationary &&
        control.kind != ControlKind::constant_c)
        throw std::invalid_argument("select_markwise: x0 must be < 1");
    require_sorted(atoms, "select_markwise");

    SelectionPath path;
    path.nu = control.nu;
    path.x0 = x0;
    double x = x0;
    std::uint64_t len = 0;
    for (const Atom& a : atoms) {
        if (a.x > x && a.x - x <= psi(control, a.t, x)) {
            x = a.x;
            path.jumps.push_back({a.t, x, ++len});
        }
    }
    return path;
}

SelectionPath select_knapsack(const ControlSpec& control, const std::vector<Atom>& reserve,
                              double x0) {
    require_sorted(reserve, "select_knapsack");

    SelectionPath path;
    path.nu = control.nu;
    path.x0 = x0;
    double x = x0;
    std::uint64_t len = 0;
    for (const Atom& a : reserve) {
        const double u = a.x;
        if (u > 0.0 && u <= psi(control, a.t, x)) {
            x += u;
            path.jumps.push_back({a.t, x, ++len});
        }
    }
    return path;
}

std::vector<Atom> sample_reserve(double nu, double u_max, Seed seed) {
    return sample_scatter(nu, Rect{0.0, 1.0, 0.0, u_max}, seed);
}

bool pathwise_dominates(const SelectionPath& hi, const SelectionPath& lo) {
    if (hi.x0 < lo.x0) return false;
    double xh = hi.x0, xl = lo.x0;
    std::size_t i = 0, j = 0;
    while (i < hi.jumps.size() || j < lo.jumps.size()) {
        const double th =
            i < hi.jumps.size() ? hi.jumps[i].t : std::numeric_limits<double>::infinity();
        const double tl =
            j < lo.jumps.size() ? lo.jumps[j].t : std::numeric_limits<double>::infinity();
        if (th <= tl)
            xh = hi.jumps[i++].mark;
        else
            xl = lo.jumps[j++].mark;
        if (xh < xl) return false;
    }
    return true;
}

CoupledBundle run_coupled(const std::vector<ControlSpec>& controls, double nu, Seed seed,
                          double x0) {
    if (controls.size() < 2)
        throw std::invalid_argument("run_coupled: need at least 2 controls");
    for (const ControlSpec& c : controls)
        if (c.nu != nu) throw std::invalid_argument("run_coupled: mismatched nu");

    double u_max = 0.0;
    for (const ControlSpec& c : controls) u_max = std::max(u_max, sup_window(c));
    u_max *= 1.1;

    CoupledBundle bundle;
    bundle.reserve_seed = seed;
    bundle.controls = controls;
    const std::vector<Atom> reserve = sample_reserve(nu, u_max, seed);
    bundle.atoms = reserve.size();

    const std::size_t n = controls.size();
    std::vector<double> x(n, x0);
    std::vector<std::uint64_t> len(n, 0);
    bundle.paths.assign(n, SelectionPath{});
    for (std::size_t k = 0; k < n; ++k) {
        bundle.paths[k].nu = nu;
        bundle.paths[k].x0 = x0;
    }

    std::vector<double> w(n);
    std::vector<char> took(n);
    for (const Atom& a : reserve) {
        const double u = a.x;
        if (u <= 0.0) continue;
        for (std::size_t k = 0; k < n; ++k) {
            w[k] = psi(controls[k], a.t, x[k]);
            took[k] = u <= w[k];
        }
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t l = 0; l < n; ++l)
                if (w[k] <= w[l] && took[k] && !took[l]) ++bundle.containment_violations;
        for (std::size_t k = 0; k < n; ++k)
            if (took[k]) {
                x[k] += u;
                bundle.paths[k].jumps.push_back({a.t, x[k], ++len[k]});
            }
    }
    return bundle;
}

namespace {

// majorant window: constant profile plus the calibrated upper slack, switched
// off near the right endpoint
double psi_up(double nu, const BoundConstants& b, double t) {
    if (t >= 1.0) return 0.0;
    const double base = std::sqrt(2.0 / nu);
    if (t > 1.0 - b.K / std::sqrt(nu)) return base;
    return base + b.beta_plus / (nu * (1.0 - t));
}

// minorant window: lower-slack profile capped by the distance to the
// diagonal, frozen past t = 1 - K/sqrt(nu)
double psi_down(double nu, const BoundConstants& b, double t, double x) {
    if (t > 1.0 - b.K / std::sqrt(nu)) return 0.0;
    const double profile =
        std::max(std::sqrt(2.0 / nu) - b.beta_minus / (nu * (1.0 - t)), 0.0);
    return std::min(profile, t - x);
}

} // namespace

GridSeries run_majorant(double nu, const BoundConstants& constants, Seed seed,
                        const std::vector<double>& grid) {
    if (grid.empty() || grid.front() != 0.0)
        throw std::invalid_argument("run_majorant: grid must start at 0");

    const double u_max = 1.1 * psi_up(nu, constants, 1.0 - constants.K / std::sqrt(nu));
    const std::vector<Atom> reserve = sample_reserve(nu, u_max, seed);

    GridSeries out;
    out.t = grid;
    out.labels = {"gap"};
    out.values.assign(1, std::vector<double>(grid.size(), 0.0));

    // S(t) = accepted mass - t falls linearly between jumps, so its running
    // infimum only needs refreshing just before jumps and at output times
    double accepted = 0.0;
    double inf_s = 0.0;
    std::size_t g = 0;
    for (const Atom& a : reserve) {
        while (g < grid.size() && grid[g] < a.t) {
            const double s = accepted - grid[g];
            inf_s = std::min(inf_s, s);
            out.values[0][g] = s - inf_s;
            ++g;
        }
        const double u = a.x;
        if (u > 0.0 && u <= psi_up(nu, constants, a.t)) {
            inf_s = std::min(inf_s, accepted - a.t);
            accepted += u;
        }
    }
    while (g < grid.size()) {
        const double s = accepted - grid[g];
        inf_s = std::min(inf_s, s);
        out.values[0][g] = s - inf_s;
        ++g;
    }
    return out;
}

GridSeries run_minorant(double nu, const BoundConstants& constants, Seed seed,
                        const std::vector<double>& grid) {
    if (grid.empty() || grid.front() != 0.0)
        throw std::invalid_argument("run_minorant: grid must start at 0");

    const double u_max = 1.1 * std::sqrt(2.0 / nu);
    const std::vector<Atom> reserve = sample_reserve(nu, u_max, seed);

    GridSeries out;
    out.t = grid;
    out.labels = {"gap"};
    out.values.assign(1, std::vector<double>(grid.size(), 0.0));

    double x = 0.0;
    std::size_t g = 0;
    for (const Atom& a : reserve) {
        while (g < grid.size() && grid[g] < a.t) {
            out.values[0][g] = x - grid[g];
            ++g;
        }
        const double u = a.x;
        if (u > 0.0 && u <= psi_down(nu, constants, a.t, x)) x += u;
    }
    while (g < grid.size()) {
        out.values[0][g] = x - grid[g];
        ++g;
    }
    return out;
}

SandwichAudit run_sandwich(const ControlSpec& control, const BoundConstants& constants,
                           Seed seed) {
    if (control.kind != ControlKind::self_similar)
        throw std::invalid_argument("run_sandwich: control must be self-similar");
    const double nu = control.nu;
    const double offset = constants.K / std::sqrt(nu);

    const double u_max =
        1.1 * std::max(sup_window(control),
                       psi_up(nu, constants, 1.0 - constants.K / std::sqrt(nu)));
    const std::vector<Atom> reserve = sample_reserve(nu, u_max, seed);

    SandwichAudit audit;
    audit.main.nu = nu;
    audit.min_upper_gap = std::numeric_limits<double>::infinity();
    audit.min_lower_gap = std::numeric_limits<double>::infinity();

    double x_up = offset, x = 0.0, x_down = 0.0;
    std::uint64_t len = 0;
    for (const Atom& a : reserve) {
        const double u = a.x;
        if (u <= 0.0) continue;
        x_up = std::max(x_up, a.t + offset); // drift along the barrier
        if (u <= psi_up(nu, constants, a.t)) x_up += u;
        if (u <= psi(control, a.t, x)) {
            x += u;
            audit.main.jumps.push_back({a.t, x, ++len});
        }
        if (u <= psi_down(nu, constants, a.t, x_down)) x_down += u;
        ++audit.atoms;
        audit.min_upper_gap = std::min(audit.min_upper_gap, x_up - x);
        audit.min_lower_gap = std::min(audit.min_lower_gap, x - x_down);
        if (audit.ok && (x_down > x || x > x_up)) {
            audit.ok = false;
            audit.violation_time = a.t;
        }
    }
    // the barrier keeps pushing through t = 1
    x_up = std::max(x_up, 1.0 + offset);
    audit.min_upper_gap = std::min(audit.min_upper_gap, x_up - x);
    if (audit.ok && (x_down > x || x > x_up)) {
        audit.ok = false;
        audit.violation_time = 1.0;
    }
    return audit;
}

} // namespace incsel
