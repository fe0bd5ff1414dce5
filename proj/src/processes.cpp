#include "incsel/processes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "incsel/quadrature.hpp"

namespace incsel {
namespace {

constexpr double kWindowTol = 1e-9;

void validate_grid(const std::vector<double>& grid) {
    if (grid.empty() || grid.front() != 0.0)
        throw std::invalid_argument("grid must start at 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1])
            throw std::invalid_argument("grid must be strictly increasing");
    if (grid.back() > 1.0) throw std::invalid_argument("grid must end at or before 1");
}

// compensator increments over [a,b] while the running maximum sits at x
struct PieceIntegrals {
    double cx = 0.0;
    double cl = 0.0;
};

PieceIntegrals integrate_piece(const ControlSpec& control, double a, double b, double x,
                               double tol) {
    PieceIntegrals out;
    if (b <= a) return out;
    const double nu = control.nu;
    if (control.kind != ControlKind::self_similar) {
        // the window does not depend on s between jumps
        const double p = psi(control, 0.5 * (a + b), x);
        out.cx = 0.5 * nu * p * p * (b - a);
        out.cl = nu * p * (b - a);
        return out;
    }
    if (x >= 1.0) return out;
    // map the clip thresholds of delta onto s via m(s) = nu (1-s)(1-x)
    std::vector<double> breaks;
    for (double m : delta_breakpoints(control.delta)) {
        const double s = 1.0 - m / (nu * (1.0 - x));
        if (s > a && s < b) breaks.push_back(s);
    }
    std::sort(breaks.begin(), breaks.end());
    out.cx = integrate_split(
        [&](double s) {
            const double p = psi(control, s, x);
            return 0.5 * nu * p * p;
        },
        a, b, breaks, tol);
    out.cl = integrate_split([&](double s) { return nu * psi(control, s, x); }, a, b,
                             breaks, tol);
    return out;
}

} // namespace

double fhat(double y) {
    if (y < 0.0) throw std::invalid_argument("fhat: negative argument");
    return std::sqrt(2.0 * y) - std::log1p(y) / 12.0;
}

GridSeries normalize(const SelectionPath& path, const std::vector<double>& grid) {
    validate_grid(grid);
    const double root4 = std::pow(path.nu, 0.25);
    const double scale_l = std::sqrt(2.0 * path.nu);
    GridSeries out;
    out.t = grid;
    out.labels = {"Xtilde", "Ltilde"};
    out.values.assign(2, std::vector<double>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        out.values[0][i] = root4 * (path.mark_at(t) - t);
        out.values[1][i] = root4 * (static_cast<double>(path.len_at(t)) / scale_l - t);
    }
    return out;
}

GridSeries compensators(const SelectionPath& path, const ControlSpec& control,
                        const std::vector<double>& grid, double tol) {
    validate_grid(grid);
    if (control.nu != path.nu)
        throw std::invalid_argument("compensators: control intensity differs from path");

    double x = path.x0;
    for (const Jump& j : path.jumps) {
        const double u = j.mark - x;
        if (u > psi(control, j.t, x) + kWindowTol)
            throw std::invalid_argument("compensators: recorded jump exceeds the window");
        x = j.mark;
    }

    GridSeries out;
    out.t = grid;
    out.labels = {"CX", "CL"};
    out.values.assign(2, std::vector<double>(grid.size()));

    double cx = 0.0, cl = 0.0;
    double prev = 0.0;
    x = path.x0;
    std::size_t ji = 0;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const double gt = grid[g];
        while (ji < path.jumps.size() && path.jumps[ji].t <= gt) {
            const PieceIntegrals inc =
                integrate_piece(control, prev, path.jumps[ji].t, x, tol);
            cx += inc.cx;
            cl += inc.cl;
            prev = path.jumps[ji].t;
            x = path.jumps[ji].mark;
            ++ji;
        }
        const PieceIntegrals inc = integrate_piece(control, prev, gt, x, tol);
        cx += inc.cx;
        cl += inc.cl;
        prev = gt;
        out.values[0][g] = cx;
        out.values[1][g] = cl;
    }
    return out;
}

GridSeries martingale_m(const SelectionPath& path, const std::vector<double>& grid) {
    validate_grid(grid);
    const double offset = fhat(path.nu);
    GridSeries out;
    out.t = grid;
    out.labels = {"Mhat"};
    out.values.assign(1, std::vector<double>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        const double arg = std::max(0.0, path.nu * (1.0 - t) * (1.0 - path.mark_at(t)));
        out.values[0][i] = static_cast<double>(path.len_at(t)) + fhat(arg) - offset;
    }
    return out;
}

GridSeries z_process(const SelectionPath& path, const std::vector<double>& grid) {
    validate_grid(grid);
    const double root4 = std::pow(path.nu, 0.25);
    const double scale = std::sqrt(2.0 * path.nu);
    GridSeries out;
    out.t = grid;
    out.labels = {"Z", "Ztilde", "Zcentred"};
    out.values.assign(3, std::vector<double>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        const double z =
            std::sqrt(std::max(0.0, path.nu * (1.0 - t) * (1.0 - path.mark_at(t))));
        out.values[0][i] = z;
        out.values[1][i] = root4 * (z / scale - (1.0 - t));
        out.values[2][i] = root4 * (z / std::sqrt(path.nu) - (1.0 - t));
    }
    return out;
}

GridSeries derived_processes(const SelectionPath& path, const ControlSpec& control,
                             const std::vector<double>& grid, double tol) {
    const GridSeries norm = normalize(path, grid);
    const GridSeries comp = compensators(path, control, grid, tol);
    const GridSeries mart = martingale_m(path, grid);
    const double root4 = std::pow(path.nu, 0.25);
    const double scale_l = std::sqrt(2.0 * path.nu);

    GridSeries out;
    out.t = grid;
    out.labels = {"cx_norm", "cl_norm", "m_norm", "two_l_minus_x"};
    out.values.assign(4, std::vector<double>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        out.values[0][i] = root4 * (comp.values[0][i] - t);
        out.values[1][i] = 2.0 * root4 * (comp.values[1][i] / scale_l - t);
        out.values[2][i] = std::sqrt(2.0) / root4 * mart.values[0][i];
        out.values[3][i] = 2.0 * norm.values[1][i] - norm.values[0][i];
    }
    return out;
}

} // namespace incsel
