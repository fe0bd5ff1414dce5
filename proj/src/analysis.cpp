#include "incsel/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "incsel/quadrature.hpp"

namespace incsel {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::vector<std::size_t> flag_violations(const std::vector<double>& margin,
                                         const std::vector<double>& se) {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < margin.size(); ++k)
        if (margin[k] < -3.0 * se[k]) out.push_back(k);
    return out;
}

BoundAuditResult make_audit(std::string name, std::vector<double> grid,
                            std::vector<double> margin, std::vector<double> se) {
    BoundAuditResult r;
    r.bound_name = std::move(name);
    r.grid = std::move(grid);
    r.margin = std::move(margin);
    r.se = std::move(se);
    r.violations = flag_violations(r.margin, r.se);
    return r;
}

void require_ses(const MomentReport& report, const char* who) {
    if (!report.se_available || report.reps < 2)
        throw std::invalid_argument(std::string(who) + ": need >= 2 replicates");
    if (report.grid.size() != report.p_hat.size())
        throw std::invalid_argument(std::string(who) + ": malformed report");
}

} // namespace

MomentReport estimate_moments(const std::vector<SelectionPath>& paths,
                              const std::vector<double>& grid) {
    if (paths.empty())
        throw std::invalid_argument("estimate_moments: empty ensemble");
    if (grid.empty())
        throw std::invalid_argument("estimate_moments: empty grid");
    const double nu = paths.front().nu;
    for (const SelectionPath& p : paths)
        if (p.nu != nu)
            throw std::invalid_argument("estimate_moments: mixed intensities");

    MomentReport rep;
    rep.nu = nu;
    rep.reps = paths.size();
    rep.se_available = paths.size() >= 2;
    rep.grid = grid;

    const std::size_t m = grid.size();
    const std::size_t n = paths.size();
    const double s2n = std::sqrt(2.0 * nu);
    auto fill = [m](std::vector<double>& v, double value) { v.assign(m, value); };
    fill(rep.p_hat, 0.0);
    fill(rep.q_hat, 0.0);
    fill(rep.var_x, kNan);
    fill(rep.var_l, kNan);
    fill(rep.cov_xl, kNan);
    fill(rep.se_p, kNan);
    fill(rep.se_q, kNan);
    fill(rep.se_var_x, kNan);
    fill(rep.se_var_l, kNan);
    fill(rep.se_cov_xl, kNan);

    std::vector<double> xs(n), ls(n);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = paths[i].mark_at(grid[k]);
            ls[i] = static_cast<double>(paths[i].len_at(grid[k]));
        }
        const Moments mx = moments(xs);
        const Moments ml = moments(ls);
        rep.p_hat[k] = mx.mean;
        rep.q_hat[k] = ml.mean / s2n;
        if (!rep.se_available) continue;
        rep.var_x[k] = mx.var;
        rep.var_l[k] = ml.var;
        rep.cov_xl[k] = covariance(xs, ls);
        rep.se_p[k] = mx.se_mean;
        rep.se_q[k] = ml.se_mean / s2n;
        rep.se_var_x[k] = mx.se_var;
        rep.se_var_l[k] = ml.se_var;
        rep.se_cov_xl[k] = jackknife_cov_se(xs, ls);
    }
    return rep;
}

std::vector<BoundAuditResult> audit_general_inequalities(const MomentReport& report) {
    require_ses(report, "audit_general_inequalities");
    const std::size_t m = report.grid.size();
    const double n = static_cast<double>(report.reps);
    const double s2n = std::sqrt(2.0 * report.nu);

    std::vector<double> pq_m(m), pq_se(m), pq1_m(m), pq1_se(m), pq2_m(m), pq2_se(m);
    std::vector<double> p3_m(m), p3_se(m), q3_m(m), q3_se(m);
    const double q_end = report.q_hat.back();
    const double se_q_end = report.se_q.back();
    for (std::size_t k = 0; k < m; ++k) {
        const double t = report.grid[k];
        const double p = report.p_hat[k];
        const double q = report.q_hat[k];
        const double var_p = report.var_x[k] / n;
        const double var_q = report.var_l[k] / (2.0 * report.nu * n);
        const double cov_pq = report.cov_xl[k] / (s2n * n);

        // p - t >= 2 (q - t), with the combination's variance from the
        // per-replicate law of X - 2 L / sqrt(2 nu)
        pq_m[k] = p - 2.0 * q + t;
        const double var_comb = report.var_x[k] + 2.0 * report.var_l[k] / report.nu -
                                4.0 * report.cov_xl[k] / s2n;
        pq_se[k] = std::sqrt(std::max(0.0, var_comb) / n);

        // Cauchy-Schwarz: (p-t)^2 <= (t+2q+p)(t-2q+p), i.e. t p >= q^2
        pq1_m[k] = 4.0 * (t * p - q * q);
        pq1_se[k] = std::sqrt(std::max(
            0.0, 16.0 * t * t * var_p + 64.0 * q * q * var_q - 64.0 * t * q * cov_pq));

        // (q-t)^2 <= t (t - 2q + p)
        pq2_m[k] = t * (t - 2.0 * q + p) - (q - t) * (q - t);
        const double dq2 = -2.0 * q;
        pq2_se[k] = std::sqrt(std::max(
            0.0, t * t * var_p + dq2 * dq2 * var_q + 2.0 * t * dq2 * cov_pq));

        // terminal forms; the cross-time covariance with q(1) is not recorded,
        // so the delta-method terms are combined by the triangle inequality
        p3_m[k] = 8.0 * (1.0 - q_end) - (p - t) * (p - t);
        p3_se[k] = 2.0 * std::abs(p - t) * report.se_p[k] + 8.0 * se_q_end;
        q3_m[k] = 2.0 * (1.0 - q_end) - (q - t) * (q - t);
        q3_se[k] = 2.0 * std::abs(q - t) * report.se_q[k] + 2.0 * se_q_end;
    }

    std::vector<BoundAuditResult> out;
    out.push_back(make_audit("pq", report.grid, std::move(pq_m), std::move(pq_se)));
    out.push_back(make_audit("pq1", report.grid, std::move(pq1_m), std::move(pq1_se)));
    out.push_back(make_audit("pq2", report.grid, std::move(pq2_m), std::move(pq2_se)));
    out.push_back(make_audit("pq3-p", report.grid, std::move(p3_m), std::move(p3_se)));
    out.push_back(make_audit("pq3-q", report.grid, std::move(q3_m), std::move(q3_se)));
    return out;
}

std::vector<BoundAuditResult> audit_pq_bounds(const MomentReport& report,
                                              const BoundConstants& constants) {
    require_ses(report, "audit_pq_bounds");
    const std::size_t m = report.grid.size();
    const double nu = report.nu;
    const double rt = std::sqrt(nu);
    const double s2n = std::sqrt(2.0 * nu);
    const double bp = constants.beta_plus;
    const double bm = constants.beta_minus;
    static const double c_plus = c_plus_threshold();

    std::vector<double> up_m(m), up_se(m), d3_m(m), d3_se(m), qu_m(m), qu_se(m);
    std::vector<double> d2_t, d2_m, d2_se, ld_t, ld_def, ld_se;
    for (std::size_t k = 0; k < m; ++k) {
        const double t = report.grid[k];
        const double p = report.p_hat[k];
        const double q = report.q_hat[k];

        up_m[k] = bp * std::sqrt(2.0) * t / rt + c_plus * bp * bp / (2.0 * nu) - (p - t);
        up_se[k] = report.se_p[k];
        d3_m[k] = (p - t) + 3.0 * bm / rt;
        d3_se[k] = report.se_p[k];
        qu_m[k] = bp * t / s2n - (q - t);
        qu_se[k] = report.se_q[k];

        if (t <= 1.0 - bm / (2.0 * rt)) {
            d2_t.push_back(t);
            const double lb = -bm * std::sqrt(2.0) * t / rt - bm * bm / (2.0 * nu * (1.0 - t));
            d2_m.push_back((p - t) - lb);
            d2_se.push_back(report.se_p[k]);
        }
        if (t <= 1.0 - 1.0 / rt) {
            ld_t.push_back(t);
            const double base = s2n * t + std::log1p(-t) / 6.0 - 3.0 * bm / std::sqrt(2.0);
            ld_def.push_back(base - q * s2n); // positive where the raw bound fails
            ld_se.push_back(report.se_q[k] * s2n);
        }
    }

    std::vector<BoundAuditResult> out;
    out.push_back(make_audit("p-up", report.grid, std::move(up_m), std::move(up_se)));
    out.push_back(make_audit("p-down2", std::move(d2_t), std::move(d2_m), std::move(d2_se)));
    out.push_back(make_audit("p-down3", report.grid, std::move(d3_m), std::move(d3_se)));
    out.push_back(make_audit("q-up", report.grid, std::move(qu_m), std::move(qu_se)));

    double fitted = -std::numeric_limits<double>::infinity();
    for (double d : ld_def) fitted = std::max(fitted, d);
    if (ld_def.empty()) fitted = kNan;
    std::vector<double> ld_m(ld_def.size());
    for (std::size_t k = 0; k < ld_def.size(); ++k) ld_m[k] = fitted - ld_def[k];
    BoundAuditResult ld = make_audit("l-down", std::move(ld_t), std::move(ld_m),
                                     std::move(ld_se));
    ld.fitted_constant = fitted;
    out.push_back(std::move(ld));
    return out;
}

GridSeries gronwall_bound(const std::vector<double>& grid,
                          const std::vector<double>& g, double a) {
    if (grid.empty() || grid.size() != g.size())
        throw std::invalid_argument("gronwall_bound: grid and sample sizes differ");
    if (grid.front() != 0.0)
        throw std::invalid_argument("gronwall_bound: grid must start at 0");
    for (std::size_t k = 1; k < grid.size(); ++k)
        if (grid[k] <= grid[k - 1] || grid[k] > 1.0)
            throw std::invalid_argument("gronwall_bound: grid not increasing in [0, 1]");

    std::size_t m = grid.size();
    if (grid.back() == 1.0) {
        std::fprintf(stderr, "gronwall_bound: excluding grid endpoint t = 1\n");
        --m;
        if (m == 0) throw std::invalid_argument("gronwall_bound: no points below 1");
    }

    GridSeries out;
    out.t.assign(grid.begin(), grid.begin() + static_cast<std::ptrdiff_t>(m));
    out.labels = {"f"};
    out.values = {std::vector<double>(m, 0.0)};

    double cumulative = 0.0;
    for (std::size_t k = 1; k < m; ++k) {
        const double t0 = grid[k - 1], t1 = grid[k];
        const double g0 = g[k - 1], g1 = g[k];
        auto kernel = [&](double s) {
            const double w = (s - t0) / (t1 - t0);
            const double gs = g0 * (1.0 - w) + g1 * w;
            return std::exp(a / (1.0 - s)) * gs / (1.0 - s);
        };
        cumulative += integrate(kernel, t0, t1, std::max(1e-15, 1e-9 * (t1 - t0)));
        out.values[0][k] = (1.0 - t1) * std::exp(-a / (1.0 - t1)) * cumulative;
    }
    return out;
}

double g_function(double b, double t) {
    if (t < 0.0 || t > 1.0)
        throw std::invalid_argument("g_function: t outside [0, 1]");
    if (t == 1.0) {
        if (b >= 0.0) return b;
        return -std::numeric_limits<double>::infinity();
    }
    return 1.0 + b - t - (1.0 + b) * (1.0 - t) * std::exp(-b * t / (1.0 - t));
}

double c_plus_threshold() {
    auto h = [](double t) { return (2.0 * t - 3.0 * t * t) / (2.0 * (1.0 - t)); };
    const int n = 20000;
    double best_t = 0.0, best = h(0.0);
    for (int k = 1; k < n; ++k) {
        const double t = static_cast<double>(k) / n;
        const double v = h(t);
        if (v > best) {
            best = v;
            best_t = t;
        }
    }
    double lo = std::max(0.0, best_t - 1.0 / n);
    double hi = std::min(1.0 - 1e-12, best_t + 1.0 / n);
    for (int it = 0; it < 200; ++it) {
        const double a = lo + (hi - lo) / 3.0;
        const double b = hi - (hi - lo) / 3.0;
        if (h(a) < h(b))
            lo = a;
        else
            hi = b;
    }
    return h(0.5 * (lo + hi));
}

RemainderScan remainder_scan(const std::vector<double>& nus,
                             const std::vector<double>& mean_l1,
                             const std::vector<double>& ses) {
    if (nus.size() != mean_l1.size() || nus.size() != ses.size())
        throw std::invalid_argument("remainder_scan: size mismatch");
    if (nus.size() < 3)
        throw std::invalid_argument("remainder_scan: need >= 3 intensities");
    double lo = nus.front(), hi = nus.front();
    for (double nu : nus) {
        if (nu <= 0.0) throw std::invalid_argument("remainder_scan: nu must be positive");
        lo = std::min(lo, nu);
        hi = std::max(hi, nu);
    }
    if (hi / lo < 100.0 * (1.0 - 1e-12))
        throw std::invalid_argument("remainder_scan: intensities must span two decades");

    RemainderScan scan;
    scan.nus = nus;
    scan.ses = ses;
    scan.remainders.resize(nus.size());
    for (std::size_t k = 0; k < nus.size(); ++k)
        scan.remainders[k] = mean_l1[k] - std::sqrt(2.0 * nus[k]) + std::log(nus[k]) / 12.0;
    const auto [mn, mx] =
        std::minmax_element(scan.remainders.begin(), scan.remainders.end());
    scan.max_pairwise_diff = *mx - *mn;
    return scan;
}

CovPair empirical_cov(const std::vector<GridSeries>& ensemble, double s, double t,
                      const std::string& component_s,
                      const std::string& component_t) {
    if (ensemble.size() < 2)
        throw std::invalid_argument("empirical_cov: need >= 2 replicates");
    const std::vector<double>& times = ensemble.front().t;
    auto snap = [&](double v) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < times.size(); ++k)
            if (std::abs(times[k] - v) < std::abs(times[best] - v)) best = k;
        if (std::abs(times[best] - v) > 1e-12)
            std::fprintf(stderr, "empirical_cov: snapping %.6g to grid point %.6g\n", v,
                         times[best]);
        return best;
    };
    const std::size_t is = snap(s), it = snap(t);

    const std::size_t n = ensemble.size();
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = ensemble[i].component(component_s)[is];
        b[i] = ensemble[i].component(component_t)[it];
    }
    CovPair pair;
    pair.s = times[is];
    pair.t = times[it];
    pair.component_s = component_s;
    pair.component_t = component_t;
    pair.cov = covariance(a, b);
    pair.se = jackknife_cov_se(a, b);
    pair.reps = n;
    return pair;
}

std::vector<double> sample_min_normal_limit(std::size_t n, Seed seed) {
    Rng rng(seed);
    const double scale = std::pow(2.0, -0.25);
    const double inv_rt3 = 1.0 / std::sqrt(3.0);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x1 = rng.normal() * inv_rt3;
        const double x2 = rng.normal();
        out[i] = scale * std::min(x1, x2);
    }
    return out;
}

double min_normal_mean_quadrature() {
    const double a = 1.0 / std::sqrt(3.0);
    auto integrand = [a](double x) {
        const double fa = normal_pdf(x / a) / a;
        const double fb = normal_pdf(x);
        const double qa = 1.0 - normal_cdf(x / a);
        const double qb = 1.0 - normal_cdf(x);
        return x * (fa * qb + fb * qa);
    };
    return std::pow(2.0, -0.25) * integrate(integrand, -12.0, 12.0, 1e-12);
}

KsResult feasible_stationary_limit_check(const std::vector<SelectionPath>& paths,
                                         std::size_t reps_limit, Seed seed) {
    if (paths.empty() || reps_limit == 0)
        throw std::invalid_argument("feasible_stationary_limit_check: empty input");
    const double nu = paths.front().nu;
    for (const SelectionPath& p : paths)
        if (p.nu != nu)
            throw std::invalid_argument(
                "feasible_stationary_limit_check: mixed intensities");
    const double root4 = std::pow(nu, 0.25);
    const double s2n = std::sqrt(2.0 * nu);
    std::vector<double> ltil(paths.size());
    for (std::size_t i = 0; i < paths.size(); ++i)
        ltil[i] = root4 * (static_cast<double>(paths[i].final_len()) / s2n - 1.0);
    return two_sample_ks(std::move(ltil), sample_min_normal_limit(reps_limit, seed));
}

} // namespace incsel
