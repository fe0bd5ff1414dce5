#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <vector>

#include "doctest.h"
#include "incsel/analysis.hpp"
#include "incsel/limit_diffusion.hpp"
#include "incsel/processes.hpp"
#include "incsel/scatter.hpp"

using namespace incsel;

namespace {

const Seed kSeed{223, 0};
const double kSig1Sq = 2.0 * std::sqrt(2.0) / 3.0;

ControlSpec selfsim_optimal(double nu) {
    return {ControlKind::self_similar, nu, DeltaSpec{DeltaKind::optimal, 0.0}, 1.0};
}

// One markwise self-similar ensemble shared by the audit and covariance cases.
const std::vector<SelectionPath>& shared_selfsim() {
    static const std::vector<SelectionPath> paths = [] {
        const ControlSpec ss = selfsim_optimal(1e4);
        std::vector<SelectionPath> out;
        out.reserve(2000);
        for (std::size_t i = 0; i < 2000; ++i)
            out.push_back(
                select_markwise(ss, sample_scatter(1e4, Rect{}, kSeed.stream(20000 + i))));
        return out;
    }();
    return paths;
}

MomentReport synthetic_report(std::vector<double> grid, std::vector<double> p,
                              std::vector<double> q) {
    MomentReport r;
    r.nu = 100.0;
    r.reps = 100;
    r.se_available = true;
    const std::size_t m = grid.size();
    r.grid = std::move(grid);
    r.p_hat = std::move(p);
    r.q_hat = std::move(q);
    r.var_x.assign(m, 1e-8);
    r.var_l.assign(m, 1e-8);
    r.cov_xl.assign(m, 0.0);
    r.se_p.assign(m, 1e-5);
    r.se_q.assign(m, 1e-5);
    r.se_var_x.assign(m, 1e-8);
    r.se_var_l.assign(m, 1e-8);
    r.se_cov_xl.assign(m, 1e-8);
    return r;
}

const BoundAuditResult& find_audit(const std::vector<BoundAuditResult>& audits,
                                   const std::string& name) {
    for (const BoundAuditResult& a : audits)
        if (a.bound_name == name) return a;
    throw std::runtime_error("no audit named " + name);
}

} // namespace

TEST_CASE("moment report structure and degenerate ensembles") {
    SelectionPath p;
    p.nu = 100.0;
    p.jumps = {{0.2, 0.3, 1}, {0.6, 0.5, 2}};
    const std::vector<double> grid{0.0, 0.5, 1.0};

    const MomentReport two = estimate_moments({p, p}, grid);
    CHECK(two.reps == 2);
    CHECK(two.se_available);
    CHECK(two.p_hat[0] == 0.0);
    CHECK(two.p_hat[1] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(two.p_hat[2] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(two.q_hat[2] == doctest::Approx(2.0 / std::sqrt(200.0)).epsilon(1e-15));
    for (std::size_t k = 0; k < grid.size(); ++k) {
        CHECK(two.var_x[k] == 0.0);
        CHECK(two.var_l[k] == 0.0);
        CHECK(two.cov_xl[k] == 0.0);
        CHECK(two.se_p[k] == 0.0);
    }

    const MomentReport one = estimate_moments({p}, grid);
    CHECK(one.reps == 1);
    CHECK_FALSE(one.se_available);
    CHECK(one.p_hat[1] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(std::isnan(one.var_x[1]));
    CHECK(std::isnan(one.se_p[1]));
    CHECK_THROWS_AS((void)audit_general_inequalities(one), std::invalid_argument);

    SelectionPath other = p;
    other.nu = 200.0;
    CHECK_THROWS_AS((void)estimate_moments({p, other}, grid), std::invalid_argument);
    CHECK_THROWS_AS((void)estimate_moments({}, grid), std::invalid_argument);
    CHECK_THROWS_AS((void)estimate_moments({p}, {}), std::invalid_argument);
}

TEST_CASE("stationary knapsack ensemble reproduces the exact terminal law") {
    const double nu = 1e4;
    const ControlSpec stat{ControlKind::stationary, nu, DeltaSpec{}, 1.0};
    const double u_max = 1.1 * sup_window(stat);
    std::vector<SelectionPath> paths;
    paths.reserve(5000);
    for (std::size_t i = 0; i < 5000; ++i)
        paths.push_back(
            select_knapsack(stat, sample_reserve(nu, u_max, kSeed.stream(1000 + i))));

    const MomentReport rep = estimate_moments(paths, {0.0, 0.5, 1.0});
    const double s2n = std::sqrt(2.0 * nu);
    const double mean_l1 = rep.q_hat[2] * s2n;
    const double se_l1 = rep.se_q[2] * s2n;
    std::printf("[measure] stationary: mean L(1)=%.3f (se %.3f), var L(1)=%.2f, "
                "var X(1)=%.6f (se %.6f)\n",
                mean_l1, se_l1, rep.var_l[2], rep.var_x[2], rep.se_var_x[2]);
    CHECK(std::abs(mean_l1 - s2n) < 3.0 * se_l1);
    CHECK(std::abs(rep.var_l[2] / s2n - 1.0) < 0.05);
    CHECK(std::abs(rep.var_x[2] - std::pow(2.0, 1.5) / 300.0) < 3.0 * rep.se_var_x[2]);
    CHECK(std::abs(rep.p_hat[1] - 0.5) < 3.0 * rep.se_p[1]);
    CHECK(std::abs(rep.p_hat[2] - 1.0) < 3.0 * rep.se_p[2]);
}

TEST_CASE("self-similar audits hold across the board") {
    const MomentReport rep = estimate_moments(shared_selfsim(), uniform_grid(11));

    const std::vector<BoundAuditResult> general = audit_general_inequalities(rep);
    CHECK(general.size() == 5);
    for (const BoundAuditResult& a : general) {
        INFO(a.bound_name);
        CHECK(a.violations.empty());
        // violation list consistent with the margin and se columns
        for (std::size_t k = 0; k < a.margin.size(); ++k) {
            const bool flagged =
                std::find(a.violations.begin(), a.violations.end(), k) != a.violations.end();
            CHECK(flagged == (a.margin[k] < -3.0 * a.se[k]));
        }
    }

    const BoundConstants constants = calibrate_beta(selfsim_optimal(1e4));
    CHECK(constants.beta_plus == 0.0);
    CHECK(constants.beta_minus == doctest::Approx(0.4052796344432683).epsilon(1e-9));

    const std::vector<BoundAuditResult> squeeze = audit_pq_bounds(rep, constants);
    CHECK(squeeze.size() == 5);
    for (const BoundAuditResult& a : squeeze) {
        INFO(a.bound_name);
        CHECK(a.violations.empty());
    }
    // with beta_plus = 0 the upper margins reduce to t - p_hat and t - q_hat,
    // so empty violation lists assert p - t <= 0 and q - t <= 0 within 3 se
    const BoundAuditResult& pup = find_audit(squeeze, "p-up");
    CHECK(pup.margin[5] == doctest::Approx(rep.grid[5] - rep.p_hat[5]).epsilon(1e-12));
    const BoundAuditResult& ld = find_audit(squeeze, "l-down");
    CHECK(std::isfinite(ld.fitted_constant));
    double min_margin = 1e300;
    for (double v : ld.margin) min_margin = std::min(min_margin, v);
    CHECK(min_margin == 0.0); // the fitted shift makes the worst point exact
    CHECK(find_audit(squeeze, "p-down2").grid.back() <= 1.0 - constants.beta_minus / 200.0);
    std::printf("[measure] l-down fitted constant: %.4f\n", ld.fitted_constant);

    // constructed counterexamples are flagged
    const MomentReport bad_pq = synthetic_report({0.0, 0.5}, {0.0, -0.5}, {0.0, 0.5});
    const std::vector<BoundAuditResult> bad_audits = audit_general_inequalities(bad_pq);
    const BoundAuditResult& pq = find_audit(bad_audits, "pq");
    CHECK(pq.violations == std::vector<std::size_t>{1});

    const MomentReport bad_pup = synthetic_report({0.0, 0.5}, {0.0, 1.5}, {0.0, 0.5});
    const std::vector<BoundAuditResult> bad_squeeze = audit_pq_bounds(bad_pup, constants);
    const BoundAuditResult& pup_bad = find_audit(bad_squeeze, "p-up");
    CHECK(pup_bad.violations == std::vector<std::size_t>{1});
}

TEST_CASE("gronwall solution operator") {
    std::vector<double> grid(1801), zeros(1801), ones(1801);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        grid[k] = 0.9 * static_cast<double>(k) / 1800.0;
        ones[k] = 1.0;
    }

    const GridSeries trivial = gronwall_bound(grid, zeros, 0.7);
    for (double v : trivial.component("f")) CHECK(v == 0.0);

    const GridSeries unit = gronwall_bound(grid, ones, 0.0);
    const std::vector<double>& f = unit.component("f");
    for (std::size_t k : {500u, 1000u, 1500u, 1800u}) {
        const double t = grid[k];
        CHECK(f[k] == doctest::Approx(-(1.0 - t) * std::log1p(-t)).epsilon(1e-9));
    }

    // with a = b the comparison function g solves to G(b, t)
    const double b = 0.01;
    std::vector<double> gb_grid(4001), gb(4001);
    for (std::size_t k = 0; k < gb_grid.size(); ++k) {
        const double t = 0.8 * static_cast<double>(k) / 4000.0;
        gb_grid[k] = t;
        gb[k] = 2.0 * b / (1.0 - t) + b * b / ((1.0 - t) * (1.0 - t));
    }
    const GridSeries gsol = gronwall_bound(gb_grid, gb, b);
    const std::vector<double>& fg = gsol.component("f");
    for (std::size_t k : {1000u, 2000u, 3000u, 4000u})
        CHECK(std::abs(fg[k] - g_function(b, gb_grid[k])) < 1e-6);

    // monotone: pointwise larger g gives pointwise larger f
    Rng rng(kSeed.stream(300));
    std::vector<double> mg(96), g1(96), g2(96);
    for (std::size_t k = 0; k < mg.size(); ++k) mg[k] = 0.95 * static_cast<double>(k) / 95.0;
    for (double a : {-0.3, 0.0, 0.7}) {
        for (int pair = 0; pair < 5; ++pair) {
            for (std::size_t k = 0; k < mg.size(); ++k) {
                g1[k] = 2.0 * rng.u01() - 0.5;
                g2[k] = g1[k] + rng.u01();
            }
            const GridSeries s1 = gronwall_bound(mg, g1, a);
            const GridSeries s2 = gronwall_bound(mg, g2, a);
            const std::vector<double>& f1 = s1.component("f");
            const std::vector<double>& f2 = s2.component("f");
            for (std::size_t k = 0; k < mg.size(); ++k) CHECK(f1[k] <= f2[k] + 1e-12);
        }
    }

    const GridSeries cut = gronwall_bound({0.0, 0.5, 1.0}, {1.0, 1.0, 1.0}, 0.0);
    CHECK(cut.size() == 2);
    CHECK(cut.t.back() == 0.5);

    CHECK_THROWS_AS((void)gronwall_bound({0.0, 0.5}, {1.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)gronwall_bound({0.1, 0.5}, {1.0, 1.0}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)gronwall_bound({0.0, 0.5, 0.4}, {1.0, 1.0, 1.0}, 0.0),
                    std::invalid_argument);
}

TEST_CASE("g function and the expansion constant") {
    for (double t : {0.0, 0.3, 0.8, 1.0}) CHECK(g_function(0.0, t) == 0.0);
    CHECK(g_function(0.3, 1.0) == 0.3);
    CHECK(g_function(-0.2, 1.0) == -std::numeric_limits<double>::infinity());

    CHECK(g_function(1e-4, 0.5) == doctest::Approx(0.00010000249983332932).epsilon(1e-12));
    const double ratio = (g_function(1e-4, 0.5) - 2.0 * 0.5 * 1e-4) / 1e-8;
    CHECK(ratio == doctest::Approx(0.24998333293121217).epsilon(1e-9));
    CHECK(std::abs(ratio - 0.25) < 1e-3);

    CHECK(c_plus_threshold() == doctest::Approx(0.26794919243112281).epsilon(1e-9));
    CHECK(std::abs(c_plus_threshold() - (2.0 - std::sqrt(3.0))) < 1e-6);

    CHECK_THROWS_AS((void)g_function(0.1, 1.5), std::invalid_argument);
    CHECK_THROWS_AS((void)g_function(0.1, -0.1), std::invalid_argument);
}

TEST_CASE("remainder scan") {
    const std::vector<double> nus{1e3, 1e4, 1e5};
    std::vector<double> exact(3), zeros(3, 0.0);
    for (std::size_t k = 0; k < 3; ++k)
        exact[k] = std::sqrt(2.0 * nus[k]) - std::log(nus[k]) / 12.0 + 1.0;
    const RemainderScan flat = remainder_scan(nus, exact, zeros);
    for (double r : flat.remainders) CHECK(r == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(flat.max_pairwise_diff < 1e-10);

    std::vector<double> stationary(3);
    for (std::size_t k = 0; k < 3; ++k) stationary[k] = std::sqrt(2.0 * nus[k]);
    const RemainderScan growing = remainder_scan(nus, stationary, zeros);
    CHECK(growing.remainders[0] == doctest::Approx(std::log(1e3) / 12.0).epsilon(1e-12));
    CHECK(growing.max_pairwise_diff ==
          doctest::Approx(std::log(100.0) / 12.0).epsilon(1e-12));

    CHECK_THROWS_AS((void)remainder_scan({1e3, 1e4}, {0.0, 0.0}, {0.0, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)remainder_scan({1e3, 3e3, 9e3}, zeros, zeros),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)remainder_scan({-1e3, 1e4, 1e5}, zeros, zeros),
                    std::invalid_argument);
}

TEST_CASE("empirical covariance") {
    GridSeries flat;
    flat.t = {0.0, 0.5, 1.0};
    flat.labels = {"A"};
    flat.values = {{2.0, 2.0, 2.0}};
    const CovPair zero = empirical_cov({flat, flat, flat}, 0.5, 1.0, "A", "A");
    CHECK(zero.cov == 0.0);
    CHECK(zero.se == 0.0);
    CHECK(zero.reps == 3);

    CHECK_THROWS_AS((void)empirical_cov({flat}, 0.5, 1.0, "A", "A"), std::invalid_argument);
    CHECK_THROWS_AS((void)empirical_cov({flat, flat}, 0.5, 1.0, "A", "B"),
                    std::invalid_argument);

    const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
    std::vector<GridSeries> ens;
    ens.reserve(shared_selfsim().size());
    for (const SelectionPath& p : shared_selfsim()) ens.push_back(normalize(p, grid));

    const CovPair snapped = empirical_cov(ens, 0.26, 0.75, "Xtilde", "Xtilde");
    CHECK(snapped.s == 0.25); // off-grid time snaps to the nearest point

    const double theory = kSig1Sq * 0.25 * (1.0 - 0.75);
    std::printf("[measure] cov Xtilde(0.25, 0.75): %.5f (se %.5f) vs %.5f\n", snapped.cov,
                snapped.se, theory);
    CHECK(std::abs(snapped.cov - theory) < 3.0 * snapped.se);

    const CovPair diag = empirical_cov(ens, 0.5, 0.5, "Xtilde", "Xtilde");
    CHECK(std::abs(diag.cov - kSig1Sq * 0.25) < 3.0 * diag.se);

    const CovPair ldiag = empirical_cov(ens, 0.5, 0.5, "Ltilde", "Ltilde");
    const double ltheory = cov_limit(0.5, 0.5).d;
    std::printf("[measure] var Ltilde(0.5): %.5f (se %.5f) vs %.5f\n", ldiag.cov, ldiag.se,
                ltheory);
    CHECK(std::abs(ldiag.cov - ltheory) < 3.0 * ldiag.se);
}

TEST_CASE("min-of-normals limit law") {
    CHECK(min_normal_mean_quadrature() ==
          doctest::Approx(-0.38736638904210274).epsilon(1e-10));

    const std::vector<double> draws = sample_min_normal_limit(200000, kSeed.stream(600));
    const Moments m = moments(draws);
    CHECK(std::abs(m.mean - min_normal_mean_quadrature()) < 3.0 * m.se_mean);
    CHECK(std::abs(m.var - 0.32135180143151409) < 3.0 * m.se_var);

    // exact cdf of 2^{-1/4} min(xi_1/sqrt(3), xi_2)
    const double root4 = std::pow(2.0, 0.25);
    const KsResult ks = ks_against_cdf(draws, [root4](double x) {
        const double y = x * root4;
        return 1.0 - (1.0 - normal_cdf(y * std::sqrt(3.0))) * (1.0 - normal_cdf(y));
    });
    std::printf("[measure] min-law sampler ks: d=%.5f p=%.3f\n", ks.d, ks.p);
    CHECK(ks.p > 0.01);
}

TEST_CASE("feasible-stationary terminal length law") {
    const double nu = 1e5;
    const ControlSpec fs{ControlKind::feasible_stationary, nu, DeltaSpec{}, 1.0};
    const double u_max = 1.1 * sup_window(fs);
    std::vector<SelectionPath> paths;
    paths.reserve(3000);
    for (std::size_t i = 0; i < 3000; ++i)
        paths.push_back(
            select_knapsack(fs, sample_reserve(nu, u_max, kSeed.stream(50000 + i))));

    for (const SelectionPath& p : paths) CHECK(p.final_mark() <= 1.0);

    const KsResult ks = feasible_stationary_limit_check(paths, 100000, kSeed.stream(700));
    std::printf("[measure] feasible-stationary ks: d=%.4f (n=%zu)\n", ks.d, ks.n1);
    CHECK(ks.d < 0.05);

    CHECK_THROWS_AS((void)feasible_stationary_limit_check({}, 10, kSeed),
                    std::invalid_argument);
    std::vector<SelectionPath> mixed{paths[0], paths[1]};
    mixed[1].nu = 5.0;
    CHECK_THROWS_AS((void)feasible_stationary_limit_check(mixed, 10, kSeed),
                    std::invalid_argument);
}

TEST_CASE("two-sample ks calibration and power") {
    int accepted = 0;
    for (int rep = 0; rep < 100; ++rep) {
        Rng ra(kSeed.stream(80000 + 2 * rep)), rb(kSeed.stream(80001 + 2 * rep));
        std::vector<double> a(10000), b(10000);
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = ra.normal();
            b[i] = rb.normal();
        }
        if (two_sample_ks(a, b).p > 0.01) ++accepted;
    }
    std::printf("[measure] ks calibration: %d/100 accepted\n", accepted);
    CHECK(accepted >= 98);

    Rng ra(kSeed.stream(80200)), rb(kSeed.stream(80201));
    std::vector<double> a(10000), b(10000);
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = ra.normal();
        b[i] = rb.normal() + 1.0;
    }
    CHECK(two_sample_ks(a, b).p < 1e-6);
}
