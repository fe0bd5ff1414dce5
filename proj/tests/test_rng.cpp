#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "incsel/brownian.hpp"
#include "incsel/grid.hpp"
#include "incsel/linalg.hpp"
#include "incsel/quadrature.hpp"
#include "incsel/rng.hpp"
#include "incsel/scatter.hpp"
#include "incsel/stats.hpp"

using namespace incsel;

namespace {
const Seed kSeed{20260816, 0};
}

TEST_CASE("rng reproducibility and stream separation") {
    Rng a(kSeed), b(kSeed);
    for (int i = 0; i < 64; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng c(kSeed.stream(1));
    Rng d(kSeed);
    int same = 0;
    for (int i = 0; i < 64; ++i)
        if (c.next_u64() == d.next_u64()) ++same;
    CHECK(same == 0);
}

TEST_CASE("u01 range and uniform moments") {
    Rng rng(kSeed.stream(2));
    const std::size_t n = 100000;
    std::vector<double> xs(n);
    for (auto& x : xs) {
        x = rng.u01();
        REQUIRE(x >= 0.0);
        REQUIRE(x < 1.0);
    }
    const Moments m = moments(xs);
    CHECK(std::abs(m.mean - 0.5) < 3.0 * m.se_mean);
    CHECK(std::abs(m.var - 1.0 / 12.0) < 3.0 * m.se_var);

    Rng pos(kSeed.stream(3));
    for (int i = 0; i < 1000; ++i) {
        const double u = pos.u01_pos();
        REQUIRE(u > 0.0);
        REQUIRE(u <= 1.0);
    }
}

TEST_CASE("normal sampler moments and distribution") {
    Rng rng(kSeed.stream(4));
    const std::size_t n = 100000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = rng.normal();
    const Moments m = moments(xs);
    CHECK(std::abs(m.mean) < 3.0 * m.se_mean);
    CHECK(std::abs(m.var - 1.0) < 3.0 * m.se_var);

    std::vector<double> head(xs.begin(), xs.begin() + 5000);
    const KsResult ks = ks_against_cdf(head, [](double z) { return normal_cdf(z); });
    CHECK(ks.p > 1e-3);

    Rng shifted(kSeed.stream(5));
    CHECK(shifted.normal(10.0, 0.0) == 10.0);
}

TEST_CASE("poisson sampler law and edge cases") {
    Rng rng(kSeed.stream(6));
    CHECK(rng.poisson(0.0) == 0);
    CHECK_THROWS_AS((void)rng.poisson(-1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)rng.poisson(std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS((void)rng.poisson(1e308 * 10), std::invalid_argument);

    SUBCASE("small mean") {
        std::vector<std::uint64_t> draws(20000);
        for (auto& k : draws) k = rng.poisson(3.7);
        const Chi2Result gof = poisson_gof(draws, 3.7);
        CHECK(gof.p > 1e-3);
    }
    SUBCASE("tiny mean mostly zero") {
        std::vector<std::uint64_t> draws(20000);
        for (auto& k : draws) k = rng.poisson(0.05);
        const Chi2Result gof = poisson_gof(draws, 0.05, 1.0);
        CHECK(gof.p > 1e-3);
    }
    SUBCASE("large mean moments") {
        const double mu = 2000.0;
        std::vector<double> draws(20000);
        for (auto& k : draws) k = static_cast<double>(rng.poisson(mu));
        const Moments m = moments(draws);
        CHECK(std::abs(m.mean - mu) < 3.0 * m.se_mean);
        CHECK(std::abs(m.var - mu) < 3.0 * m.se_var);
    }
}

TEST_CASE("moments and covariance on hand-computed vectors") {
    const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
    const std::vector<double> b{2.0, 4.0, 5.0, 9.0};
    const Moments m = moments(a);
    CHECK(m.n == 4);
    CHECK(m.mean == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(m.var == doctest::Approx(5.0 / 3.0).epsilon(1e-14));
    CHECK(m.se_mean == doctest::Approx(std::sqrt(5.0 / 12.0)).epsilon(1e-14));
    CHECK(m.m4 == doctest::Approx(2.5625).epsilon(1e-14));

    CHECK(covariance(a, b) == doctest::Approx(11.0 / 3.0).epsilon(1e-14));

    const Moments single = moments(std::vector<double>{7.0});
    CHECK(single.n == 1);
    CHECK(single.mean == 7.0);
    CHECK(std::isnan(single.var));
}

TEST_CASE("jackknife covariance se matches direct leave-one-out") {
    Rng rng(kSeed.stream(7));
    const std::size_t n = 40;
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = rng.normal();
        b[i] = 0.5 * a[i] + rng.normal();
    }
    const double se = jackknife_cov_se(a, b);

    std::vector<double> loo(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> ai, bi;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) {
                ai.push_back(a[j]);
                bi.push_back(b[j]);
            }
        loo[i] = covariance(ai, bi);
    }
    double mean = 0.0;
    for (double v : loo) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double v : loo) ss += (v - mean) * (v - mean);
    const double direct = std::sqrt(ss * (n - 1.0) / n);
    CHECK(se == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("special functions against frozen references") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-12));
    CHECK(normal_cdf(-0.5) == doctest::Approx(0.3085375387259869).epsilon(1e-12));
    CHECK(normal_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-15));

    // analytic identities
    CHECK(gamma_q(1.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
    CHECK(gamma_q(0.5, 1.3) == doctest::Approx(std::erfc(std::sqrt(1.3))).epsilon(1e-12));
    CHECK(gamma_q(3.0, 2.5) == doctest::Approx(0.5438131158833297).epsilon(1e-12));
    CHECK(gamma_q(7.5, 6.0) == doctest::Approx(0.6790290570904147).epsilon(1e-12));

    CHECK(kolmogorov_q(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-12));
    CHECK(kolmogorov_q(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-12));
    CHECK(kolmogorov_q(1.5) == doctest::Approx(0.022217962616525127).epsilon(1e-12));
}

TEST_CASE("two-sample ks basics") {
    const KsResult same = two_sample_ks({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0});
    CHECK(same.d == doctest::Approx(0.0));
    CHECK(same.p == doctest::Approx(1.0).epsilon(1e-6));

    const KsResult disjoint = two_sample_ks({0.0, 0.1, 0.2}, {5.0, 6.0, 7.0});
    CHECK(disjoint.d == doctest::Approx(1.0));

    Rng rng(kSeed.stream(8));
    std::vector<double> x(4000), y(4000), z(4000);
    for (auto& v : x) v = rng.normal();
    for (auto& v : y) v = rng.normal();
    for (auto& v : z) v = rng.normal() + 0.5;
    CHECK(two_sample_ks(x, y).p > 1e-3);
    CHECK(two_sample_ks(x, z).p < 1e-6);
}

TEST_CASE("one-sample ks basics") {
    const KsResult tiny = ks_against_cdf({0.5}, [](double v) { return v; });
    CHECK(tiny.d == doctest::Approx(0.5).epsilon(1e-14));

    Rng rng(kSeed.stream(9));
    std::vector<double> u(10000);
    for (auto& v : u) v = rng.u01();
    const KsResult ks = ks_against_cdf(
        u, [](double v) { return std::clamp(v, 0.0, 1.0); });
    CHECK(ks.p > 1e-3);
}

TEST_CASE("poisson gof detects a wrong mean") {
    Rng rng(kSeed.stream(10));
    std::vector<std::uint64_t> draws(20000);
    for (auto& k : draws) k = rng.poisson(7.0);
    CHECK(poisson_gof(draws, 7.0).p > 1e-3);
    CHECK(poisson_gof(draws, 7.5).p < 1e-4);
    CHECK_THROWS_AS((void)poisson_gof({}, 1.0), std::invalid_argument);
}

TEST_CASE("psd factorization") {
    const Mat2 spd{4.0, 2.0, 2.0, 3.0};
    const Mat2 f = factor_psd(spd);
    CHECK(f.a == doctest::Approx(2.0));
    CHECK(f.b == doctest::Approx(0.0));
    CHECK(f.c == doctest::Approx(1.0));
    CHECK(f.d == doctest::Approx(std::sqrt(2.0)));

    auto check_fft = [](const Mat2& m) {
        const Mat2 g = factor_psd(m);
        const Mat2 r = g * g.transpose() - m;
        CHECK(r.max_abs() < 1e-12 * (1.0 + m.max_abs()));
    };
    check_fft(Mat2{1.0, 1.0, 1.0, 1.0});           // rank one
    check_fft(Mat2{0.0, 0.0, 0.0, 1.0});           // zero pivot
    check_fft(Mat2{0.0, 0.0, 0.0, 0.0});           // zero matrix
    const double s11 = 2.0 * std::sqrt(2.0) / 3.0;
    const double s12 = 1.0 / std::sqrt(2.0);
    check_fft(Mat2{s11, s12, s12, s12});

    CHECK_THROWS_AS((void)factor_psd(Mat2{1.0, 2.0, 2.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)factor_psd(Mat2{1.0, 0.5, -0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS((void)factor_psd(Mat2{-1.0, 0.0, 0.0, -1.0}), std::invalid_argument);
}

TEST_CASE("uniform grid") {
    const auto g = uniform_grid(5);
    REQUIRE(g.size() == 5);
    CHECK(g[0] == 0.0);
    CHECK(g[1] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(g[4] == 1.0);
    CHECK_THROWS_AS((void)uniform_grid(1), std::invalid_argument);

    GridSeries s;
    s.t = g;
    s.labels = {"a"};
    s.values = {{1, 2, 3, 4, 5}};
    CHECK(s.component("a")[2] == 3.0);
    CHECK_THROWS_AS((void)s.component("b"), std::invalid_argument);
}

TEST_CASE("quadrature on known integrals") {
    CHECK(integrate([](double x) { return x * x; }, 0.0, 1.0) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, 1.0) ==
          doctest::Approx(1.0 - std::cos(1.0)).epsilon(1e-12));
    CHECK(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0) ==
          doctest::Approx(2.0).epsilon(1e-6));
    CHECK(integrate([](double x) { return x; }, 1.0, 0.0) ==
          doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(integrate([](double x) { return x; }, 0.7, 0.7) == 0.0);
    CHECK(integrate_split([](double x) { return std::abs(x - 1.0 / 3.0); }, 0.0, 1.0,
                          {1.0 / 3.0}) ==
          doctest::Approx(5.0 / 18.0).epsilon(1e-12));
}

TEST_CASE("scatter trivial contracts") {
    CHECK(sample_scatter(0.0, Rect{}, kSeed).empty());
    CHECK(sample_scatter(5.0, Rect{0.3, 0.3, 0.0, 1.0}, kSeed).empty());
    CHECK_THROWS_AS((void)sample_scatter(-1.0, Rect{}, kSeed), std::invalid_argument);
    CHECK_THROWS_AS((void)sample_scatter(1.0, Rect{0.5, 0.4, 0.0, 1.0}, kSeed),
                    std::invalid_argument);

    const auto atoms = sample_scatter(5.0, Rect{}, kSeed.stream(11));
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        CHECK(atoms[i].t >= 0.0);
        CHECK(atoms[i].t <= 1.0);
        CHECK(atoms[i].x >= 0.0);
        CHECK(atoms[i].x <= 1.0);
        if (i) CHECK(atoms[i].t >= atoms[i - 1].t);
    }

    const auto again = sample_scatter(5.0, Rect{}, kSeed.stream(11));
    REQUIRE(again.size() == atoms.size());
    for (std::size_t i = 0; i < atoms.size(); ++i) {
        CHECK(again[i].t == atoms[i].t);
        CHECK(again[i].x == atoms[i].x);
    }
}

TEST_CASE("scatter count law at nu=1e4 over 1e4 replicates") {
    const double nu = 1e4;
    const std::size_t reps = 10000;
    std::vector<std::uint64_t> counts(reps);
    double sum = 0.0;
    for (std::size_t i = 0; i < reps; ++i) {
        const auto atoms = sample_scatter(nu, Rect{}, kSeed.stream(100 + i));
        counts[i] = atoms.size();
        sum += static_cast<double>(atoms.size());
    }
    const double mean = sum / static_cast<double>(reps);
    CHECK(std::abs(mean - nu) <= 3.0 * std::sqrt(nu / reps) * 1e2);
    CHECK(std::abs(mean - nu) <= 3.0); // 3 standard errors, the sharp version
    const Chi2Result gof = poisson_gof(counts, nu);
    CHECK(gof.p > 0.01);
}

TEST_CASE("scatter coordinates are uniform") {
    std::vector<double> ts, xs;
    for (std::size_t i = 0; i < 200; ++i) {
        const auto atoms = sample_scatter(50.0, Rect{}, kSeed.stream(20000 + i));
        for (const auto& a : atoms) {
            ts.push_back(a.t);
            xs.push_back(a.x);
        }
    }
    auto ident = [](double v) { return std::clamp(v, 0.0, 1.0); };
    CHECK(ks_against_cdf(ts, ident).p > 1e-3);
    CHECK(ks_against_cdf(xs, ident).p > 1e-3);
}

TEST_CASE("brownian driver basics") {
    const auto grid = uniform_grid(3);
    const Mat2 eye = Mat2::identity();
    const GridSeries one = sample_correlated_bm(grid, eye, kSeed.stream(12));
    CHECK(one.component("W1")[0] == 0.0);
    CHECK(one.component("W2")[0] == 0.0);

    const GridSeries again = sample_correlated_bm(grid, eye, kSeed.stream(12));
    CHECK(again.component("W1")[2] == one.component("W1")[2]);

    CHECK_THROWS_AS((void)sample_correlated_bm({0.5, 1.0}, eye, kSeed),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)sample_correlated_bm({0.0, 0.5, 0.5}, eye, kSeed),
                    std::invalid_argument);

    // rank-one driver forces the two components onto one path
    const GridSeries tied =
        sample_correlated_bm(uniform_grid(9), Mat2{1.0, 1.0, 1.0, 1.0}, kSeed.stream(13));
    for (std::size_t i = 0; i < tied.size(); ++i)
        CHECK(tied.component("W1")[i] == tied.component("W2")[i]);

    const GridSeries degenerate =
        sample_correlated_bm(uniform_grid(9), Mat2{0.0, 0.0, 0.0, 1.0}, kSeed.stream(14));
    for (std::size_t i = 0; i < degenerate.size(); ++i)
        CHECK(degenerate.component("W1")[i] == 0.0);
}

TEST_CASE("brownian driver covariance over 1e5 replicates") {
    const double s11 = 2.0 * std::sqrt(2.0) / 3.0;
    const double s12 = 1.0 / std::sqrt(2.0);
    const Mat2 cov{s11, s12, s12, s12};
    const std::vector<double> grid{0.0, 0.5, 1.0};
    const std::size_t reps = 100000;

    std::vector<double> w1_half(reps), w1_one(reps), w2_one(reps);
    for (std::size_t i = 0; i < reps; ++i) {
        const GridSeries p = sample_correlated_bm(grid, cov, kSeed.stream(30000 + i));
        w1_half[i] = p.component("W1")[1];
        w1_one[i] = p.component("W1")[2];
        w2_one[i] = p.component("W2")[2];
    }

    const Moments m1 = moments(w1_one);
    CHECK(std::abs(m1.var - s11) < 3.0 * m1.se_var);
    const Moments mh = moments(w1_half);
    CHECK(std::abs(mh.var - 0.5 * s11) < 3.0 * mh.se_var);
    const Moments m2 = moments(w2_one);
    CHECK(std::abs(m2.var - s12) < 3.0 * m2.se_var);

    const double c = covariance(w1_one, w2_one);
    const double c_se = jackknife_cov_se(w1_one, w2_one);
    CHECK(std::abs(c - s12) < 3.0 * c_se);
}

TEST_CASE("identity driver components are uncorrelated") {
    const std::vector<double> grid{0.0, 1.0};
    const std::size_t reps = 100000;
    std::vector<double> u(reps), v(reps);
    for (std::size_t i = 0; i < reps; ++i) {
        const GridSeries p =
            sample_correlated_bm(grid, Mat2::identity(), kSeed.stream(200000 + i));
        u[i] = p.component("W1")[1];
        v[i] = p.component("W2")[1];
    }
    const Moments mu = moments(u);
    const Moments mv = moments(v);
    const double corr = covariance(u, v) / std::sqrt(mu.var * mv.var);
    CHECK(std::abs(corr) < 3.0 / std::sqrt(static_cast<double>(reps)));
}
