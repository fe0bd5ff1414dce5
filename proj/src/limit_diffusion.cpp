#include "incsel/limit_diffusion.hpp"

#include <cmath>
#include <stdexcept>

#include "incsel/brownian.hpp"

namespace incsel {
namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kSigma1Sq = 2.0 * kSqrt2 / 3.0;

} // namespace

LimitConstants limit_constants() {
    LimitConstants c;
    c.sigma1 = std::pow(2.0, 0.75) / std::sqrt(3.0);
    c.sigma2 = std::pow(2.0, -0.25);
    c.rho = std::sqrt(3.0) / 2.0;
    c.sigma = {kSigma1Sq, 1.0 / kSqrt2, 1.0 / kSqrt2, 1.0 / kSqrt2};
    return c;
}

Mat2 drift_matrix() { return {1.0, 0.0, 0.5, 0.0}; }

MatrixExponentials matrix_exponentials(double t) {
    if (t < 0.0 || t >= 1.0)
        throw std::invalid_argument("matrix_exponentials: t must lie in [0,1)");
    const Mat2 a = drift_matrix();
    MatrixExponentials out;
    out.e_plus = Mat2::identity() - a.scaled(t);
    out.e_minus = Mat2::identity() + a.scaled(t / (1.0 - t));
    return out;
}

Mat2 cov_limit(double s, double t) {
    if (s < 0.0 || t > 1.0 || s > t)
        throw std::invalid_argument("cov_limit: need 0 <= s <= t <= 1");
    if (s == 1.0) return {0.0, 0.0, 0.0, 2.0 / (6.0 * kSqrt2)};
    const double l = std::log1p(-s);
    return {2.0 * kSqrt2 * s * (1.0 - t) / 3.0,
            (2.0 * s * (1.0 - t) - (1.0 - s) * l) / (3.0 * kSqrt2),
            (1.0 - t) * (2.0 * s - l) / (3.0 * kSqrt2),
            (2.0 * s * (2.0 - t) - (2.0 - s - t) * l) / (6.0 * kSqrt2)};
}

GridSeries sample_limit_path(const std::vector<double>& grid, Seed seed) {
    if (grid.size() < 2 || grid.front() != 0.0 || grid.back() != 1.0)
        throw std::invalid_argument("sample_limit_path: grid must run from 0 to 1");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1])
            throw std::invalid_argument("sample_limit_path: grid must be increasing");

    const LimitConstants lc = limit_constants();
    const Mat2 f = factor_psd(lc.sigma);
    Rng rng(seed);

    GridSeries out;
    out.t = grid;
    out.labels = {"Y1", "Y2", "W1", "W2"};
    out.values.assign(4, std::vector<double>(grid.size(), 0.0));

    double w1 = 0.0, w2 = 0.0, j = 0.0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double a = grid[k - 1];
        const double b = grid[k];
        const double dt = b - a;
        const Vec2 z{rng.normal(), rng.normal()};
        const double dw1 = std::sqrt(dt) * (f.a * z.x + f.b * z.y);
        const double dw2 = std::sqrt(dt) * (f.c * z.x + f.d * z.y);
        w1 += dw1;
        w2 += dw2;

        double y1 = 0.0;
        if (b < 1.0) {
            // advance J = int dW1/(1-s) by its exact law given dW1
            const double lr = std::log((1.0 - a) / (1.0 - b));
            const double var_j = kSigma1Sq * (1.0 / (1.0 - b) - 1.0 / (1.0 - a));
            const double cond_var = std::max(0.0, var_j - kSigma1Sq * lr * lr / dt);
            j += (lr / dt) * dw1 + std::sqrt(cond_var) * rng.normal();
            y1 = (1.0 - b) * j;
        }
        out.values[0][k] = y1;
        out.values[1][k] = 0.5 * y1 + w2 - 0.5 * w1;
        out.values[2][k] = w1;
        out.values[3][k] = w2;
    }
    return out;
}

AuxCovariances aux_covariances(double t) {
    if (t < 0.0 || t > 1.0)
        throw std::invalid_argument("aux_covariances: t must lie in [0,1]");
    AuxCovariances out;
    const double shrink = (t < 1.0) ? (1.0 - t) * std::log1p(-t) : 0.0;
    out.cov_y1_w1 = -kSigma1Sq * shrink;
    out.var_y1_minus_w1 = 2.0 * kSigma1Sq * (t - 0.5 * t * t + shrink);
    return out;
}

IdentityReport identity_checks(Seed seed, std::size_t reps) {
    const LimitConstants lc = limit_constants();
    IdentityReport out;
    out.reps = reps;
    out.algebraic_residual = std::abs(4.0 * lc.sigma.d - 4.0 * lc.sigma.b +
                                      lc.sigma.a - lc.sigma1 * lc.sigma1);

    const std::vector<double> grid{0.0, 1.0};
    double s1 = 0.0, q1 = 0.0, s2 = 0.0, q2 = 0.0;
    for (std::size_t i = 0; i < reps; ++i) {
        const GridSeries w = sample_correlated_bm(grid, lc.sigma, seed.stream(i));
        const double a = w.values[0][1];
        const double b = 2.0 * w.values[1][1] - w.values[0][1];
        s1 += a;
        q1 += a * a;
        s2 += b;
        q2 += b * b;
    }
    const double n = static_cast<double>(reps);
    const double var_w1 = (q1 - s1 * s1 / n) / (n - 1.0);
    const double var_comb = (q2 - s2 * s2 / n) / (n - 1.0);
    out.variance_ratio = var_comb / var_w1;
    return out;
}

double y2_factorization_margin(double s, double t, double u) {
    if (!(0.0 <= s && s < t && t < u && u <= 1.0))
        throw std::invalid_argument("y2_factorization_margin: need 0 <= s < t < u <= 1");
    const double r_su = cov_limit(s, u).d;
    const double r_st = cov_limit(s, t).d;
    const double r_tu = cov_limit(t, u).d;
    const double r_tt = cov_limit(t, t).d;
    return std::abs(r_su - r_st * r_tu / r_tt);
}

} // namespace incsel
