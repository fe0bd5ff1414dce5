#pragma once

#include <cstddef>
#include <vector>

#include "incsel/grid.hpp"
#include "incsel/linalg.hpp"
#include "incsel/rng.hpp"

namespace incsel {

// diffusion coefficients of the driving motion (W1, W2) and their matrix
struct LimitConstants {
    double sigma1;
    double sigma2;
    double rho;
    Mat2 sigma;
};

LimitConstants limit_constants();

// A = [[1,0],[1/2,0]], the idempotent drift matrix of the limit pair
Mat2 drift_matrix();

// e^{a(t)} = I - tA and its inverse e^{-a(t)} = I + (t/(1-t))A; throws
// std::invalid_argument at t outside [0,1) since the inverse is singular at 1
struct MatrixExponentials {
    Mat2 e_plus;
    Mat2 e_minus;
};

MatrixExponentials matrix_exponentials(double t);

// cross-covariance E{Y(s)^T Y(t)} of the limit pair for 0 <= s <= t <= 1
// (entry (i,j) = Cov(Y_{i+1}(s), Y_{j+1}(t))); throws std::invalid_argument
// when s > t or arguments leave [0,1]
Mat2 cov_limit(double s, double t);

// exact joint sampler of (Y1, Y2, W1, W2) at the grid times: the running
// stochastic integral J(t) = int dW1/(1-s) is advanced with its exact
// Gaussian transition conditional on W1's increment, Y1 = (1-t) J, and
// Y2 = Y1/2 + W2 - W1/2 identically; Y1(1) = 0 exactly. The grid must
// start at 0 and end at 1.
GridSeries sample_limit_path(const std::vector<double>& grid, Seed seed);

// closed forms: Cov(Y1(t), W1(t)) and Var(Y1(t) - W1(t))
struct AuxCovariances {
    double cov_y1_w1;
    double var_y1_minus_w1;
};

AuxCovariances aux_covariances(double t);

// the identity Var(2 W2 - W1)(t) = Var W1(t): algebraic residual from the
// Sigma entries and the empirical terminal variance ratio over sampled paths
struct IdentityReport {
    double algebraic_residual;
    double variance_ratio;
    std::size_t reps;
};

IdentityReport identity_checks(Seed seed, std::size_t reps = 100000);

// Markov factorization residual |R(s,u) - R(s,t) R(t,u) / R(t,t)| for the
// scalar covariance R of Y2; strictly positive because Y2 is not Markovian
double y2_factorization_margin(double s, double t, double u);

} // namespace incsel
