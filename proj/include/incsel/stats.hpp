#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace incsel {

struct Moments {
    std::size_t n = 0;
    double mean = 0.0;
    double var = 0.0;     // unbiased
    double se_mean = 0.0; // sqrt(var/n)
    double se_var = 0.0;  // asymptotic, from the fourth central moment
    double m4 = 0.0;      // fourth central moment (biased divisor n)
};

Moments moments(std::span<const double> xs);

// Unbiased sample covariance.
double covariance(std::span<const double> a, std::span<const double> b);

// Leave-one-out jackknife standard error of the unbiased covariance.
double jackknife_cov_se(std::span<const double> a, std::span<const double> b);

double normal_cdf(double z);
double normal_pdf(double z);

// Upper regularized incomplete gamma Q(a, x).
double gamma_q(double a, double x);

// Kolmogorov tail Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

struct KsResult {
    double d = 0.0;      // sup distance between empirical cdfs
    double p = 1.0;      // asymptotic p-value
    std::size_t n1 = 0;
    std::size_t n2 = 0;  // 0 for one-sample tests
};

KsResult two_sample_ks(std::vector<double> a, std::vector<double> b);
KsResult ks_against_cdf(std::vector<double> xs,
                        const std::function<double(double)>& cdf);

struct Chi2Result {
    double stat = 0.0;
    int df = 0;
    double p = 1.0;
    std::size_t bins = 0;
};

// Goodness of fit of observed nonnegative-integer draws against a Poisson law
// with known mean (bins merged until every expected count >= min_expected).
Chi2Result poisson_gof(std::span<const std::uint64_t> draws, double mu,
                       double min_expected = 5.0);

} // namespace incsel
