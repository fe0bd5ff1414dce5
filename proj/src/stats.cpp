#include "incsel/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace incsel {

Moments moments(std::span<const double> xs) {
    Moments m;
    m.n = xs.size();
    if (m.n == 0) return m;
    double sum = 0.0;
    for (double x : xs) sum += x;
    m.mean = sum / static_cast<double>(m.n);
    if (m.n < 2) {
        m.var = std::nan("");
        m.se_mean = std::nan("");
        m.se_var = std::nan("");
        m.m4 = std::nan("");
        return m;
    }
    double s2 = 0.0, s4 = 0.0;
    for (double x : xs) {
        const double d = x - m.mean;
        const double d2 = d * d;
        s2 += d2;
        s4 += d2 * d2;
    }
    const double n = static_cast<double>(m.n);
    m.var = s2 / (n - 1.0);
    m.m4 = s4 / n;
    m.se_mean = std::sqrt(m.var / n);
    const double v2 = m.var * m.var;
    const double var_of_var = (m.m4 - (n - 3.0) / (n - 1.0) * v2) / n;
    m.se_var = std::sqrt(std::max(var_of_var, 0.0));
    return m;
}

double covariance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("covariance: size mismatch");
    const std::size_t n = a.size();
    if (n < 2) return std::nan("");
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= static_cast<double>(n);
    mb /= static_cast<double>(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += (a[i] - ma) * (b[i] - mb);
    return s / (static_cast<double>(n) - 1.0);
}

double jackknife_cov_se(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw std::invalid_argument("jackknife_cov_se: size mismatch");
    const std::size_t n = a.size();
    if (n < 3) return std::nan("");
    const double nn = static_cast<double>(n);
    double ma = 0.0, mb = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= nn;
    mb /= nn;
    for (std::size_t i = 0; i < n; ++i) sxy += (a[i] - ma) * (b[i] - mb);

    // leave-one-out covariance via exact downdate
    std::vector<double> loo(n);
    double loo_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = a[i] - ma;
        const double dy = b[i] - mb;
        const double sxy_i = sxy - dx * dy * nn / (nn - 1.0);
        loo[i] = sxy_i / (nn - 2.0);
        loo_mean += loo[i];
    }
    loo_mean /= nn;
    double ss = 0.0;
    for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
    return std::sqrt((nn - 1.0) / nn * ss);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

namespace {

double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double ks_p_from_d(double d, double ne) {
    const double sq = std::sqrt(ne);
    return kolmogorov_q((sq + 0.12 + 0.11 / sq) * d);
}

} // namespace

KsResult two_sample_ks(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("two_sample_ks: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na -
                                 static_cast<double>(j) / nb));
    }
    KsResult r;
    r.d = d;
    r.n1 = a.size();
    r.n2 = b.size();
    r.p = ks_p_from_d(d, na * nb / (na + nb));
    return r;
}

KsResult ks_against_cdf(std::vector<double> xs,
                        const std::function<double(double)>& cdf) {
    if (xs.empty()) throw std::invalid_argument("ks_against_cdf: empty sample");
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
    }
    KsResult r;
    r.d = d;
    r.n1 = xs.size();
    r.p = ks_p_from_d(d, n);
    return r;
}

Chi2Result poisson_gof(std::span<const std::uint64_t> draws, double mu,
                       double min_expected) {
    if (draws.empty()) throw std::invalid_argument("poisson_gof: empty sample");
    if (mu <= 0.0) throw std::invalid_argument("poisson_gof: mu must be > 0");

    const double n = static_cast<double>(draws.size());
    const double sd = std::sqrt(mu);
    const std::uint64_t lo =
        static_cast<std::uint64_t>(std::max(0.0, std::floor(mu - 10.0 * sd - 5.0)));
    const std::uint64_t hi =
        static_cast<std::uint64_t>(std::ceil(mu + 10.0 * sd + 5.0));

    // expected per integer value, tails folded into the edge cells
    const std::size_t cells = static_cast<std::size_t>(hi - lo + 1);
    std::vector<double> expect(cells, 0.0);
    std::vector<double> observed(cells, 0.0);
    double pk = std::exp(static_cast<double>(lo) * std::log(mu) - mu -
                         std::lgamma(static_cast<double>(lo) + 1.0));
    double cum_below = 0.0;
    {
        // P(K < lo) by complement of the in-range mass
        double mass = 0.0;
        double p = pk;
        for (std::uint64_t k = lo; k <= hi; ++k) {
            mass += p;
            p *= mu / static_cast<double>(k + 1);
        }
        cum_below = std::max(0.0, 1.0 - mass); // split below/above roughly at tails
    }
    double p = pk;
    for (std::size_t c = 0; c < cells; ++c) {
        expect[c] = p * n;
        p *= mu / static_cast<double>(lo + c + 1);
    }
    // fold the residual mass symmetrically into the edge cells
    expect.front() += 0.5 * cum_below * n;
    expect.back() += 0.5 * cum_below * n;

    for (std::uint64_t x : draws) {
        const std::uint64_t k = std::min(std::max(x, lo), hi);
        observed[static_cast<std::size_t>(k - lo)] += 1.0;
    }

    // merge adjacent cells until every expected count is large enough
    std::vector<double> eb, ob;
    double ea = 0.0, oa = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
        ea += expect[c];
        oa += observed[c];
        if (ea >= min_expected) {
            eb.push_back(ea);
            ob.push_back(oa);
            ea = oa = 0.0;
        }
    }
    if (ea > 0.0 || oa > 0.0) {
        if (eb.empty()) {
            eb.push_back(ea);
            ob.push_back(oa);
        } else {
            eb.back() += ea;
            ob.back() += oa;
        }
    }

    Chi2Result r;
    r.bins = eb.size();
    if (r.bins < 2) throw std::invalid_argument("poisson_gof: too few bins");
    for (std::size_t c = 0; c < eb.size(); ++c) {
        const double diff = ob[c] - eb[c];
        r.stat += diff * diff / eb[c];
    }
    r.df = static_cast<int>(r.bins) - 1;
    r.p = gamma_q(static_cast<double>(r.df) / 2.0, r.stat / 2.0);
    return r;
}

} // namespace incsel
