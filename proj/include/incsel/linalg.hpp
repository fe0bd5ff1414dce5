#pragma once

#include <cmath>
#include <stdexcept>

namespace incsel {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct Mat2 {
    // row-major: [[a, b], [c, d]]
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    Mat2 transpose() const { return {a, c, b, d}; }

    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }

    Vec2 operator*(const Vec2& v) const {
        return {a * v.x + b * v.y, c * v.x + d * v.y};
    }

    Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    Mat2 scaled(double s) const { return {a * s, b * s, c * s, d * s}; }

    double max_abs() const {
        return std::max(std::max(std::abs(a), std::abs(b)),
                        std::max(std::abs(c), std::abs(d)));
    }
};

// Factor F of a symmetric PSD matrix with F F^T = M. Cholesky when the pivot
// allows it, symmetric eigendecomposition otherwise (rank-deficient inputs are
// legal; genuinely indefinite inputs throw).
inline Mat2 factor_psd(const Mat2& m, double tol = 1e-12) {
    if (std::abs(m.b - m.c) > tol * (1.0 + m.max_abs()))
        throw std::invalid_argument("factor_psd: matrix not symmetric");
    const double scale = 1.0 + m.max_abs();

    if (m.a > tol * scale) {
        const double l11 = std::sqrt(m.a);
        const double l21 = m.b / l11;
        const double rem = m.d - l21 * l21;
        if (rem < -tol * scale)
            throw std::invalid_argument("factor_psd: matrix not PSD");
        return {l11, 0.0, l21, std::sqrt(std::max(rem, 0.0))};
    }

    // eigendecomposition fallback
    const double tr = m.a + m.d;
    const double det = m.a * m.d - m.b * m.c;
    const double disc = std::sqrt(std::max(tr * tr / 4.0 - det, 0.0));
    const double l1 = tr / 2.0 + disc;
    const double l2 = tr / 2.0 - disc;
    if (l2 < -tol * scale)
        throw std::invalid_argument("factor_psd: matrix not PSD");

    // eigenvector for l1; the orthogonal complement serves l2
    double vx, vy;
    if (std::abs(m.b) > tol * scale) {
        vx = l1 - m.d;
        vy = m.b;
    } else {
        vx = m.a >= m.d ? 1.0 : 0.0;
        vy = m.a >= m.d ? 0.0 : 1.0;
    }
    const double n = std::hypot(vx, vy);
    vx /= n;
    vy /= n;
    const double s1 = std::sqrt(std::max(l1, 0.0));
    const double s2 = std::sqrt(std::max(l2, 0.0));
    return {vx * s1, -vy * s2, vy * s1, vx * s2};
}

} // namespace incsel
