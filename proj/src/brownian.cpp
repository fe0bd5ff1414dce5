#include "incsel/brownian.hpp"

#include <cmath>
#include <stdexcept>

namespace incsel {

GridSeries sample_correlated_bm(const std::vector<double>& grid, const Mat2& cov,
                                Seed seed) {
    if (grid.size() < 1 || grid.front() != 0.0)
        throw std::invalid_argument("sample_correlated_bm: grid must start at 0");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1])
            throw std::invalid_argument("sample_correlated_bm: grid must increase");

    const Mat2 f = factor_psd(cov);
    Rng rng(seed);

    GridSeries out;
    out.t = grid;
    out.labels = {"W1", "W2"};
    out.values.assign(2, std::vector<double>(grid.size(), 0.0));

    double w1 = 0.0, w2 = 0.0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double sdt = std::sqrt(grid[i] - grid[i - 1]);
        const Vec2 z{rng.normal(), rng.normal()};
        const Vec2 dw = f * z;
        w1 += sdt * dw.x;
        w2 += sdt * dw.y;
        out.values[0][i] = w1;
        out.values[1][i] = w2;
    }
    return out;
}

} // namespace incsel
