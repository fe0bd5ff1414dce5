#pragma once

#include <vector>

#include "incsel/grid.hpp"
#include "incsel/linalg.hpp"
#include "incsel/rng.hpp"

namespace incsel {

// Planar Brownian motion with per-unit-time covariance cov (symmetric PSD,
// rank-1 allowed), sampled on the grid. Grid must start at 0 and increase;
// components are labeled "W1", "W2".
GridSeries sample_correlated_bm(const std::vector<double>& grid, const Mat2& cov,
                                Seed seed);

} // namespace incsel
