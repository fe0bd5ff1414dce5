#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace incsel {

// Uniform grid on [0,1] including both endpoints.
inline std::vector<double> uniform_grid(std::size_t points) {
    if (points < 2) throw std::invalid_argument("uniform_grid: need >= 2 points");
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i)
        g[i] = static_cast<double>(i) / static_cast<double>(points - 1);
    g.back() = 1.0;
    return g;
}

// A set of named sampled processes on a common time grid.
struct GridSeries {
    std::vector<double> t;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> values; // values[component][index]

    std::size_t size() const { return t.size(); }

    const std::vector<double>& component(const std::string& label) const {
        for (std::size_t c = 0; c < labels.size(); ++c)
            if (labels[c] == label) return values[c];
        throw std::invalid_argument("GridSeries: no component named " + label);
    }
};

} // namespace incsel
