#include "incsel/scatter.hpp"

#include <algorithm>
#include <stdexcept>

namespace incsel {

std::vector<Atom> sample_scatter(double nu, const Rect& region, Seed seed) {
    if (nu < 0.0) throw std::invalid_argument("sample_scatter: nu must be >= 0");
    if (region.t1 < region.t0 || region.x1 < region.x0)
        throw std::invalid_argument("sample_scatter: inverted region");

    const double area = region.area();
    if (nu == 0.0 || area == 0.0) return {};

    Rng rng(seed);
    const std::uint64_t n = rng.poisson(nu * area);
    std::vector<Atom> atoms(n);
    const double dt = region.t1 - region.t0;
    const double dx = region.x1 - region.x0;
    for (auto& a : atoms) {
        a.t = region.t0 + dt * rng.u01();
        a.x = region.x0 + dx * rng.u01();
    }
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) {
        if (a.t != b.t) return a.t < b.t;
        return a.x < b.x;
    });
    return atoms;
}

} // namespace incsel
