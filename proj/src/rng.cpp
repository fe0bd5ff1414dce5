#include "incsel/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace incsel {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ull;
    return mix64(x);
}

} // namespace

Rng::Rng(Seed seed) {
    std::uint64_t x = mix64(seed.value + 0x9E3779B97F4A7C15ull) ^
                      mix64(seed.stream_id + 0x632BE59BD9B4E019ull);
    for (auto& s : s_) s = splitmix64(x);
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t Rng::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::u01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::u01_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_normal_;
    }
    const double r = std::sqrt(-2.0 * std::log(u01_pos()));
    const double theta = 2.0 * std::numbers::pi * u01();
    cached_normal_ = r * std::sin(theta);
    has_cached_ = true;
    return r * std::cos(theta);
}

std::uint64_t Rng::poisson(double mu) {
    if (mu < 0.0 || !std::isfinite(mu))
        throw std::invalid_argument("poisson: mean must be finite and >= 0");
    if (mu == 0.0) return 0;

    // Exact inversion: consume one uniform and walk the pmf outward from the
    // mode, subtracting probabilities until the uniform is exhausted. The
    // enumeration order partitions (0,1) into intervals of the exact pmf
    // lengths, so the sampler is exact for any mu.
    double u = u01();
    const std::uint64_t mode = static_cast<std::uint64_t>(mu);
    const double log_pm =
        static_cast<double>(mode) * std::log(mu) - mu - std::lgamma(static_cast<double>(mode) + 1.0);
    const double pm = std::exp(log_pm);

    if (u < pm) return mode;
    u -= pm;

    double p_up = pm;
    double p_down = pm;
    std::uint64_t k_up = mode;
    std::uint64_t k_down = mode;
    bool down_alive = mode > 0;

    for (;;) {
        ++k_up;
        p_up *= mu / static_cast<double>(k_up);
        if (u < p_up) return k_up;
        u -= p_up;

        if (down_alive) {
            p_down *= static_cast<double>(k_down) / mu;
            --k_down;
            if (u < p_down) return k_down;
            u -= p_down;
            down_alive = k_down > 0;
        }

        // Mass exhausted to double precision far in the tail.
        if (p_up < 1e-300 && (!down_alive || p_down < 1e-300)) return k_up;
    }
}

} // namespace incsel
