#pragma once

#include <cstdint>

namespace incsel {

// Replicate identity. (value, stream_id) fully determines every draw, so
// replicate i can run on any thread without coordination and reruns are
// byte-identical.
struct Seed {
    std::uint64_t value = 0;
    std::uint64_t stream_id = 0;

    Seed stream(std::uint64_t id) const { return Seed{value, id}; }
};

// xoshiro256++ seeded through splitmix64 from (value, stream_id).
class Rng {
  public:
    explicit Rng(Seed seed);

    std::uint64_t next_u64();

    // [0,1), 53-bit resolution
    double u01();
    // (0,1], safe as a log() argument
    double u01_pos();
    // standard normal, Box-Muller with pair cache
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }
    // exact Poisson sampler (inversion walk from the mode)
    std::uint64_t poisson(double mu);

  private:
    std::uint64_t s_[4];
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
};

} // namespace incsel
