#pragma once

#include <cstdint>

namespace andlab {

// Counter-based keyed RNG. Every draw is a pure function of
// (seed, realization, site, stream), so realizations can be generated in any
// order, on any thread, and still come out bit-identical.
namespace rng {

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t key(std::uint64_t seed, std::uint64_t realization,
                         std::uint64_t site, std::uint64_t stream = 0) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ (realization * 0xd1342543de82ef95ULL));
    h = mix64(h ^ (site * 0xaf251af3b0f025b5ULL));
    h = mix64(h ^ (stream * 0x9e3779b97f4a7c15ULL));
    return h;
}

// Uniform in [0, 1).
inline double uniform01(std::uint64_t seed, std::uint64_t realization,
                        std::uint64_t site, std::uint64_t stream = 0) {
    return static_cast<double>(key(seed, realization, site, stream) >> 11) *
           0x1.0p-53;
}

// Small sequential generator for test/null-simulation use where a stream of
// draws is more convenient than keyed access.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    double next_uniform01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

  private:
    std::uint64_t state_;
};

} // namespace rng
} // namespace andlab
