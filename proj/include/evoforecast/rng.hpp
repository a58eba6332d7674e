#pragma once

#include <cstdint>
#include <random>

namespace evoforecast {

// Seeded random source. All draws go through fixed mappings of the raw
// mt19937_64 output so that results are identical across platforms and
// standard-library versions (std::uniform_*_distribution is
// implementation-defined and must not be used here).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform index in [0, n), unbiased via rejection sampling.
    std::size_t uniform_index(std::size_t n) {
        const std::uint64_t span = static_cast<std::uint64_t>(n);
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return static_cast<std::size_t>(x % span);
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Deterministic child stream, independent of draws taken from this one.
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
        // splitmix64 over the combined value
        std::uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
        x ^= x >> 30;
        x *= 0xBF58476D1CE4E5B9ULL;
        x ^= x >> 27;
        x *= 0x94D049BB133111EBULL;
        x ^= x >> 31;
        return x;
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace evoforecast
