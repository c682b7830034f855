#pragma once

#include <cstdint>
#include <random>

namespace mvot {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Seeded random stream. Distribution sampling is implemented by hand on top
// of the raw engine output so that results are reproducible for a given seed
// independent of the standard library in use.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

    // Independent substream for trial `index`; trials may then run in any
    // order (or concurrently) without changing results.
    RngStream child(std::uint64_t index) const {
        return RngStream(splitmix64(seed_ ^ splitmix64(index + 0x517cc1b727220a95ULL)));
    }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Unbiased integer in [0, n).
    std::uint64_t uniform_index(std::uint64_t n);

    // Standard normal, Marsaglia polar method.
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Normal conditioned on [lo, hi] by rejection. Caller must ensure the
    // interval carries non-negligible mass.
    double truncated_normal(double mean, double stddev, double lo, double hi);

  private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

} // namespace mvot
