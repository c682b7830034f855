#include "mvot/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace mvot {

std::uint64_t RngStream::uniform_index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % n;
}

double RngStream::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    have_spare_ = true;
    return u * scale;
}

double RngStream::truncated_normal(double mean, double stddev, double lo, double hi) {
    if (lo > hi) throw std::invalid_argument("truncated_normal: empty interval");
    if (stddev < 0.0) throw std::invalid_argument("truncated_normal: negative stddev");
    if (stddev == 0.0) {
        if (mean < lo || mean > hi)
            throw std::invalid_argument("truncated_normal: point mass outside interval");
        return mean;
    }
    for (int attempts = 0; attempts < 1'000'000; ++attempts) {
        const double x = normal(mean, stddev);
        if (x >= lo && x <= hi) return x;
    }
    throw std::runtime_error("truncated_normal: interval carries negligible mass");
}

} // namespace mvot
