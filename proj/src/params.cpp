#include "mvot/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mvot {

std::uint64_t binomial(std::uint32_t n, std::uint32_t k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 acc = 1;
    for (std::uint32_t i = 1; i <= k; ++i) {
        acc = acc * (n - k + i) / i;
        if (acc > ~std::uint64_t{0})
            throw std::overflow_error("binomial: result exceeds 64 bits");
    }
    return std::uint64_t(acc);
}

double log2_binomial(std::uint32_t n, std::uint32_t k) {
    if (k > n) throw std::invalid_argument("log2_binomial: k > n");
    return (std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
            std::lgamma(double(n - k) + 1.0)) /
           std::log(2.0);
}

double ProtocolParams::combination_count(std::uint32_t tr_value) const {
    return double(binomial(n, k)) * std::pow(double(tr_value), double(k));
}

void ProtocolParams::validate(double combination_budget) const {
    if (gamma < 1) throw std::invalid_argument("params: gamma must be positive");
    if (n < 1) throw std::invalid_argument("params: need at least one vault");
    if (k < 1 || k > n) throw std::invalid_argument("params: k must satisfy 1 <= k <= n");
    if (m < 1) throw std::invalid_argument("params: need at least one chaff entry per vault");
    if (tr < 1 || tr > m + 1)
        throw std::invalid_argument("params: tr must satisfy 1 <= tr <= m+1");
    if (dim < 2) throw std::invalid_argument("params: dimension must be at least 2");
    if (!(scalar_min > 0.0) || scalar_min > scalar_max)
        throw std::invalid_argument("params: scalar range must satisfy 0 < min <= max");
    if (noise_delta < 0.0) throw std::invalid_argument("params: noise_delta must be >= 0");
    if (hash_version != kHashVersionSha256)
        throw std::invalid_argument("params: unknown hash_version");

    const double security_bits = double(k) * std::log2(double(m));
    if (security_bits + 1e-9 < double(gamma))
        throw std::invalid_argument("params: k*log2(m) = " + std::to_string(security_bits) +
                                    " bits falls short of gamma = " + std::to_string(gamma));
    if (combination_count(tr) > combination_budget)
        throw std::invalid_argument("params: C(n,k)*tr^k exceeds the combination budget");
}

std::uint32_t minimal_chaff_count(std::uint32_t gamma, std::uint32_t k, std::uint32_t max_m) {
    if (gamma < 1) throw std::invalid_argument("keygen: gamma must be positive");
    if (k < 1) throw std::invalid_argument("keygen: k must be positive");
    const long double target = static_cast<long double>(gamma) / static_cast<long double>(k);
    long double raw = std::exp2(target);
    auto satisfies = [&](std::uint64_t m) {
        return static_cast<long double>(k) * std::log2(static_cast<long double>(m)) >=
               static_cast<long double>(gamma) - 1e-12L;
    };
    std::uint64_t m = static_cast<std::uint64_t>(std::ceil(raw));
    if (m < 2) m = 2;
    while (!satisfies(m)) ++m;
    while (m > 2 && satisfies(m - 1)) --m;
    if (m > max_m)
        throw std::invalid_argument("keygen: gamma = " + std::to_string(gamma) + " with k = " +
                                    std::to_string(k) + " needs m = " + std::to_string(m) +
                                    ", above the configured maximum " + std::to_string(max_m));
    return static_cast<std::uint32_t>(m);
}

ProtocolParams keygen(std::uint32_t gamma, std::uint32_t n, std::uint32_t k,
                      std::uint32_t dim, const KeygenOptions& options) {
    if (k < 1 || k > n) throw std::invalid_argument("keygen: k must satisfy 1 <= k <= n");

    std::uint32_t m;
    if (options.m) {
        m = *options.m;
        if (m < 1) throw std::invalid_argument("keygen: m must be positive");
        const double bits = double(k) * std::log2(double(m));
        if (bits + 1e-9 < double(gamma))
            throw std::invalid_argument(
                "keygen: supplied m = " + std::to_string(m) + " gives only " +
                std::to_string(bits) + " bits against gamma = " + std::to_string(gamma) +
                "; minimal m is " + std::to_string(minimal_chaff_count(gamma, k, options.max_m)));
        if (m > options.max_m)
            throw std::invalid_argument("keygen: supplied m exceeds the configured maximum");
    } else {
        m = minimal_chaff_count(gamma, k, options.max_m);
    }

    ProtocolParams params;
    params.gamma = gamma;
    params.n = n;
    params.m = m;
    params.k = k;
    params.tr = std::min(options.tr, m + 1);
    params.dim = dim;
    params.scalar_min = options.scalar_min;
    params.scalar_max = options.scalar_max;
    params.noise_delta = options.noise_delta;
    params.validate();
    return params;
}

} // namespace mvot
