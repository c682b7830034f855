#pragma once

#include <cstdint>
#include <optional>

namespace mvot {

inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::uint32_t kHashVersionSha256 = 1;

// Ceiling on candidate tuples a verifier may enumerate: C(n,k) * tr^k must
// stay under this unless a caller raises it explicitly.
inline constexpr double kDefaultCombinationBudget = 1e6;

// Exact binomial coefficient; throws on overflow.
std::uint64_t binomial(std::uint32_t n, std::uint32_t k);
double log2_binomial(std::uint32_t n, std::uint32_t k);

// Everything that governs a protocol instance. `gamma` is the security
// target in bits; each of the n vaults hides one sub-template among m chaff
// entries; a query succeeds if k of the n vaults release their entry; tr is
// the per-vault retrieval depth at verification.
struct ProtocolParams {
    std::uint32_t gamma = 54;
    std::uint32_t n = 5;
    std::uint32_t m = 2000;
    std::uint32_t k = 5;
    std::uint32_t tr = 3;
    std::uint32_t dim = 512;
    double scalar_min = 0.5;
    double scalar_max = 2.0;
    double noise_delta = 0.05;
    std::uint32_t hash_version = kHashVersionSha256;

    // Candidate tuples in a full verification pass: C(n,k) * tr^k.
    double combination_count(std::uint32_t tr_value) const;

    // Throws std::invalid_argument describing the first violated invariant.
    void validate(double combination_budget = kDefaultCombinationBudget) const;

    bool operator==(const ProtocolParams&) const = default;
};

struct KeygenOptions {
    std::optional<std::uint32_t> m;       // validated if given, else minimal
    std::uint32_t tr = 3;
    double scalar_min = 0.5;
    double scalar_max = 2.0;
    double noise_delta = 0.05;
    std::uint32_t max_m = 1u << 24;       // refusal line for the chaff budget
};

// Parameter generation: picks the smallest m with k*log2(m) >= gamma (the
// security condition of the k-of-n relaxation), or validates a caller
// supplied m against it. tr is clamped to m+1 when the vault is smaller
// than the requested retrieval depth.
ProtocolParams keygen(std::uint32_t gamma, std::uint32_t n, std::uint32_t k,
                      std::uint32_t dim = 512, const KeygenOptions& options = {});

// Smallest m satisfying k*log2(m) >= gamma.
std::uint32_t minimal_chaff_count(std::uint32_t gamma, std::uint32_t k, std::uint32_t max_m);

} // namespace mvot
