#pragma once

#include "mvot/embedding.hpp"
#include "mvot/params.hpp"
#include "mvot/rng.hpp"
#include "mvot/sources.hpp"
#include "mvot/tuple_hash.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace mvot {

using Salt = std::array<std::uint8_t, 16>;
using SubsetKey = std::vector<std::uint32_t>; // sorted vault indices

// One channel's public vault: the obfuscated sub-template sits at a uniform
// random position among m obfuscated chaff entries. Nothing in the stored
// record marks which entry it is.
struct Vault {
    std::uint32_t channel_index = 0;
    std::vector<EmbeddingVector> entries; // m+1 entries
};

// Public enrollment output P: the n vaults (P2) plus one commitment digest
// per k-subset of vaults (P1). Safe to publish; verification needs nothing
// else.
struct HelperData {
    std::uint32_t format_version = kFormatVersion;
    ProtocolParams params;
    Salt salt{};
    std::vector<Vault> vaults;
    std::map<SubsetKey, TupleHash> commitments;

    void validate() const;
};

// Ground truth recorded alongside a traced enrollment. Never serialized;
// exists so the analysis suite can measure what the public record must not
// reveal (template positions, applied transforms).
struct EnrollmentTrace {
    std::vector<std::uint32_t> template_positions; // per vault
    std::vector<double> scalars;                   // r applied to each sub-template
};

struct TracedEnrollment {
    HelperData helper;
    EnrollmentTrace trace;
};

// Per-entry hiding transform: y = r*x + e with r ~ U[scalar_min, scalar_max]
// and ||e|| <= noise_delta * ||x||. Cosine matching is invariant to r and
// moved by at most ~noise_delta/scalar_min by e.
EmbeddingVector obfuscate_entry(const EmbeddingVector& x, const ProtocolParams& params,
                                RngStream& rng, double* scalar_out = nullptr);

// Enrollment: builds the n vaults from the sub-templates plus n*m chaff
// vectors and commits to every k-subset of the stored sub-template bytes.
// Chaff vectors are consumed in order, m per vault.
TracedEnrollment enroll_traced(const ChannelSet& template_channels,
                               std::span<const EmbeddingVector> chaff,
                               const ProtocolParams& params, RngStream& rng);
HelperData enroll(const ChannelSet& template_channels, std::span<const EmbeddingVector> chaff,
                  const ProtocolParams& params, RngStream& rng);
HelperData enroll(const ChannelSet& template_channels, const ChaffSource& chaff,
                  const ProtocolParams& params, RngStream& rng);

// Re-enrollment after compromise: fresh salt, chaff, and obfuscation. Throws
// if any commitment digest survives from the old record.
HelperData revoke_and_reenroll(const ChannelSet& template_channels, const HelperData& old_helper,
                               const ChaffSource& chaff, RngStream& rng);

struct VerifyResult {
    bool accepted = false;
    SubsetKey matched_subset;              // empty on reject
    std::vector<std::int32_t> matched_rank; // per vault, 1-based rank of the
                                            // matched entry; -1 if unmatched
    std::vector<double> best_similarity;    // per vault, top-1 cosine
    std::uint64_t hash_count = 0;           // digests compared; <= C(n,k)*tr^k
    double match_seconds = 0.0;             // similarity scan phase
    double hash_seconds = 0.0;              // tuple enumeration phase
};

// Verification: per vault the tr most similar entries are retrieved (ties
// broken by ascending entry index); every k-subset's Cartesian product of
// candidates is hashed against the stored commitment until one matches.
VerifyResult verify(const HelperData& helper, const ChannelSet& query,
                    std::optional<std::uint32_t> tr_override = std::nullopt,
                    double combination_budget = kDefaultCombinationBudget);

} // namespace mvot
