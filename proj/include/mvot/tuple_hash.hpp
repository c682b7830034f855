#pragma once

#include "mvot/embedding.hpp"
#include "mvot/sha256.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace mvot {

// 256-bit commitment digest over an ordered tuple of vault entries.
using TupleHash = Digest256;

// Domain separation tag for entry-tuple commitments; changing it is a
// hash_version bump.
inline constexpr char kTupleHashTag[] = "mvot/entry-tuple/v1";

// Digest layout: tag || salt || for each position in ascending vault order,
// (vault index as 4-byte little-endian || entry bytes). Binding the vault
// index per position rules out collisions between the same entry bytes seen
// from different vaults.
//
// `subset` must be strictly ascending and match `entries` in length.
TupleHash hash_entry_tuple(std::span<const std::uint32_t> subset,
                           std::span<const CanonicalBytes> entries,
                           std::span<const std::uint8_t> salt);

// Streaming helpers used by the verification enumerator to share hash state
// across tuples with a common prefix.
Sha256 tuple_hash_root(std::span<const std::uint8_t> salt);
void tuple_hash_absorb(Sha256& ctx, std::uint32_t vault_index,
                       std::span<const std::uint8_t> entry_bytes);

} // namespace mvot
