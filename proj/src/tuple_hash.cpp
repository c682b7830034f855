#include "mvot/tuple_hash.hpp"

#include <cstring>
#include <stdexcept>

namespace mvot {

Sha256 tuple_hash_root(std::span<const std::uint8_t> salt) {
    Sha256 ctx;
    ctx.update(kTupleHashTag, sizeof(kTupleHashTag) - 1);
    ctx.update(salt.data(), salt.size());
    return ctx;
}

void tuple_hash_absorb(Sha256& ctx, std::uint32_t vault_index,
                       std::span<const std::uint8_t> entry_bytes) {
    std::uint8_t idx_le[4] = {
        std::uint8_t(vault_index),
        std::uint8_t(vault_index >> 8),
        std::uint8_t(vault_index >> 16),
        std::uint8_t(vault_index >> 24),
    };
    ctx.update(idx_le, 4);
    ctx.update(entry_bytes.data(), entry_bytes.size());
}

TupleHash hash_entry_tuple(std::span<const std::uint32_t> subset,
                           std::span<const CanonicalBytes> entries,
                           std::span<const std::uint8_t> salt) {
    if (subset.size() != entries.size())
        throw std::invalid_argument("hash_entry_tuple: subset/entries length mismatch");
    if (subset.empty())
        throw std::invalid_argument("hash_entry_tuple: empty subset");
    for (std::size_t i = 1; i < subset.size(); ++i) {
        if (subset[i] <= subset[i - 1])
            throw std::invalid_argument("hash_entry_tuple: subset must be strictly ascending");
    }
    Sha256 ctx = tuple_hash_root(salt);
    for (std::size_t i = 0; i < subset.size(); ++i)
        tuple_hash_absorb(ctx, subset[i], entries[i]);
    return ctx.finalize();
}

} // namespace mvot
