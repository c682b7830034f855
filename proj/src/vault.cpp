#include "mvot/vault.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace mvot {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Lexicographic enumeration of k-subsets of {0..n-1}.
std::vector<SubsetKey> all_k_subsets(std::uint32_t n, std::uint32_t k) {
    std::vector<SubsetKey> out;
    SubsetKey cur(k);
    std::iota(cur.begin(), cur.end(), 0u);
    for (;;) {
        out.push_back(cur);
        // advance
        std::int64_t i = std::int64_t(k) - 1;
        while (i >= 0 && cur[std::size_t(i)] == n - k + std::uint32_t(i)) --i;
        if (i < 0) break;
        ++cur[std::size_t(i)];
        for (std::size_t j = std::size_t(i) + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

} // namespace

void HelperData::validate() const {
    if (format_version != kFormatVersion)
        throw std::invalid_argument("helper: unsupported format version");
    params.validate();
    if (vaults.size() != params.n)
        throw std::invalid_argument("helper: vault count does not match params");
    for (std::size_t i = 0; i < vaults.size(); ++i) {
        if (vaults[i].channel_index != i)
            throw std::invalid_argument("helper: vault channel indices must be 0..n-1 in order");
        if (vaults[i].entries.size() != std::size_t(params.m) + 1)
            throw std::invalid_argument("helper: vault must hold exactly m+1 entries");
        for (const auto& e : vaults[i].entries)
            if (e.dim() != params.dim)
                throw std::invalid_argument("helper: entry dimension mismatch");
    }
    if (commitments.size() != binomial(params.n, params.k))
        throw std::invalid_argument("helper: expected C(n,k) commitments");
    for (const auto& [subset, digest] : commitments) {
        (void)digest;
        if (subset.size() != params.k)
            throw std::invalid_argument("helper: commitment subset size must equal k");
        for (std::size_t i = 0; i < subset.size(); ++i) {
            if (subset[i] >= params.n || (i > 0 && subset[i] <= subset[i - 1]))
                throw std::invalid_argument("helper: commitment subset must be ascending vault indices");
        }
    }
}

EmbeddingVector obfuscate_entry(const EmbeddingVector& x, const ProtocolParams& params,
                                RngStream& rng, double* scalar_out) {
    const double r = rng.uniform(params.scalar_min, params.scalar_max);
    if (scalar_out) *scalar_out = r;

    std::vector<float> out(x.dim());
    if (params.noise_delta > 0.0) {
        const double eps_norm = params.noise_delta * x.norm() * rng.uniform01();
        const EmbeddingVector dir = random_unit_vector(std::uint32_t(x.dim()), rng);
        for (std::size_t i = 0; i < x.dim(); ++i)
            out[i] = float(r * double(x[i]) + eps_norm * double(dir[i]));
    } else {
        for (std::size_t i = 0; i < x.dim(); ++i) out[i] = float(r * double(x[i]));
    }
    return EmbeddingVector(std::move(out));
}

TracedEnrollment enroll_traced(const ChannelSet& template_channels,
                               std::span<const EmbeddingVector> chaff,
                               const ProtocolParams& params, RngStream& rng) {
    params.validate();
    if (template_channels.size() != params.n)
        throw std::invalid_argument("enroll: template must provide one channel per vault");
    if (template_channels.dim() != params.dim)
        throw std::invalid_argument("enroll: template dimension does not match params");
    const std::size_t needed = std::size_t(params.n) * params.m;
    if (chaff.size() < needed)
        throw std::invalid_argument("enroll: need " + std::to_string(needed) +
                                    " chaff vectors, got " + std::to_string(chaff.size()));
    for (std::size_t i = 0; i < needed; ++i)
        if (chaff[i].dim() != params.dim)
            throw std::invalid_argument("enroll: chaff dimension mismatch at index " +
                                        std::to_string(i));

    TracedEnrollment result;
    HelperData& helper = result.helper;
    helper.params = params;
    for (auto& b : helper.salt) b = std::uint8_t(rng.next_u64());

    // Stored sub-template bytes, needed for the commitments below.
    std::vector<CanonicalBytes> stored_template_bytes;
    stored_template_bytes.reserve(params.n);

    helper.vaults.reserve(params.n);
    std::size_t chaff_cursor = 0;
    for (std::uint32_t v = 0; v < params.n; ++v) {
        Vault vault;
        vault.channel_index = v;
        vault.entries.reserve(std::size_t(params.m) + 1);
        for (std::uint32_t j = 0; j < params.m; ++j)
            vault.entries.push_back(obfuscate_entry(chaff[chaff_cursor++], params, rng));

        double scalar = 0.0;
        EmbeddingVector hidden =
            obfuscate_entry(template_channels.channels[v], params, rng, &scalar);
        stored_template_bytes.push_back(canonical_encode(hidden));

        const std::uint32_t pos = std::uint32_t(rng.uniform_index(std::uint64_t(params.m) + 1));
        vault.entries.insert(vault.entries.begin() + pos, std::move(hidden));

        result.trace.template_positions.push_back(pos);
        result.trace.scalars.push_back(scalar);
        helper.vaults.push_back(std::move(vault));
    }

    for (const auto& subset : all_k_subsets(params.n, params.k)) {
        std::vector<CanonicalBytes> tuple;
        tuple.reserve(subset.size());
        for (std::uint32_t v : subset) tuple.push_back(stored_template_bytes[v]);
        helper.commitments.emplace(subset, hash_entry_tuple(subset, tuple, helper.salt));
    }
    return result;
}

HelperData enroll(const ChannelSet& template_channels, std::span<const EmbeddingVector> chaff,
                  const ProtocolParams& params, RngStream& rng) {
    return enroll_traced(template_channels, chaff, params, rng).helper;
}

HelperData enroll(const ChannelSet& template_channels, const ChaffSource& chaff,
                  const ProtocolParams& params, RngStream& rng) {
    if (chaff.dim != params.dim)
        throw std::invalid_argument("enroll: chaff source dimension does not match params");
    const auto vectors = generate_chaff(chaff, std::size_t(params.n) * params.m);
    return enroll(template_channels, vectors, params, rng);
}

HelperData revoke_and_reenroll(const ChannelSet& template_channels, const HelperData& old_helper,
                               const ChaffSource& chaff, RngStream& rng) {
    HelperData fresh = enroll(template_channels, chaff, old_helper.params, rng);
    if (fresh.salt == old_helper.salt)
        throw std::runtime_error("revoke: fresh enrollment reproduced the old salt");
    std::set<TupleHash> old_digests;
    for (const auto& [subset, digest] : old_helper.commitments) old_digests.insert(digest);
    for (const auto& [subset, digest] : fresh.commitments)
        if (old_digests.count(digest))
            throw std::runtime_error("revoke: commitment digest survived re-enrollment");
    return fresh;
}

VerifyResult verify(const HelperData& helper, const ChannelSet& query,
                    std::optional<std::uint32_t> tr_override, double combination_budget) {
    const ProtocolParams& params = helper.params;
    const std::uint32_t tr = tr_override.value_or(params.tr);
    if (tr < 1 || tr > params.m + 1)
        throw std::invalid_argument("verify: tr must satisfy 1 <= tr <= m+1");
    if (query.size() != params.n)
        throw std::invalid_argument("verify: query must provide one channel per vault");
    if (query.dim() != params.dim)
        throw std::invalid_argument("verify: query dimension does not match helper");
    if (params.combination_count(tr) > combination_budget)
        throw std::invalid_argument("verify: C(n,k)*tr^k exceeds the combination budget");
    if (helper.vaults.size() != params.n)
        throw std::invalid_argument("verify: malformed helper (vault count)");
    for (const auto& vault : helper.vaults)
        if (vault.entries.size() != std::size_t(params.m) + 1)
            throw std::invalid_argument("verify: malformed helper (vault size)");

    VerifyResult result;
    result.matched_rank.assign(params.n, -1);
    result.best_similarity.assign(params.n, 0.0);

    // Phase 1: per-vault similarity scan, keep the top-tr entry indices.
    const auto t_match = Clock::now();
    std::vector<std::vector<std::uint32_t>> candidates(params.n);
    std::vector<double> scores(std::size_t(params.m) + 1);
    for (std::uint32_t v = 0; v < params.n; ++v) {
        const auto& entries = helper.vaults[v].entries;
        const EmbeddingVector& q = query.channels[v];
        for (std::size_t j = 0; j < entries.size(); ++j)
            scores[j] = cosine_similarity(q, entries[j]);

        std::vector<std::uint32_t> order(entries.size());
        std::iota(order.begin(), order.end(), 0u);
        std::partial_sort(order.begin(), order.begin() + tr, order.end(),
                          [&](std::uint32_t a, std::uint32_t b) {
                              if (scores[a] != scores[b]) return scores[a] > scores[b];
                              return a < b;
                          });
        order.resize(tr);
        result.best_similarity[v] = scores[order.front()];
        candidates[v] = std::move(order);
    }
    result.match_seconds = seconds_since(t_match);

    // Phase 2: per-subset Cartesian-product enumeration. Tuples are hashed
    // depth-first so states for shared prefixes are absorbed once.
    const auto t_hash = Clock::now();
    std::vector<std::vector<CanonicalBytes>> candidate_bytes(params.n);
    for (std::uint32_t v = 0; v < params.n; ++v) {
        candidate_bytes[v].reserve(tr);
        for (std::uint32_t idx : candidates[v])
            candidate_bytes[v].push_back(canonical_encode(helper.vaults[v].entries[idx]));
    }

    const Sha256 root = tuple_hash_root(helper.salt);
    for (const auto& [subset, expected] : helper.commitments) {
        // DFS stack: depth d holds the state after absorbing positions 0..d-1
        // and the candidate choice at each position.
        std::vector<Sha256> state(subset.size() + 1);
        std::vector<std::uint32_t> choice(subset.size(), 0);
        state[0] = root;
        std::size_t depth = 0;
        bool matched = false;
        while (!matched) {
            if (choice[depth] == tr) {
                if (depth == 0) break;
                --depth;
                ++choice[depth];
                continue;
            }
            Sha256 ctx = state[depth];
            tuple_hash_absorb(ctx, subset[depth], candidate_bytes[subset[depth]][choice[depth]]);
            if (depth + 1 == subset.size()) {
                ++result.hash_count;
                if (ctx.finalize() == expected) {
                    matched = true;
                    break;
                }
                ++choice[depth];
            } else {
                state[depth + 1] = ctx;
                ++depth;
                choice[depth] = 0;
            }
        }
        if (matched) {
            result.accepted = true;
            result.matched_subset = subset;
            for (std::size_t d = 0; d < subset.size(); ++d)
                result.matched_rank[subset[d]] = std::int32_t(choice[d]) + 1;
            break;
        }
    }
    result.hash_seconds = seconds_since(t_hash);
    return result;
}

} // namespace mvot
