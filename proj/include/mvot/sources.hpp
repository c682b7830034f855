#pragma once

#include "mvot/embedding.hpp"
#include "mvot/rng.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace mvot {

// One identity's (or one query's) per-channel embeddings: channel i feeds
// vault i. All channels share a dimension.
struct ChannelSet {
    std::vector<EmbeddingVector> channels;

    std::size_t size() const { return channels.size(); }
    std::size_t dim() const { return channels.empty() ? 0 : channels.front().dim(); }
};

ChannelSet make_channel_set(std::vector<EmbeddingVector> channels);

// Truncated normal band: values are drawn from N(mean, std) conditioned on
// [lo, hi]. Cosine bands must stay inside [-1, 1].
struct DistSpec {
    double mean = 0.0;
    double stddev = 0.0;
    double lo = -1.0;
    double hi = 1.0;

    void validate_cosine_band() const;
    double sample(RngStream& rng) const { return rng.truncated_normal(mean, stddev, lo, hi); }
    bool operator==(const DistSpec&) const = default;
};

// Synthetic population description. Per identity and channel an independent
// ground-truth unit vector is drawn; genuine and imposter queries are then
// constructed with an exact target cosine against those latents, sampled
// from the respective band. The unrelated band describes (and is checked
// against) the similarity that naturally arises between unrelated vectors;
// it is not used to steer construction.
//
// channel_coupling in [0, 1] blends a shared per-identity latent into every
// channel: 0 leaves channels independent, 1 clones one latent across
// channels. It exists so linkability can be dialed for analysis.
struct PopulationSpec {
    std::uint32_t num_identities = 16;
    std::uint32_t dim = 512;
    std::uint32_t n_channels = 5;
    DistSpec genuine_cos{0.9, 0.05, 0.8, 1.0};
    DistSpec imposter_cos{0.3, 0.05, 0.2, 0.4};
    DistSpec unrelated_cos{0.0, 0.1, -0.25, 0.25};
    double channel_coupling = 0.0;
    std::uint64_t rng_seed = 0;

    void validate() const;
    bool operator==(const PopulationSpec&) const = default;
};

// Sampled ground truth plus query construction. Deterministic per spec seed;
// immutable once built.
class Population {
  public:
    explicit Population(const PopulationSpec& spec);

    const PopulationSpec& spec() const { return spec_; }
    std::uint32_t num_identities() const { return spec_.num_identities; }
    std::uint32_t n_channels() const { return spec_.n_channels; }

    const EmbeddingVector& latent(std::uint32_t identity, std::uint32_t channel) const;
    ChannelSet latents_of(std::uint32_t identity) const;

    // Genuine capture of `identity`: per channel an independent cosine drawn
    // from the genuine band, hit exactly.
    ChannelSet genuine_query(std::uint32_t identity, RngStream& rng) const;

    // Same-population imposter against `identity`: per channel the cosine is
    // drawn from the imposter band; the off-axis direction comes from another
    // identity's ground truth.
    ChannelSet imposter_query(std::uint32_t identity, RngStream& rng) const;

    // Unrelated probe: fresh random unit vectors, the same process that
    // produces identity latents and synthetic chaff.
    ChannelSet unrelated_query(RngStream& rng) const;

  private:
    PopulationSpec spec_;
    std::vector<std::vector<EmbeddingVector>> latents_; // [identity][channel]
};

Population sample_population(const PopulationSpec& spec);

// Chaff supply: either fresh synthetic vectors drawn from the unrelated
// pool, or rows of an ingestion-format file taken in file order.
struct ChaffSource {
    enum class Mode { Synthetic, FileBacked };
    Mode mode = Mode::Synthetic;
    std::uint32_t dim = 512;
    std::uint64_t rng_seed = 0;
    std::string path; // file-backed only
};

std::vector<EmbeddingVector> generate_chaff(const ChaffSource& source, std::size_t count);

// Sub-template derivation with an exact target cosine: each channel returns
// rho*u + sqrt(1-rho^2)*w for a fresh random unit w orthogonal to u.
ChannelSet derive_channels(const std::vector<EmbeddingVector>& identity_latents,
                           double target_cos, RngStream& rng);

// Geometry helpers shared by the population model and the protocol tests.
EmbeddingVector random_unit_vector(std::uint32_t dim, RngStream& rng);
EmbeddingVector unit_vector_with_cosine(const EmbeddingVector& axis, double target_cos,
                                        RngStream& rng);
EmbeddingVector unit_vector_with_cosine_towards(const EmbeddingVector& axis, double target_cos,
                                                const EmbeddingVector& direction_hint,
                                                RngStream& rng);

// --- Embedding file ingestion -------------------------------------------
//
// UTF-8 text, one record per line: identity,channel,v0,v1,...
// '#'-prefixed lines and blank lines are ignored.

struct EmbeddingKey {
    std::string identity;
    std::uint32_t channel = 0;
    auto operator<=>(const EmbeddingKey&) const = default;
};

using EmbeddingTable = std::map<EmbeddingKey, EmbeddingVector>;

EmbeddingTable ingest_embeddings(const std::string& path, std::uint32_t expected_dim);
void write_embeddings(const std::string& path, const EmbeddingTable& table);

// All rows of an ingestion file in file order (used for file-backed chaff).
std::vector<EmbeddingVector> read_embedding_rows(const std::string& path,
                                                 std::uint32_t expected_dim);

// Channels 0..n-1 of one identity, assembled into a ChannelSet.
ChannelSet channels_from_table(const EmbeddingTable& table, const std::string& identity,
                               std::uint32_t n_channels);

} // namespace mvot
