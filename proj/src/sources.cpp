#include "mvot/sources.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mvot {

namespace {

std::vector<double> raw_gaussian(std::uint32_t dim, RngStream& rng) {
    std::vector<double> v(dim);
    for (auto& x : v) x = rng.normal();
    return v;
}

EmbeddingVector to_unit_embedding(const std::vector<double>& v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    std::vector<float> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = float(v[i] / norm);
    return EmbeddingVector(std::move(out));
}

} // namespace

ChannelSet make_channel_set(std::vector<EmbeddingVector> channels) {
    if (channels.empty()) throw std::invalid_argument("channel set: need at least one channel");
    const std::size_t dim = channels.front().dim();
    for (const auto& c : channels)
        if (c.dim() != dim) throw std::invalid_argument("channel set: mixed dimensions");
    return ChannelSet{std::move(channels)};
}

void DistSpec::validate_cosine_band() const {
    if (stddev < 0.0) throw std::invalid_argument("distribution: negative stddev");
    if (lo > hi) throw std::invalid_argument("distribution: empty truncation interval");
    if (lo < -1.0 || hi > 1.0)
        throw std::invalid_argument("distribution: cosine band must lie within [-1, 1]");
    if (stddev == 0.0 && (mean < lo || mean > hi))
        throw std::invalid_argument("distribution: point mass outside truncation interval");
}

void PopulationSpec::validate() const {
    if (num_identities < 1) throw std::invalid_argument("population: need at least one identity");
    if (dim < 2) throw std::invalid_argument("population: dimension must be at least 2");
    if (n_channels < 1) throw std::invalid_argument("population: need at least one channel");
    genuine_cos.validate_cosine_band();
    imposter_cos.validate_cosine_band();
    unrelated_cos.validate_cosine_band();
    if (genuine_cos.lo <= imposter_cos.hi)
        throw std::invalid_argument("population: genuine band must lie strictly above imposter band");
    if (channel_coupling < 0.0 || channel_coupling > 1.0)
        throw std::invalid_argument("population: channel_coupling must be in [0, 1]");
}

EmbeddingVector random_unit_vector(std::uint32_t dim, RngStream& rng) {
    if (dim < 2) throw std::invalid_argument("random_unit_vector: dimension must be at least 2");
    for (;;) {
        auto v = raw_gaussian(dim, rng);
        double norm = 0.0;
        for (double x : v) norm += x * x;
        if (norm > 1e-12) return to_unit_embedding(v);
    }
}

EmbeddingVector unit_vector_with_cosine_towards(const EmbeddingVector& axis, double target_cos,
                                                const EmbeddingVector& direction_hint,
                                                RngStream& rng) {
    if (!(target_cos > -1.0) || target_cos > 1.0)
        throw std::invalid_argument("target cosine must lie in (-1, 1]");
    if (axis.dim() != direction_hint.dim())
        throw std::invalid_argument("axis/direction dimension mismatch");

    const std::size_t dim = axis.dim();
    // Work on the unit axis in double precision.
    std::vector<double> u(dim);
    for (std::size_t i = 0; i < dim; ++i) u[i] = double(axis[i]) / axis.norm();

    if (target_cos == 1.0) {
        std::vector<float> out(dim);
        for (std::size_t i = 0; i < dim; ++i) out[i] = float(u[i]);
        return EmbeddingVector(std::move(out));
    }

    // Orthonormal component of the hint against the axis; resample randomly
    // if the hint is (numerically) parallel.
    std::vector<double> w(dim);
    const EmbeddingVector* hint = &direction_hint;
    EmbeddingVector fallback = axis; // placeholder, replaced on resample
    for (;;) {
        double proj = 0.0;
        for (std::size_t i = 0; i < dim; ++i) proj += double((*hint)[i]) / hint->norm() * u[i];
        double norm2 = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            w[i] = double((*hint)[i]) / hint->norm() - proj * u[i];
            norm2 += w[i] * w[i];
        }
        if (norm2 > 1e-12) {
            const double inv = 1.0 / std::sqrt(norm2);
            for (auto& x : w) x *= inv;
            break;
        }
        fallback = random_unit_vector(std::uint32_t(dim), rng);
        hint = &fallback;
    }

    const double rho = target_cos;
    const double ortho = std::sqrt(1.0 - rho * rho);
    std::vector<float> out(dim);
    for (std::size_t i = 0; i < dim; ++i) out[i] = float(rho * u[i] + ortho * w[i]);
    return EmbeddingVector(std::move(out));
}

EmbeddingVector unit_vector_with_cosine(const EmbeddingVector& axis, double target_cos,
                                        RngStream& rng) {
    if (target_cos == 1.0)
        return unit_vector_with_cosine_towards(axis, target_cos, axis, rng);
    return unit_vector_with_cosine_towards(axis, target_cos,
                                           random_unit_vector(std::uint32_t(axis.dim()), rng), rng);
}

ChannelSet derive_channels(const std::vector<EmbeddingVector>& identity_latents,
                           double target_cos, RngStream& rng) {
    if (identity_latents.empty())
        throw std::invalid_argument("derive_channels: need at least one latent");
    std::vector<EmbeddingVector> out;
    out.reserve(identity_latents.size());
    for (const auto& u : identity_latents)
        out.push_back(unit_vector_with_cosine(u, target_cos, rng));
    return make_channel_set(std::move(out));
}

Population::Population(const PopulationSpec& spec) : spec_(spec) {
    spec_.validate();
    RngStream rng(spec_.rng_seed);
    latents_.resize(spec_.num_identities);
    for (std::uint32_t id = 0; id < spec_.num_identities; ++id) {
        latents_[id].reserve(spec_.n_channels);
        if (spec_.channel_coupling == 0.0) {
            for (std::uint32_t c = 0; c < spec_.n_channels; ++c)
                latents_[id].push_back(random_unit_vector(spec_.dim, rng));
        } else {
            // Blend a shared identity latent into each channel.
            const EmbeddingVector base = random_unit_vector(spec_.dim, rng);
            const double shared = std::sqrt(spec_.channel_coupling);
            const double fresh = std::sqrt(1.0 - spec_.channel_coupling);
            for (std::uint32_t c = 0; c < spec_.n_channels; ++c) {
                const EmbeddingVector own = random_unit_vector(spec_.dim, rng);
                std::vector<double> v(spec_.dim);
                for (std::uint32_t i = 0; i < spec_.dim; ++i)
                    v[i] = shared * double(base[i]) + fresh * double(own[i]);
                latents_[id].push_back(to_unit_embedding(v));
            }
        }
    }
}

const EmbeddingVector& Population::latent(std::uint32_t identity, std::uint32_t channel) const {
    if (identity >= latents_.size() || channel >= spec_.n_channels)
        throw std::out_of_range("population: identity/channel out of range");
    return latents_[identity][channel];
}

ChannelSet Population::latents_of(std::uint32_t identity) const {
    if (identity >= latents_.size())
        throw std::out_of_range("population: identity out of range");
    return make_channel_set(latents_[identity]);
}

ChannelSet Population::genuine_query(std::uint32_t identity, RngStream& rng) const {
    std::vector<EmbeddingVector> out;
    out.reserve(spec_.n_channels);
    for (std::uint32_t c = 0; c < spec_.n_channels; ++c) {
        const double rho = spec_.genuine_cos.sample(rng);
        out.push_back(unit_vector_with_cosine(latent(identity, c), rho, rng));
    }
    return make_channel_set(std::move(out));
}

ChannelSet Population::imposter_query(std::uint32_t identity, RngStream& rng) const {
    if (spec_.num_identities < 2)
        throw std::invalid_argument("imposter_query: population needs at least two identities");
    std::uint32_t other = std::uint32_t(rng.uniform_index(spec_.num_identities - 1));
    if (other >= identity) ++other;
    std::vector<EmbeddingVector> out;
    out.reserve(spec_.n_channels);
    for (std::uint32_t c = 0; c < spec_.n_channels; ++c) {
        const double rho = spec_.imposter_cos.sample(rng);
        out.push_back(unit_vector_with_cosine_towards(latent(identity, c), rho,
                                                      latent(other, c), rng));
    }
    return make_channel_set(std::move(out));
}

ChannelSet Population::unrelated_query(RngStream& rng) const {
    std::vector<EmbeddingVector> out;
    out.reserve(spec_.n_channels);
    for (std::uint32_t c = 0; c < spec_.n_channels; ++c)
        out.push_back(random_unit_vector(spec_.dim, rng));
    return make_channel_set(std::move(out));
}

Population sample_population(const PopulationSpec& spec) { return Population(spec); }

std::vector<EmbeddingVector> generate_chaff(const ChaffSource& source, std::size_t count) {
    if (count < 1) throw std::invalid_argument("generate_chaff: count must be positive");
    if (source.mode == ChaffSource::Mode::Synthetic) {
        RngStream rng(source.rng_seed);
        std::vector<EmbeddingVector> out;
        out.reserve(count);
        for (std::size_t i = 0; i < count; ++i)
            out.push_back(random_unit_vector(source.dim, rng));
        return out;
    }
    auto rows = read_embedding_rows(source.path, source.dim);
    if (rows.size() < count)
        throw std::runtime_error("generate_chaff: file '" + source.path + "' has " +
                                 std::to_string(rows.size()) + " rows, need " +
                                 std::to_string(count));
    rows.erase(rows.begin() + std::ptrdiff_t(count), rows.end());
    return rows;
}

// --- ingestion -------------------------------------------------------------

namespace {

struct ParsedRow {
    EmbeddingKey key;
    EmbeddingVector vec;
};

std::vector<ParsedRow> parse_embedding_file(const std::string& path, std::uint32_t expected_dim) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open embedding file '" + path + "'");

    std::vector<ParsedRow> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;

        const auto fail = [&](const std::string& what) -> std::runtime_error {
            return std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
        };

        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() < 3) throw fail("expected identity,channel,v0,...");

        EmbeddingKey key;
        key.identity = fields[0];
        if (key.identity.empty()) throw fail("empty identity");
        try {
            std::size_t used = 0;
            const long ch = std::stol(fields[1], &used);
            if (used != fields[1].size() || ch < 0) throw fail("bad channel index");
            key.channel = std::uint32_t(ch);
        } catch (const std::runtime_error&) {
            throw;
        } catch (...) {
            throw fail("bad channel index");
        }

        const std::size_t value_count = fields.size() - 2;
        if (value_count != expected_dim)
            throw fail("row has " + std::to_string(value_count) + " values, expected " +
                       std::to_string(expected_dim));
        std::vector<float> values(value_count);
        for (std::size_t i = 0; i < value_count; ++i) {
            const char* s = fields[i + 2].c_str();
            char* end = nullptr;
            values[i] = std::strtof(s, &end);
            if (end == s || *end != '\0') throw fail("bad float in column " + std::to_string(i + 2));
        }
        try {
            rows.push_back(ParsedRow{std::move(key), EmbeddingVector(std::move(values))});
        } catch (const std::invalid_argument& e) {
            throw fail(e.what());
        }
    }
    return rows;
}

} // namespace

EmbeddingTable ingest_embeddings(const std::string& path, std::uint32_t expected_dim) {
    EmbeddingTable table;
    for (auto& row : parse_embedding_file(path, expected_dim)) {
        auto [it, inserted] = table.insert({row.key, std::move(row.vec)});
        if (!inserted)
            throw std::runtime_error(path + ": duplicate record for identity '" +
                                     row.key.identity + "' channel " +
                                     std::to_string(row.key.channel));
    }
    return table;
}

std::vector<EmbeddingVector> read_embedding_rows(const std::string& path,
                                                 std::uint32_t expected_dim) {
    std::vector<EmbeddingVector> out;
    for (auto& row : parse_embedding_file(path, expected_dim)) out.push_back(std::move(row.vec));
    return out;
}

void write_embeddings(const std::string& path, const EmbeddingTable& table) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << "# identity,channel,v0,v1,...\n";
    char buf[64];
    for (const auto& [key, vec] : table) {
        out << key.identity << ',' << key.channel;
        for (float x : vec.values()) {
            // max_digits10 so binary32 values survive the text round-trip.
            std::snprintf(buf, sizeof buf, "%.9g", double(x));
            out << ',' << buf;
        }
        out << '\n';
    }
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

ChannelSet channels_from_table(const EmbeddingTable& table, const std::string& identity,
                               std::uint32_t n_channels) {
    std::vector<EmbeddingVector> channels;
    channels.reserve(n_channels);
    for (std::uint32_t c = 0; c < n_channels; ++c) {
        auto it = table.find(EmbeddingKey{identity, c});
        if (it == table.end())
            throw std::runtime_error("identity '" + identity + "' is missing channel " +
                                     std::to_string(c));
        channels.push_back(it->second);
    }
    return make_channel_set(std::move(channels));
}

} // namespace mvot
