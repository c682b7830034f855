#include "mvot/embedding.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

static_assert(std::numeric_limits<float>::is_iec559, "binary32 layout required");

namespace mvot {

EmbeddingVector::EmbeddingVector(std::vector<float> values) : values_(std::move(values)) {
    if (values_.size() < 2)
        throw std::invalid_argument("embedding: dimension must be at least 2");
    double sum = 0.0;
    for (float x : values_) {
        if (!std::isfinite(x))
            throw std::invalid_argument("embedding: components must be finite");
        sum += double(x) * double(x);
    }
    norm_ = std::sqrt(sum);
    if (norm_ == 0.0)
        throw std::invalid_argument("embedding: zero vector rejected");
}

double dot(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim())
        throw std::invalid_argument("dot: dimension mismatch");
    const float* pa = a.values().data();
    const float* pb = b.values().data();
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += double(pa[i]) * double(pb[i]);
    return s;
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    return dot(a, b) / (a.norm() * b.norm());
}

CanonicalBytes canonical_encode(const EmbeddingVector& v) {
    CanonicalBytes out;
    out.reserve(4 * v.dim());
    for (float x : v.values()) {
        const auto bits = std::bit_cast<std::uint32_t>(x);
        out.push_back(std::uint8_t(bits));
        out.push_back(std::uint8_t(bits >> 8));
        out.push_back(std::uint8_t(bits >> 16));
        out.push_back(std::uint8_t(bits >> 24));
    }
    return out;
}

EmbeddingVector canonical_decode(std::span<const std::uint8_t> bytes, std::size_t dim) {
    if (bytes.size() != 4 * dim)
        throw std::invalid_argument("canonical_decode: byte length does not match dimension");
    std::vector<float> values(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const std::uint32_t bits = std::uint32_t(bytes[4 * i]) |
                                   (std::uint32_t(bytes[4 * i + 1]) << 8) |
                                   (std::uint32_t(bytes[4 * i + 2]) << 16) |
                                   (std::uint32_t(bytes[4 * i + 3]) << 24);
        values[i] = std::bit_cast<float>(bits);
    }
    return EmbeddingVector(std::move(values));
}

} // namespace mvot
