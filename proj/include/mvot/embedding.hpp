#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mvot {

// Byte image of an embedding: little-endian IEEE-754 binary32, component
// order. This layout is a stable storage/wire contract; vault commitments
// are computed over exactly these bytes.
using CanonicalBytes = std::vector<std::uint8_t>;

// Fixed-dimension real vector, the unit of all matching and hashing.
// Components are binary32 so that the stored form is the matched form.
// Construction rejects vectors that cannot be matched (wrong length,
// non-finite components, zero norm); the Euclidean norm is cached.
class EmbeddingVector {
  public:
    explicit EmbeddingVector(std::vector<float> values);

    std::size_t dim() const { return values_.size(); }
    std::span<const float> values() const { return values_; }
    float operator[](std::size_t i) const { return values_[i]; }
    double norm() const { return norm_; }

    bool operator==(const EmbeddingVector& other) const { return values_ == other.values_; }

  private:
    std::vector<float> values_;
    double norm_ = 0.0;
};

// Plain dot product with double accumulation.
double dot(const EmbeddingVector& a, const EmbeddingVector& b);

// cos(a, b) in [-1, 1]; symmetric and scale-invariant in each argument.
// Throws on dimension mismatch.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

CanonicalBytes canonical_encode(const EmbeddingVector& v);
EmbeddingVector canonical_decode(std::span<const std::uint8_t> bytes, std::size_t dim);

} // namespace mvot
