#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>

namespace mvot {

using Digest256 = std::array<std::uint8_t, 32>;

// Streaming SHA-256 (FIPS 180-4). The context is a small value type and may
// be copied mid-stream; copies continue hashing independently. The tuple
// enumeration in verification relies on this to reuse common prefixes.
class Sha256 {
  public:
    Sha256() { reset(); }

    void reset();
    void update(const void* data, std::size_t len);
    void update(std::span<const std::uint8_t> data) { update(data.data(), data.size()); }
    Digest256 finalize() const;

    static Digest256 digest(const void* data, std::size_t len) {
        Sha256 h;
        h.update(data, len);
        return h.finalize();
    }
    static Digest256 digest(std::span<const std::uint8_t> data) {
        return digest(data.data(), data.size());
    }

  private:
    void compress(const std::uint8_t block[64]);

    std::array<std::uint32_t, 8> state_{};
    std::array<std::uint8_t, 64> buffer_{};
    std::uint64_t total_len_ = 0;
};

std::string to_hex(const Digest256& d);

} // namespace mvot
