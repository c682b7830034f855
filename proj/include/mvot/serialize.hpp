#pragma once

#include "mvot/vault.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvot {

// Raised for any malformed container: bad magic or version, truncation,
// checksum mismatch, inconsistent structure.
class FormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Helper-data container ("MVOT"): magic, format version, params block, salt,
// raw vault entry bytes, commitments, trailing CRC-32. All integers are
// little-endian; entry bytes are the exact bytes the commitments were
// computed over, so a round-trip is bit-lossless by construction.
std::vector<std::uint8_t> serialize_helper(const HelperData& helper);
HelperData deserialize_helper(std::span<const std::uint8_t> stream);

void write_helper_file(const std::string& path, const HelperData& helper);
HelperData read_helper_file(const std::string& path);

// Size of the serialized container in bytes.
std::size_t serialized_helper_size(const ProtocolParams& params);

// CRC-32 (IEEE, reflected), used as the container's corruption check.
std::uint32_t crc32(std::span<const std::uint8_t> data);

} // namespace mvot
