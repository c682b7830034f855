#include "mvot/serialize.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

namespace mvot {

namespace {

constexpr char kMagic[4] = {'M', 'V', 'O', 'T'};

struct Writer {
    std::vector<std::uint8_t> out;

    void bytes(const void* p, std::size_t len) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        out.insert(out.end(), b, b + len);
    }
    void u32(std::uint32_t x) {
        for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(x >> (8 * i)));
    }
    void f64(double x) {
        const auto bits = std::bit_cast<std::uint64_t>(x);
        for (int i = 0; i < 8; ++i) out.push_back(std::uint8_t(bits >> (8 * i)));
    }
};

struct Reader {
    std::span<const std::uint8_t> data;
    std::size_t pos = 0;

    void need(std::size_t len) const {
        if (pos + len > data.size()) throw FormatError("helper container truncated");
    }
    void bytes(void* p, std::size_t len) {
        need(len);
        std::memcpy(p, data.data() + pos, len);
        pos += len;
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t x = 0;
        for (int i = 0; i < 4; ++i) x |= std::uint32_t(data[pos + std::size_t(i)]) << (8 * i);
        pos += 4;
        return x;
    }
    double f64() {
        need(8);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= std::uint64_t(data[pos + std::size_t(i)]) << (8 * i);
        pos += 8;
        return std::bit_cast<double>(bits);
    }
};

const std::array<std::uint32_t, 256>& crc_table() {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int j = 0; j < 8; ++j) c = (c & 1) ? (0xedb88320u ^ (c >> 1)) : (c >> 1);
            t[i] = c;
        }
        return t;
    }();
    return table;
}

} // namespace

std::uint32_t crc32(std::span<const std::uint8_t> data) {
    const auto& table = crc_table();
    std::uint32_t c = 0xffffffffu;
    for (std::uint8_t b : data) c = table[(c ^ b) & 0xffu] ^ (c >> 8);
    return c ^ 0xffffffffu;
}

std::size_t serialized_helper_size(const ProtocolParams& params) {
    const std::size_t header = 4 + 4;                        // magic, version
    const std::size_t params_block = 6 * 4 + 3 * 8 + 4;      // six u32, three f64, hash_version
    const std::size_t salt = 16;
    const std::size_t entries =
        std::size_t(params.n) * (std::size_t(params.m) + 1) * params.dim * 4;
    const std::size_t commitments =
        4 + binomial(params.n, params.k) * (std::size_t(params.k) * 4 + 32);
    return header + params_block + salt + entries + commitments + 4; // + crc
}

std::vector<std::uint8_t> serialize_helper(const HelperData& helper) {
    helper.validate();
    Writer w;
    w.out.reserve(serialized_helper_size(helper.params));
    w.bytes(kMagic, 4);
    w.u32(helper.format_version);

    const ProtocolParams& p = helper.params;
    w.u32(p.gamma);
    w.u32(p.n);
    w.u32(p.m);
    w.u32(p.k);
    w.u32(p.tr);
    w.u32(p.dim);
    w.f64(p.scalar_min);
    w.f64(p.scalar_max);
    w.f64(p.noise_delta);
    w.u32(p.hash_version);
    w.bytes(helper.salt.data(), helper.salt.size());

    for (const auto& vault : helper.vaults)
        for (const auto& entry : vault.entries) {
            const CanonicalBytes bytes = canonical_encode(entry);
            w.bytes(bytes.data(), bytes.size());
        }

    w.u32(std::uint32_t(helper.commitments.size()));
    for (const auto& [subset, digest] : helper.commitments) {
        for (std::uint32_t v : subset) w.u32(v);
        w.bytes(digest.data(), digest.size());
    }

    w.u32(crc32(w.out));
    return w.out;
}

HelperData deserialize_helper(std::span<const std::uint8_t> stream) {
    if (stream.size() < 8) throw FormatError("helper container too short for magic/version");
    if (std::memcmp(stream.data(), kMagic, 4) != 0)
        throw FormatError("helper container magic mismatch");

    Reader r{stream.subspan(4)};
    HelperData helper;
    helper.format_version = r.u32();
    if (helper.format_version != kFormatVersion)
        throw FormatError("unsupported helper format version " +
                          std::to_string(helper.format_version));

    // Checksum first: the rest of the parse may assume intact bytes.
    if (stream.size() < 12) throw FormatError("helper container truncated");
    const std::uint32_t stored_crc =
        std::uint32_t(stream[stream.size() - 4]) | (std::uint32_t(stream[stream.size() - 3]) << 8) |
        (std::uint32_t(stream[stream.size() - 2]) << 16) |
        (std::uint32_t(stream[stream.size() - 1]) << 24);
    if (crc32(stream.first(stream.size() - 4)) != stored_crc)
        throw FormatError("helper container checksum mismatch");

    ProtocolParams& p = helper.params;
    p.gamma = r.u32();
    p.n = r.u32();
    p.m = r.u32();
    p.k = r.u32();
    p.tr = r.u32();
    p.dim = r.u32();
    p.scalar_min = r.f64();
    p.scalar_max = r.f64();
    p.noise_delta = r.f64();
    p.hash_version = r.u32();
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("helper container params invalid: ") + e.what());
    }

    r.bytes(helper.salt.data(), helper.salt.size());

    helper.vaults.resize(p.n);
    std::vector<std::uint8_t> entry_bytes(std::size_t(p.dim) * 4);
    for (std::uint32_t v = 0; v < p.n; ++v) {
        helper.vaults[v].channel_index = v;
        helper.vaults[v].entries.reserve(std::size_t(p.m) + 1);
        for (std::uint32_t j = 0; j <= p.m; ++j) {
            r.bytes(entry_bytes.data(), entry_bytes.size());
            try {
                helper.vaults[v].entries.push_back(canonical_decode(entry_bytes, p.dim));
            } catch (const std::invalid_argument& e) {
                throw FormatError("helper container holds an invalid entry: " +
                                  std::string(e.what()));
            }
        }
    }

    const std::uint32_t commitment_count = r.u32();
    if (commitment_count != binomial(p.n, p.k))
        throw FormatError("helper container commitment count mismatch");
    for (std::uint32_t c = 0; c < commitment_count; ++c) {
        SubsetKey subset(p.k);
        for (auto& v : subset) v = r.u32();
        TupleHash digest;
        r.bytes(digest.data(), digest.size());
        if (!helper.commitments.emplace(std::move(subset), digest).second)
            throw FormatError("helper container holds duplicate commitment subsets");
    }

    if (r.pos + 4 + 4 != stream.size())
        throw FormatError("helper container has trailing bytes");
    try {
        helper.validate();
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("helper container inconsistent: ") + e.what());
    }
    return helper;
}

void write_helper_file(const std::string& path, const HelperData& helper) {
    const auto bytes = serialize_helper(helper);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

HelperData read_helper_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open helper file '" + path + "'");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return deserialize_helper(bytes);
}

} // namespace mvot
