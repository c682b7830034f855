#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mvot/rng.hpp"
#include "mvot/sha256.hpp"
#include "mvot/tuple_hash.hpp"

#include <string>
#include <vector>

using namespace mvot;

TEST_CASE("sha256 FIPS 180-4 vectors") {
    CHECK(to_hex(Sha256::digest("", 0)) ==
          "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");

    const std::string abc = "abc";
    CHECK(to_hex(Sha256::digest(abc.data(), abc.size())) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");

    const std::string two_block = "abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq";
    CHECK(to_hex(Sha256::digest(two_block.data(), two_block.size())) ==
          "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");

    // One million 'a', streamed in uneven chunks.
    Sha256 h;
    const std::string chunk(997, 'a');
    std::size_t fed = 0;
    while (fed + chunk.size() <= 1'000'000) {
        h.update(chunk.data(), chunk.size());
        fed += chunk.size();
    }
    const std::string rest(1'000'000 - fed, 'a');
    h.update(rest.data(), rest.size());
    CHECK(to_hex(h.finalize()) ==
          "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

TEST_CASE("sha256 context copies continue independently") {
    Sha256 a;
    a.update("prefix-", 7);
    Sha256 b = a;
    a.update("left", 4);
    b.update("right", 5);
    const std::string left = "prefix-left", right = "prefix-right";
    CHECK(a.finalize() == Sha256::digest(left.data(), left.size()));
    CHECK(b.finalize() == Sha256::digest(right.data(), right.size()));
}

namespace {

CanonicalBytes bytes_of(std::initializer_list<std::uint8_t> b) { return CanonicalBytes(b); }

const std::vector<std::uint8_t> kSalt = {1, 2, 3, 4};

} // namespace

TEST_CASE("hash_entry_tuple determinism and sensitivity") {
    const std::vector<std::uint32_t> subset = {0, 1};
    const std::vector<CanonicalBytes> entries = {bytes_of({10, 11, 12, 13}),
                                                 bytes_of({20, 21, 22, 23})};

    const TupleHash d1 = hash_entry_tuple(subset, entries, kSalt);
    const TupleHash d2 = hash_entry_tuple(subset, entries, kSalt);
    CHECK(d1 == d2);

    // Swapping which entry sits at which vault index changes the digest.
    const std::vector<CanonicalBytes> swapped = {entries[1], entries[0]};
    CHECK(hash_entry_tuple(subset, swapped, kSalt) != d1);

    // Same entry bytes under a different subset changes the digest.
    const std::vector<std::uint32_t> other_subset = {0, 2};
    CHECK(hash_entry_tuple(other_subset, entries, kSalt) != d1);

    // Salt is bound.
    const std::vector<std::uint8_t> other_salt = {1, 2, 3, 5};
    CHECK(hash_entry_tuple(subset, entries, other_salt) != d1);
}

TEST_CASE("hash_entry_tuple input validation") {
    const std::vector<CanonicalBytes> entries = {bytes_of({1, 2, 3, 4}), bytes_of({5, 6, 7, 8})};
    const std::vector<CanonicalBytes> one_entry = {entries[0]};

    const std::vector<std::uint32_t> unsorted = {1, 0};
    CHECK_THROWS_AS(hash_entry_tuple(unsorted, entries, kSalt), std::invalid_argument);

    const std::vector<std::uint32_t> duplicate = {1, 1};
    CHECK_THROWS_AS(hash_entry_tuple(duplicate, entries, kSalt), std::invalid_argument);

    const std::vector<std::uint32_t> pair = {0, 1};
    CHECK_THROWS_AS(hash_entry_tuple(pair, one_entry, kSalt), std::invalid_argument);

    const std::vector<std::uint32_t> empty = {};
    const std::vector<CanonicalBytes> no_entries = {};
    CHECK_THROWS_AS(hash_entry_tuple(empty, no_entries, kSalt), std::invalid_argument);
}

TEST_CASE("single-bit flips always change the digest") {
    RngStream rng(777);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::uint8_t> input(64);
        for (auto& b : input) b = std::uint8_t(rng.next_u64());
        const auto base = Sha256::digest(input);
        const std::size_t bit = std::size_t(rng.uniform_index(input.size() * 8));
        input[bit / 8] ^= std::uint8_t(1u << (bit % 8));
        CHECK(Sha256::digest(input) != base);
    }
}
