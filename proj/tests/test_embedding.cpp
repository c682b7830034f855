#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mvot/embedding.hpp"
#include "mvot/rng.hpp"
#include "mvot/sources.hpp"

#include <cmath>
#include <vector>

using namespace mvot;

namespace {

EmbeddingVector vec(std::vector<float> v) { return EmbeddingVector(std::move(v)); }

} // namespace

TEST_CASE("construction rejects invalid vectors") {
    CHECK_THROWS_AS(vec({1.0f}), std::invalid_argument);                 // dim < 2
    CHECK_THROWS_AS(vec({0.0f, 0.0f, 0.0f}), std::invalid_argument);     // zero norm
    CHECK_THROWS_AS(vec({1.0f, NAN}), std::invalid_argument);
    CHECK_THROWS_AS(vec({1.0f, INFINITY}), std::invalid_argument);
    const auto v = vec({3.0f, 4.0f});
    CHECK(v.norm() == doctest::Approx(5.0));
}

TEST_CASE("cosine similarity reference values") {
    auto v = vec({0.3f, -1.2f, 2.0f});
    CHECK(cosine_similarity(v, v) == doctest::Approx(1.0).epsilon(1e-6));

    CHECK(cosine_similarity(vec({1.0f, 0.0f}), vec({0.0f, 1.0f})) == doctest::Approx(0.0));

    // Hand computation: cos((1,0), (1,1)) = 1/sqrt(2).
    CHECK(cosine_similarity(vec({1.0f, 0.0f}), vec({1.0f, 1.0f})) ==
          doctest::Approx(0.70710678).epsilon(1e-6));

    // Scale invariance in one argument.
    auto a = vec({0.5f, 1.5f, -0.25f});
    auto b = vec({1.0f, -2.0f, 0.125f});
    std::vector<float> scaled;
    for (float x : b.values()) scaled.push_back(7.3f * x);
    CHECK(cosine_similarity(a, vec(scaled)) ==
          doctest::Approx(cosine_similarity(a, b)).epsilon(1e-6));
}

TEST_CASE("cosine similarity errors") {
    CHECK_THROWS_AS(cosine_similarity(vec({1.0f, 2.0f}), vec({1.0f, 2.0f, 3.0f})),
                    std::invalid_argument);
}

TEST_CASE("cosine symmetry and bound over random pairs") {
    RngStream rng(101);
    for (int i = 0; i < 1000; ++i) {
        const auto a = random_unit_vector(8, rng);
        std::vector<float> raw;
        for (int j = 0; j < 8; ++j) raw.push_back(float(rng.normal() * 3.0));
        raw[0] += 0.5f; // avoid the (measure-zero) all-zero draw
        const auto b = vec(raw);
        const double ab = cosine_similarity(a, b);
        const double ba = cosine_similarity(b, a);
        CHECK(std::fabs(ab - ba) <= 1e-6);
        CHECK(std::fabs(ab) <= 1.0 + 1e-6);
    }
}

TEST_CASE("scale invariance across magnitudes") {
    RngStream rng(202);
    const auto a = random_unit_vector(16, rng);
    const auto b = random_unit_vector(16, rng);
    const double base = cosine_similarity(a, b);
    for (double r : {1e-3, 0.02, 0.7, 1.0, 45.0, 1e3}) {
        std::vector<float> scaled;
        for (float x : b.values()) scaled.push_back(float(r * x));
        CHECK(std::fabs(cosine_similarity(a, vec(scaled)) - base) <= 1e-5);
    }
}

TEST_CASE("small perturbation moves cosine by at most 2*||eps||") {
    RngStream rng(303);
    for (int i = 0; i < 1000; ++i) {
        const auto a = random_unit_vector(32, rng);
        const auto b = random_unit_vector(32, rng);
        const double eps_norm = rng.uniform(0.0, 0.1);
        const auto dir = random_unit_vector(32, rng);
        std::vector<float> perturbed;
        for (std::size_t j = 0; j < b.dim(); ++j)
            perturbed.push_back(float(double(b[j]) + eps_norm * double(dir[j])));
        const double moved = cosine_similarity(a, vec(perturbed));
        CHECK(std::fabs(moved - cosine_similarity(a, b)) <= 2.0 * eps_norm + 1e-6);
    }
}

TEST_CASE("canonical encoding layout") {
    // 1.0f = 0x3f800000, -2.5f = 0xc0200000; little-endian per component.
    const auto bytes = canonical_encode(vec({1.0f, -2.5f}));
    const CanonicalBytes expected = {0x00, 0x00, 0x80, 0x3f, 0x00, 0x00, 0x20, 0xc0};
    CHECK(bytes == expected);
}

TEST_CASE("canonical encoding round-trips bit-exactly") {
    RngStream rng(404);
    for (int i = 0; i < 100; ++i) {
        std::vector<float> raw;
        for (int j = 0; j < 17; ++j) raw.push_back(float(rng.normal() * 10.0));
        raw[3] = 1e-30f; // denormal-adjacent values must survive too
        const auto v = vec(raw);
        const auto bytes = canonical_encode(v);
        CHECK(bytes.size() == 4 * v.dim());
        const auto back = canonical_decode(bytes, v.dim());
        CHECK(back == v);
        CHECK(canonical_encode(back) == bytes);
        CHECK(canonical_encode(v) == bytes); // deterministic
    }
}

TEST_CASE("one-ulp difference changes the encoding") {
    const auto v = vec({0.25f, 0.5f});
    auto nudged_values = std::vector<float>{std::nextafterf(0.25f, 1.0f), 0.5f};
    const auto nudged = vec(nudged_values);
    CHECK(canonical_encode(v) != canonical_encode(nudged));
}

TEST_CASE("canonical decode validates length") {
    CHECK_THROWS_AS(canonical_decode(std::vector<std::uint8_t>(7, 0), 2), std::invalid_argument);
}
