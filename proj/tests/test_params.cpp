#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mvot/json_io.hpp"
#include "mvot/params.hpp"

#include <cmath>

using namespace mvot;

TEST_CASE("binomial coefficients") {
    CHECK(binomial(5, 5) == 1);
    CHECK(binomial(5, 4) == 5);
    CHECK(binomial(5, 2) == 10);
    CHECK(binomial(0, 0) == 1);
    CHECK(binomial(3, 5) == 0);
    CHECK(binomial(64, 32) == 1832624140942590534ULL);
    CHECK(log2_binomial(5, 4) == doctest::Approx(std::log2(5.0)).epsilon(1e-12));
}

TEST_CASE("keygen accepts the reference configuration") {
    // 5 * log2(2000) = 54.83 >= 54, so m = 2000 passes at gamma = 54.
    KeygenOptions opts;
    opts.m = 2000;
    const auto params = keygen(54, 5, 5, 512, opts);
    CHECK(params.m == 2000);
    CHECK(params.n == 5);
    CHECK(params.k == 5);
    CHECK(params.dim == 512);
}

TEST_CASE("keygen minimal m") {
    CHECK(keygen(10, 1, 1, 8).m == 1024);          // 2^10 exactly
    CHECK(keygen(54, 5, 5, 8).m == 1783);          // ceil(2^10.8)
    CHECK(minimal_chaff_count(54, 4, 1u << 24) == 11586); // ceil(2^13.5)
    // Minimality: one less must fail the bit condition.
    CHECK(4.0 * std::log2(11585.0) < 54.0);
    CHECK(4.0 * std::log2(11586.0) >= 54.0);
}

TEST_CASE("keygen rejects insufficient m") {
    // 4 * log2(2000) = 43.86 < 54.
    KeygenOptions opts;
    opts.m = 2000;
    CHECK_THROWS_AS(keygen(54, 5, 4, 512, opts), std::invalid_argument);
}

TEST_CASE("keygen refuses an unsatisfiable chaff budget") {
    KeygenOptions opts;
    opts.max_m = 1000;
    CHECK_THROWS_AS(keygen(54, 5, 4, 512, opts), std::invalid_argument); // needs 11586
}

TEST_CASE("keygen argument validation") {
    CHECK_THROWS_AS(keygen(0, 5, 5, 512), std::invalid_argument);
    CHECK_THROWS_AS(keygen(54, 5, 0, 512), std::invalid_argument);
    CHECK_THROWS_AS(keygen(54, 5, 6, 512), std::invalid_argument); // k > n
}

TEST_CASE("params invariants") {
    auto params = keygen(16, 5, 5, 32);
    CHECK_NOTHROW(params.validate());

    auto bad = params;
    bad.tr = bad.m + 2;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = params;
    bad.tr = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = params;
    bad.scalar_min = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = params;
    bad.scalar_min = 2.0;
    bad.scalar_max = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = params;
    bad.noise_delta = -0.1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    bad = params;
    bad.dim = 1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("combination budget bounds tr") {
    KeygenOptions opts;
    opts.m = 100;
    auto params = keygen(16, 5, 5, 32, opts);
    // C(5,5) * 16^5 = 2^20 > 10^6.
    params.tr = 16;
    CHECK_THROWS_AS(params.validate(), std::invalid_argument);
    params.tr = 15; // 759375 <= 10^6
    CHECK_NOTHROW(params.validate());
    CHECK(params.combination_count(2) == doctest::Approx(32.0));
}

TEST_CASE("params JSON round-trip") {
    KeygenOptions opts;
    opts.m = 2000;
    opts.tr = 3;
    const auto params = keygen(54, 5, 5, 512, opts);
    const auto back = params_from_json(params_to_json(params));
    CHECK(back == params);
    CHECK(params_to_json(back) == params_to_json(params));
}
