#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mvot/security.hpp"
#include "mvot/sources.hpp"
#include "mvot/vault.hpp"

#include <cmath>
#include <vector>

using namespace mvot;

namespace {

ProtocolParams params_mnk(std::uint32_t m, std::uint32_t n, std::uint32_t k, std::uint32_t dim,
                          std::uint32_t tr = 1) {
    KeygenOptions opts;
    opts.m = m;
    opts.tr = tr;
    return keygen(1, n, k, dim, opts);
}

TracedEnrollment enroll_random(const ProtocolParams& params, RngStream& rng) {
    std::vector<EmbeddingVector> channels;
    for (std::uint32_t c = 0; c < params.n; ++c)
        channels.push_back(random_unit_vector(params.dim, rng));
    const auto chaff =
        generate_chaff(ChaffSource{ChaffSource::Mode::Synthetic, params.dim, rng.next_u64(), {}},
                       std::size_t(params.n) * params.m);
    return enroll_traced(make_channel_set(std::move(channels)), chaff, params, rng);
}

} // namespace

TEST_CASE("work factor arithmetic") {
    const auto reference = work_factor(params_mnk(2000, 5, 5, 8));
    CHECK(reference.naive_bits == doctest::Approx(54.83).epsilon(0.001));
    CHECK(reference.refined_bits == doctest::Approx(reference.naive_bits));
    CHECK(reference.expected_tries ==
          doctest::Approx((std::pow(2001.0, 5.0) + 1.0) / 2.0).epsilon(1e-12));

    const auto tiny = work_factor(params_mnk(2, 1, 1, 8));
    CHECK(tiny.naive_bits == doctest::Approx(1.0));
    CHECK(tiny.expected_tries == doctest::Approx(2.0)); // (3+1)/2

    const auto relaxed = work_factor(params_mnk(2000, 5, 4, 8));
    CHECK(relaxed.refined_bits == doctest::Approx(std::log2(5.0 * std::pow(2000.0, 4.0))));
    CHECK(relaxed.refined_bits == doctest::Approx(46.19).epsilon(0.001));
    CHECK(relaxed.refined_bits <= relaxed.naive_bits);

    // Exactness: 2^naive_bits reproduces m^n.
    for (std::uint32_t m : {2u, 7u, 31u}) {
        const auto wf = work_factor(params_mnk(m, 3, 3, 8));
        CHECK(std::exp2(wf.naive_bits) / std::pow(double(m), 3.0) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("brute force succeeds within the exhaustive bound") {
    const auto params = params_mnk(3, 2, 2, 8);
    RngStream rng(1);
    const auto traced = enroll_random(params, rng);
    for (int i = 0; i < 20; ++i) {
        RngStream attack_rng(100 + i);
        const auto result = brute_force_attack(traced.helper, attack_rng);
        CHECK(result.succeeded);
        CHECK(result.tries_to_success >= 1);
        CHECK(result.tries_to_success <= 16); // (m+1)^n
    }
}

TEST_CASE("brute force tries are uniform: mean near (N+1)/2") {
    const auto params = params_mnk(3, 2, 2, 8);
    RngStream rng(2);
    const auto traced = enroll_random(params, rng);
    double total = 0.0;
    const int runs = 1000;
    for (int i = 0; i < runs; ++i) {
        RngStream attack_rng(5000 + i);
        total += double(brute_force_attack(traced.helper, attack_rng).tries_to_success);
    }
    const double mean = total / runs;
    CHECK(mean > 8.5 * 0.9);
    CHECK(mean < 8.5 * 1.1);
}

TEST_CASE("brute force refuses production scale, quoting the work factor") {
    const auto params = params_mnk(2000, 5, 5, 8, 3);
    RngStream rng(3);
    const auto traced = enroll_random(params, rng);
    RngStream attack_rng(4);
    CHECK_THROWS_WITH_AS(brute_force_attack(traced.helper, attack_rng),
                         doctest::Contains("54.8"), std::invalid_argument);
}

TEST_CASE("far estimate: degenerate full-retrieval accepts everything") {
    // k=1, tr=m+1 retrieves every entry, so any probe matches.
    const auto params = params_mnk(16, 3, 1, 16, 17);
    PopulationSpec spec;
    spec.num_identities = 2;
    spec.dim = 16;
    spec.n_channels = 3;
    spec.rng_seed = 7;
    const auto est = far_attack_probability(params, spec, 50, 11);
    CHECK(est.accepts == 50);
    CHECK(est.point_estimate == doctest::Approx(1.0));
    CHECK(est.analytic_bound == doctest::Approx(1.0));
}

TEST_CASE("far estimate: strict settings yield zero accepts under the bound") {
    const auto params = params_mnk(200, 5, 5, 32, 1);
    PopulationSpec spec;
    spec.num_identities = 2;
    spec.dim = 32;
    spec.n_channels = 5;
    spec.rng_seed = 13;
    const auto est = far_attack_probability(params, spec, 2000, 17);
    CHECK(est.accepts == 0);
    CHECK(est.point_estimate == 0.0);
    CHECK(est.analytic_bound == doctest::Approx(std::pow(1.0 / 201.0, 5.0)));
    CHECK(est.point_estimate <= est.wilson_hi);
    CHECK(est.wilson_hi < 2.5e-3);

    CHECK_THROWS_AS(far_attack_probability(params, spec, 0, 17), std::invalid_argument);
}

TEST_CASE("far estimate is deterministic per seed and thread count") {
    const auto params = params_mnk(50, 3, 3, 16, 2);
    PopulationSpec spec;
    spec.num_identities = 2;
    spec.dim = 16;
    spec.n_channels = 3;
    spec.rng_seed = 19;
    const auto a = far_attack_probability(params, spec, 500, 23, 1);
    const auto b = far_attack_probability(params, spec, 500, 23, 4);
    CHECK(a.accepts == b.accepts);
    CHECK(a.point_estimate == b.point_estimate);
}

TEST_CASE("chaff rank test passes with obfuscation on") {
    const auto params = params_mnk(200, 5, 5, 64, 1);
    const EnrollFn enroll_fn = [&](RngStream& rng) { return enroll_random(params, rng); };
    const auto result = chaff_rank_test(enroll_fn, 100, 31);
    CHECK(result.samples == 500);
    CHECK(result.p_combined > 0.01);
}

TEST_CASE("chaff rank test detects a planted norm defect") {
    // Obfuscation disabled and the template scaled x10: the norm statistic
    // must expose it decisively.
    auto params = params_mnk(200, 5, 5, 64, 1);
    params.scalar_min = params.scalar_max = 1.0;
    params.noise_delta = 0.0;
    const EnrollFn enroll_fn = [&](RngStream& rng) {
        std::vector<EmbeddingVector> channels;
        for (std::uint32_t c = 0; c < params.n; ++c) {
            const auto u = random_unit_vector(params.dim, rng);
            std::vector<float> scaled;
            for (float x : u.values()) scaled.push_back(10.0f * x);
            channels.push_back(EmbeddingVector(std::move(scaled)));
        }
        const auto chaff = generate_chaff(
            ChaffSource{ChaffSource::Mode::Synthetic, params.dim, rng.next_u64(), {}},
            std::size_t(params.n) * params.m);
        return enroll_traced(make_channel_set(std::move(channels)), chaff, params, rng);
    };
    const auto result = chaff_rank_test(enroll_fn, 100, 37);
    CHECK(result.p_norm < 1e-6);
    CHECK(result.p_combined < 1e-6);
}

TEST_CASE("chaff rank test input validation") {
    const auto params = params_mnk(10, 2, 2, 8, 1);
    const EnrollFn enroll_fn = [&](RngStream& rng) { return enroll_random(params, rng); };
    CHECK_THROWS_AS(chaff_rank_test(enroll_fn, 99, 41), std::invalid_argument);

    // A chaff-free vault leaves the rank undefined.
    const EnrollFn degenerate = [&](RngStream& rng) {
        auto traced = enroll_random(params, rng);
        traced.helper.params.m = 0;
        return traced;
    };
    CHECK_THROWS_WITH_AS(chaff_rank_test(degenerate, 100, 43), doctest::Contains("rank"),
                         std::invalid_argument);
}

TEST_CASE("linkability: independent channels are unlinkable, cloned ones are not") {
    PopulationSpec spec;
    spec.num_identities = 64;
    spec.dim = 64;
    spec.n_channels = 2;
    spec.rng_seed = 47;

    spec.channel_coupling = 0.0;
    CHECK(linkability_advantage(Population(spec), 10000, 53) <= 0.05);

    spec.channel_coupling = 1.0;
    CHECK(linkability_advantage(Population(spec), 2000, 53) >= 0.9);
}

TEST_CASE("linkability grows monotonically with channel coupling") {
    // Low dimension keeps the linker's noise floor high enough that the
    // middle coupling levels stay separated from the extremes.
    PopulationSpec spec;
    spec.num_identities = 64;
    spec.dim = 16;
    spec.n_channels = 2;
    spec.rng_seed = 59;

    std::vector<double> eps;
    for (double coupling : {0.0, 0.3, 0.7, 1.0}) {
        spec.channel_coupling = coupling;
        eps.push_back(linkability_advantage(Population(spec), 4000, 61));
    }
    CHECK(eps[0] < eps[1]);
    CHECK(eps[1] < eps[2]);
    CHECK(eps[2] < eps[3]);
    CHECK(eps[3] >= 0.9);
}

TEST_CASE("linkability input validation") {
    PopulationSpec spec;
    spec.num_identities = 4;
    spec.dim = 16;
    spec.n_channels = 1;
    spec.rng_seed = 1;
    CHECK_THROWS_AS(linkability_advantage(Population(spec), 100, 1), std::invalid_argument);
}
