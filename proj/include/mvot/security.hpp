#pragma once

#include "mvot/params.hpp"
#include "mvot/sources.hpp"
#include "mvot/vault.hpp"

#include <cstdint>
#include <functional>

namespace mvot {

// Default ceiling on brute-force hash evaluations; above it the simulator
// refuses to run, which is the point at production parameters.
inline constexpr double kDefaultAttackBudget = double(1u << 24);

struct WorkFactorReport {
    double naive_bits = 0.0;      // log2(m^n), cost of defeating all n vaults
    double refined_bits = 0.0;    // log2(C(n,k) * m^k), cost against the k-of-n relaxation
    double expected_tries = 0.0;  // (C(n,k) * (m+1)^k + 1) / 2 under random search
};

WorkFactorReport work_factor(const ProtocolParams& params);

struct AttackResult {
    std::uint64_t tries_to_success = 0;
    bool succeeded = false;
    double wall_seconds = 0.0;
};

// Exhaustive commitment search in uniformly random order over every
// candidate tuple (C(n,k) subsets x (m+1)^k entry choices). Success is
// guaranteed within the enumeration; Throws if the space exceeds `budget`,
// quoting the work factor.
AttackResult brute_force_attack(const HelperData& helper, RngStream& rng,
                                double budget = kDefaultAttackBudget);

struct FarEstimate {
    std::uint64_t accepts = 0;
    std::uint64_t trials = 0;
    double point_estimate = 0.0;
    double wilson_lo = 0.0;
    double wilson_hi = 0.0;
    double analytic_bound = 0.0; // min(1, C(n,k) * (tr/(m+1))^k)
};

// Monte-Carlo false-accept probability of one fixed enrollment against
// unrelated queries. Deterministic per seed; trials may run on `threads`.
FarEstimate far_attack_probability(const ProtocolParams& params, const PopulationSpec& population,
                                   std::uint64_t trials, std::uint64_t seed,
                                   unsigned threads = 1);

struct RankTestResult {
    double p_norm = 0.0;     // uniformity of the template's norm rank
    double p_mean_cos = 0.0; // uniformity of its mean-cosine-to-vault rank
    double p_combined = 0.0; // Bonferroni over the two statistics
    std::uint64_t samples = 0;
};

using EnrollFn = std::function<TracedEnrollment(RngStream&)>;

// Distinguisher check for the hiding claim: across `trials` enrollments,
// ranks the true sub-template inside each vault by entry norm and by mean
// cosine to the rest of the vault. If the stored record hides the template,
// both ranks are uniform; the chi-square p-values say how far from uniform
// they look. Requires trials >= 100 and at least one chaff entry per vault.
RankTestResult chaff_rank_test(const EnrollFn& enroll_fn, std::uint64_t trials,
                               std::uint64_t seed);

// Empirical advantage (|2p - 1|) of a cosine linker that must decide which
// of two channel-B vectors belongs to the identity behind a channel-A
// vector. Independent channels give ~0, cloned channels ~1.
double linkability_advantage(const Population& population, std::uint64_t trials,
                             std::uint64_t seed, unsigned threads = 1);

} // namespace mvot
