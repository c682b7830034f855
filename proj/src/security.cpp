#include "mvot/security.hpp"

#include "mvot/parallel.hpp"
#include "mvot/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace mvot {

WorkFactorReport work_factor(const ProtocolParams& params) {
    params.validate();
    WorkFactorReport report;
    const double log2_m = std::log2(double(params.m));
    report.naive_bits = double(params.n) * log2_m;
    report.refined_bits = log2_binomial(params.n, params.k) + double(params.k) * log2_m;
    const double total =
        double(binomial(params.n, params.k)) *
        std::pow(double(params.m) + 1.0, double(params.k));
    report.expected_tries = (total + 1.0) / 2.0;
    return report;
}

AttackResult brute_force_attack(const HelperData& helper, RngStream& rng, double budget) {
    const ProtocolParams& p = helper.params;
    const std::uint64_t subsets = binomial(p.n, p.k);
    const double tuples_per_subset = std::pow(double(p.m) + 1.0, double(p.k));
    const double total = double(subsets) * tuples_per_subset;
    if (total > budget) {
        char msg[160];
        std::snprintf(msg, sizeof msg,
                      "brute_force_attack: %.0f candidate tuples (%.1f bits of work) exceed "
                      "the budget of %.0f hash evaluations",
                      total, work_factor(p).naive_bits, budget);
        throw std::invalid_argument(msg);
    }

    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t per_subset = std::uint64_t(tuples_per_subset);
    const std::uint64_t count = subsets * per_subset;

    std::vector<std::uint64_t> order(count);
    std::iota(order.begin(), order.end(), std::uint64_t{0});
    for (std::uint64_t i = count; i > 1; --i) {
        const std::uint64_t j = rng.uniform_index(i);
        std::swap(order[i - 1], order[j]);
    }

    std::vector<SubsetKey> subset_keys;
    subset_keys.reserve(helper.commitments.size());
    std::vector<const TupleHash*> digests;
    for (const auto& [subset, digest] : helper.commitments) {
        subset_keys.push_back(subset);
        digests.push_back(&digest);
    }

    // Entry bytes are reused across candidates; precompute them all.
    std::vector<std::vector<CanonicalBytes>> entry_bytes(p.n);
    for (std::uint32_t v = 0; v < p.n; ++v)
        for (const auto& e : helper.vaults[v].entries)
            entry_bytes[v].push_back(canonical_encode(e));

    AttackResult result;
    std::vector<CanonicalBytes> tuple(p.k);
    for (std::uint64_t candidate : order) {
        const std::uint64_t subset_idx = candidate / per_subset;
        std::uint64_t rest = candidate % per_subset;
        const SubsetKey& subset = subset_keys[subset_idx];
        for (std::uint32_t d = 0; d < p.k; ++d) {
            const std::uint64_t pick = rest % (std::uint64_t(p.m) + 1);
            rest /= std::uint64_t(p.m) + 1;
            tuple[d] = entry_bytes[subset[d]][pick];
        }
        ++result.tries_to_success;
        if (hash_entry_tuple(subset, tuple, helper.salt) == *digests[subset_idx]) {
            result.succeeded = true;
            break;
        }
    }
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!result.succeeded)
        throw std::logic_error("brute_force_attack: enumeration missed the committed tuple");
    return result;
}

FarEstimate far_attack_probability(const ProtocolParams& params, const PopulationSpec& population,
                                   std::uint64_t trials, std::uint64_t seed, unsigned threads) {
    if (trials < 1) throw std::invalid_argument("far_attack_probability: trials must be >= 1");
    params.validate();
    PopulationSpec spec = population;
    spec.validate();
    if (spec.dim != params.dim || spec.n_channels != params.n)
        throw std::invalid_argument("far_attack_probability: population does not match params");

    RngStream root(seed);
    Population pop(spec);
    ChaffSource chaff{ChaffSource::Mode::Synthetic, params.dim, root.next_u64(), {}};
    RngStream enroll_rng = root.child(~std::uint64_t{0});
    const HelperData helper = enroll(pop.latents_of(0), chaff, params, enroll_rng);

    std::vector<std::uint8_t> accepted(trials, 0);
    parallel_for(std::size_t(trials), threads, [&](std::size_t t) {
        RngStream rng = root.child(t);
        const ChannelSet probe = pop.unrelated_query(rng);
        accepted[t] = verify(helper, probe).accepted ? 1 : 0;
    });

    FarEstimate est;
    est.trials = trials;
    for (auto a : accepted) est.accepts += a;
    est.point_estimate = double(est.accepts) / double(trials);
    const auto ci = stats::wilson_interval(est.accepts, trials);
    est.wilson_lo = ci.lo;
    est.wilson_hi = ci.hi;
    est.analytic_bound =
        std::min(1.0, double(binomial(params.n, params.k)) *
                          std::pow(double(params.tr) / (double(params.m) + 1.0),
                                   double(params.k)));
    return est;
}

namespace {

// Decile bin of a 0-based rank among `count` entries, plus the exact
// expected occupancy of each decile (counts need not divide evenly by 10).
std::size_t rank_decile(std::size_t rank, std::size_t count) {
    return std::min<std::size_t>(9, rank * 10 / count);
}

std::array<double, 10> decile_expectation(std::size_t count, double samples) {
    std::array<double, 10> expected{};
    for (std::size_t r = 0; r < count; ++r) expected[rank_decile(r, count)] += 1.0;
    for (auto& e : expected) e *= samples / double(count);
    return expected;
}

} // namespace

RankTestResult chaff_rank_test(const EnrollFn& enroll_fn, std::uint64_t trials,
                               std::uint64_t seed) {
    if (trials < 100)
        throw std::invalid_argument("chaff_rank_test: need at least 100 trials");

    RngStream root(seed);
    std::array<std::uint64_t, 10> norm_bins{};
    std::array<std::uint64_t, 10> cos_bins{};
    std::uint64_t samples = 0;
    std::size_t vault_size = 0;

    for (std::uint64_t t = 0; t < trials; ++t) {
        RngStream rng = root.child(t);
        const TracedEnrollment traced = enroll_fn(rng);
        const HelperData& helper = traced.helper;
        if (helper.params.m < 1)
            throw std::invalid_argument("chaff_rank_test: rank undefined for chaff-free vaults");
        if (traced.trace.template_positions.size() != helper.vaults.size())
            throw std::invalid_argument("chaff_rank_test: trace does not cover all vaults");
        if (vault_size != 0 && vault_size != std::size_t(helper.params.m) + 1)
            throw std::invalid_argument("chaff_rank_test: vault size changed between trials");
        vault_size = std::size_t(helper.params.m) + 1;

        for (std::size_t v = 0; v < helper.vaults.size(); ++v) {
            const auto& entries = helper.vaults[v].entries;
            const std::size_t tpl = traced.trace.template_positions[v];

            // Norm statistic.
            std::size_t norm_rank = 0;
            for (std::size_t j = 0; j < entries.size(); ++j) {
                if (j == tpl) continue;
                if (entries[j].norm() < entries[tpl].norm() ||
                    (entries[j].norm() == entries[tpl].norm() && j < tpl))
                    ++norm_rank;
            }

            // Mean cosine to the rest of the vault, via the sum of unit
            // vectors: mean_j cos(e, e_j) = (unit(e).S - 1) / m.
            std::vector<double> sum(entries.front().dim(), 0.0);
            for (const auto& e : entries)
                for (std::size_t i = 0; i < e.dim(); ++i) sum[i] += double(e[i]) / e.norm();
            std::vector<double> stat(entries.size());
            for (std::size_t j = 0; j < entries.size(); ++j) {
                double dot_sum = 0.0;
                for (std::size_t i = 0; i < entries[j].dim(); ++i)
                    dot_sum += double(entries[j][i]) / entries[j].norm() * sum[i];
                stat[j] = (dot_sum - 1.0) / double(helper.params.m);
            }
            std::size_t cos_rank = 0;
            for (std::size_t j = 0; j < entries.size(); ++j) {
                if (j == tpl) continue;
                if (stat[j] < stat[tpl] || (stat[j] == stat[tpl] && j < tpl)) ++cos_rank;
            }

            ++norm_bins[rank_decile(norm_rank, entries.size())];
            ++cos_bins[rank_decile(cos_rank, entries.size())];
            ++samples;
        }
    }

    const auto expected = decile_expectation(vault_size, double(samples));
    RankTestResult result;
    result.samples = samples;
    result.p_norm = stats::chi_square_uniformity_p(norm_bins, expected);
    result.p_mean_cos = stats::chi_square_uniformity_p(cos_bins, expected);
    result.p_combined = std::min(1.0, 2.0 * std::min(result.p_norm, result.p_mean_cos));
    return result;
}

double linkability_advantage(const Population& population, std::uint64_t trials,
                             std::uint64_t seed, unsigned threads) {
    if (trials < 1) throw std::invalid_argument("linkability_advantage: trials must be >= 1");
    if (population.n_channels() < 2)
        throw std::invalid_argument("linkability_advantage: population needs >= 2 channels");
    if (population.num_identities() < 2)
        throw std::invalid_argument("linkability_advantage: population needs >= 2 identities");

    RngStream root(seed);
    std::vector<std::uint8_t> correct(trials, 0);
    parallel_for(std::size_t(trials), threads, [&](std::size_t t) {
        RngStream rng = root.child(t);
        const std::uint32_t a = std::uint32_t(rng.uniform_index(population.num_identities()));
        std::uint32_t b = std::uint32_t(rng.uniform_index(population.num_identities() - 1));
        if (b >= a) ++b;
        const auto& anchor = population.latent(a, 0);
        const double cos_same = cosine_similarity(anchor, population.latent(a, 1));
        const double cos_other = cosine_similarity(anchor, population.latent(b, 1));
        correct[t] = cos_same > cos_other ? 1 : 0;
    });
    std::uint64_t wins = 0;
    for (auto c : correct) wins += c;
    return std::fabs(2.0 * double(wins) / double(trials) - 1.0);
}

} // namespace mvot
