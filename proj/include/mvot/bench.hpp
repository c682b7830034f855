#pragma once

#include "mvot/params.hpp"
#include "mvot/sources.hpp"
#include "mvot/vault.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace mvot {

// Fixed-width histogram over [-1, 1]; bin width 0.05 resolves the score
// bands without getting noisy at 10^3 samples.
struct Histogram {
    double lo = -1.0;
    double hi = 1.0;
    double bin_width = 0.05;
    std::vector<std::uint64_t> counts = std::vector<std::uint64_t>(40, 0);
    std::uint64_t total = 0;

    void add(double x);
    // Fraction of samples whose bin lies inside [a, b].
    double mass_in(double a, double b) const;

    bool operator==(const Histogram&) const = default;
};

struct ScoreHistograms {
    Histogram genuine;
    Histogram imposter;
    Histogram chaff;
};

// Similarity-score distributions of the three query sources against the
// ground-truth latents, one sampled channel per draw.
ScoreHistograms score_histograms(const Population& population, std::uint64_t samples,
                                 std::uint64_t seed);

struct TimingBreakdown {
    double simulate_mean = 0.0, simulate_p95 = 0.0;
    double match_mean = 0.0, match_p95 = 0.0;
    double hash_mean = 0.0, hash_p95 = 0.0;
    double total_mean = 0.0, total_p95 = 0.0;
    std::uint64_t repetitions = 0;

    bool operator==(const TimingBreakdown&) const = default;
};

// Phase latencies of the verification pipeline at the given parameters.
// The hash phase is measured on a rejecting query, i.e. the full
// C(n,k)*tr^k enumeration, which is the cost an imposter attempt pays.
TimingBreakdown timing_report(const ProtocolParams& params, std::uint32_t repetitions,
                              std::uint64_t seed);

struct RocPoint {
    std::uint32_t tr = 0;
    double fpr = 0.0;
    double tpr = 0.0;
    bool operator==(const RocPoint&) const = default;
};

struct ConfigReport {
    ProtocolParams params;
    std::vector<RocPoint> roc;          // one point per swept tr, ascending
    double auc = 0.0;                   // trapezoid with (0,0) and (1,1) endpoints
    double tpr_at_tr = 0.0;             // operating point params.tr
    double fpr_at_tr = 0.0;
    double tnr_at_tr = 0.0;
    TimingBreakdown timing;             // coarse per-trial means from this run
    std::uint64_t genuine_trials = 0;
    std::uint64_t imposter_trials = 0;

    bool operator==(const ConfigReport&) const = default;
};

struct BenchConfig {
    PopulationSpec population;
    std::vector<ProtocolParams> params_grid;
    std::vector<std::uint32_t> tr_sweep;
    std::uint64_t genuine_trials = 200;
    std::uint64_t imposter_trials = 200;
    std::uint64_t rng_seed = 0;
    std::uint64_t min_trials = 100; // floor under any reported rate

    void validate() const;
};

struct BenchReport {
    std::uint64_t seed = 0;
    PopulationSpec population;
    std::vector<ConfigReport> configs;

    bool operator==(const BenchReport&) const = default;
};

// End-to-end registration ROC: every grid config is enrolled against the
// population and swept over tr. Each query is verified independently at
// each tr, so the reported monotonicity is observed, not assumed.
BenchReport run_roc(const BenchConfig& config, unsigned threads = 1);

// TPR/TNR table at each config's own operating tr (the Table-style view).
BenchReport run_table(const BenchConfig& config, unsigned threads = 1);

// AUC of a ROC point set (sorted by fpr ascending) with pinned endpoints.
double roc_auc(const std::vector<RocPoint>& points);

enum class ReportFormat { Json, Csv };

// Json: one self-describing file. Csv: `path` is a directory receiving
// roc.csv, table.csv and timing.csv.
void emit_report(const BenchReport& report, const std::string& path, ReportFormat format);

void write_roc_csv(const ConfigReport& config, const std::string& path);
void write_table_csv(const BenchReport& report, const std::string& path);
void write_timing_csv(const TimingBreakdown& timing, const std::string& path);
void write_histogram_csv(const Histogram& hist, const std::string& path);

} // namespace mvot
