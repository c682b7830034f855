#include "mvot/bench.hpp"

#include "mvot/json_io.hpp"
#include "mvot/parallel.hpp"
#include "mvot/stats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace mvot {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

} // namespace

void Histogram::add(double x) {
    if (x < lo || x > hi) throw std::invalid_argument("histogram: value out of range");
    auto bin = std::size_t((x - lo) / bin_width);
    if (bin >= counts.size()) bin = counts.size() - 1; // x == hi
    ++counts[bin];
    ++total;
}

double Histogram::mass_in(double a, double b) const {
    if (total == 0) return 0.0;
    std::uint64_t inside = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double bin_lo = lo + double(i) * bin_width;
        const double bin_hi = bin_lo + bin_width;
        if (bin_lo >= a - 1e-12 && bin_hi <= b + 1e-12) inside += counts[i];
    }
    return double(inside) / double(total);
}

ScoreHistograms score_histograms(const Population& population, std::uint64_t samples,
                                 std::uint64_t seed) {
    if (samples < 1000)
        throw std::invalid_argument("score_histograms: need at least 1000 samples");
    const PopulationSpec& spec = population.spec();
    ScoreHistograms out;
    RngStream root(seed);
    for (std::uint64_t s = 0; s < samples; ++s) {
        RngStream rng = root.child(s);
        const auto id = std::uint32_t(rng.uniform_index(spec.num_identities));
        const auto ch = std::uint32_t(rng.uniform_index(spec.n_channels));
        const EmbeddingVector& u = population.latent(id, ch);

        const double rho_g = spec.genuine_cos.sample(rng);
        out.genuine.add(cosine_similarity(unit_vector_with_cosine(u, rho_g, rng), u));

        if (spec.num_identities >= 2) {
            auto other = std::uint32_t(rng.uniform_index(spec.num_identities - 1));
            if (other >= id) ++other;
            const double rho_i = spec.imposter_cos.sample(rng);
            out.imposter.add(cosine_similarity(
                unit_vector_with_cosine_towards(u, rho_i, population.latent(other, ch), rng), u));
        }

        out.chaff.add(cosine_similarity(random_unit_vector(spec.dim, rng), u));
    }
    return out;
}

void BenchConfig::validate() const {
    population.validate();
    if (params_grid.empty()) throw std::invalid_argument("bench: params grid must be non-empty");
    for (const auto& p : params_grid) {
        p.validate();
        if (p.dim != population.dim || p.n != population.n_channels)
            throw std::invalid_argument("bench: params do not match the population shape");
    }
    if (tr_sweep.empty()) throw std::invalid_argument("bench: tr sweep must be non-empty");
    if (genuine_trials < min_trials || imposter_trials < min_trials)
        throw std::invalid_argument("bench: trial counts below the reporting floor of " +
                                    std::to_string(min_trials));
    if (imposter_trials > 0 && population.num_identities < 2)
        throw std::invalid_argument("bench: imposter trials need at least two identities");
}

double roc_auc(const std::vector<RocPoint>& points) {
    std::vector<std::pair<double, double>> xy;
    xy.reserve(points.size() + 2);
    xy.emplace_back(0.0, 0.0);
    for (const auto& p : points) xy.emplace_back(p.fpr, p.tpr);
    xy.emplace_back(1.0, 1.0);
    std::sort(xy.begin(), xy.end());
    return stats::trapezoid_area(xy);
}

namespace {

ConfigReport run_one_config(const ProtocolParams& params, const Population& population,
                            const std::vector<std::uint32_t>& sweep, std::uint64_t genuine_trials,
                            std::uint64_t imposter_trials, RngStream& root, unsigned threads) {
    // Evaluation points: the sweep plus the operating tr.
    std::vector<std::uint32_t> eval_trs(sweep);
    eval_trs.push_back(params.tr);
    std::sort(eval_trs.begin(), eval_trs.end());
    eval_trs.erase(std::unique(eval_trs.begin(), eval_trs.end()), eval_trs.end());
    for (std::uint32_t tr : eval_trs)
        if (tr < 1 || tr > params.m + 1)
            throw std::invalid_argument("bench: swept tr out of range for m");

    // One enrollment per identity; queries round-robin over them.
    const std::uint32_t enrollees = population.num_identities();
    std::vector<HelperData> helpers;
    helpers.reserve(enrollees);
    for (std::uint32_t id = 0; id < enrollees; ++id) {
        ChaffSource chaff{ChaffSource::Mode::Synthetic, params.dim, root.next_u64(), {}};
        RngStream enroll_rng = root.child(0x100000 + id);
        helpers.push_back(enroll(population.latents_of(id), chaff, params, enroll_rng));
    }

    const std::size_t trials = std::size_t(genuine_trials + imposter_trials);
    std::vector<std::vector<std::uint8_t>> accept(eval_trs.size(),
                                                  std::vector<std::uint8_t>(trials, 0));
    std::vector<double> sim_s(trials), match_s(trials), hash_s(trials), total_s(trials);

    parallel_for(trials, threads, [&](std::size_t t) {
        const bool genuine = t < genuine_trials;
        RngStream rng = root.child(0x200000 + t);
        const std::uint32_t id = std::uint32_t(t % enrollees);

        const auto t0 = Clock::now();
        const ChannelSet query = genuine ? population.genuine_query(id, rng)
                                         : population.imposter_query(id, rng);
        sim_s[t] = seconds_since(t0);

        for (std::size_t i = 0; i < eval_trs.size(); ++i) {
            const VerifyResult res = verify(helpers[id], query, eval_trs[i]);
            accept[i][t] = res.accepted ? 1 : 0;
            if (eval_trs[i] == params.tr) {
                match_s[t] = res.match_seconds;
                hash_s[t] = res.hash_seconds;
                total_s[t] = sim_s[t] + res.match_seconds + res.hash_seconds;
            }
        }
    });

    ConfigReport report;
    report.params = params;
    report.genuine_trials = genuine_trials;
    report.imposter_trials = imposter_trials;
    for (std::size_t i = 0; i < eval_trs.size(); ++i) {
        std::uint64_t tp = 0, fp = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            if (t < genuine_trials) tp += accept[i][t];
            else fp += accept[i][t];
        }
        const double tpr = genuine_trials ? double(tp) / double(genuine_trials) : 0.0;
        const double fpr = imposter_trials ? double(fp) / double(imposter_trials) : 0.0;
        if (std::find(sweep.begin(), sweep.end(), eval_trs[i]) != sweep.end())
            report.roc.push_back(RocPoint{eval_trs[i], fpr, tpr});
        if (eval_trs[i] == params.tr) {
            report.tpr_at_tr = tpr;
            report.fpr_at_tr = fpr;
            report.tnr_at_tr = 1.0 - fpr;
        }
    }
    std::sort(report.roc.begin(), report.roc.end(),
              [](const RocPoint& a, const RocPoint& b) { return a.tr < b.tr; });
    report.auc = roc_auc(report.roc);

    report.timing.repetitions = trials;
    report.timing.simulate_mean = stats::mean(sim_s);
    report.timing.simulate_p95 = stats::percentile(sim_s, 95.0);
    report.timing.match_mean = stats::mean(match_s);
    report.timing.match_p95 = stats::percentile(match_s, 95.0);
    report.timing.hash_mean = stats::mean(hash_s);
    report.timing.hash_p95 = stats::percentile(hash_s, 95.0);
    report.timing.total_mean = stats::mean(total_s);
    report.timing.total_p95 = stats::percentile(total_s, 95.0);
    return report;
}

BenchReport run_bench(const BenchConfig& config, bool sweep_tr, unsigned threads) {
    config.validate();
    BenchReport report;
    report.seed = config.rng_seed;
    report.population = config.population;
    const Population population(config.population);
    RngStream root(config.rng_seed);
    for (std::size_t c = 0; c < config.params_grid.size(); ++c) {
        const ProtocolParams& params = config.params_grid[c];
        const std::vector<std::uint32_t> sweep =
            sweep_tr ? config.tr_sweep : std::vector<std::uint32_t>{params.tr};
        RngStream config_root = root.child(0xbe000000ULL + c);
        report.configs.push_back(run_one_config(params, population, sweep,
                                                config.genuine_trials, config.imposter_trials,
                                                config_root, threads));
    }
    return report;
}

} // namespace

BenchReport run_roc(const BenchConfig& config, unsigned threads) {
    return run_bench(config, true, threads);
}

BenchReport run_table(const BenchConfig& config, unsigned threads) {
    return run_bench(config, false, threads);
}

TimingBreakdown timing_report(const ProtocolParams& params, std::uint32_t repetitions,
                              std::uint64_t seed) {
    if (repetitions < 10)
        throw std::invalid_argument("timing_report: need at least 10 repetitions");
    params.validate();

    PopulationSpec spec;
    spec.num_identities = 1;
    spec.dim = params.dim;
    spec.n_channels = params.n;
    spec.rng_seed = splitmix64(seed);
    const Population population(spec);

    RngStream root(seed);
    ChaffSource chaff{ChaffSource::Mode::Synthetic, params.dim, root.next_u64(), {}};
    RngStream enroll_rng = root.child(~std::uint64_t{0});
    const HelperData helper = enroll(population.latents_of(0), chaff, params, enroll_rng);

    std::vector<double> sim_s, match_s, hash_s, total_s;
    for (std::uint32_t rep = 0; rep < repetitions; ++rep) {
        RngStream rng = root.child(rep);

        const auto t0 = Clock::now();
        const ChannelSet genuine = population.genuine_query(0, rng);
        const double sim = seconds_since(t0);
        const VerifyResult accept_run = verify(helper, genuine);

        // A rejecting probe pays for the full tuple enumeration; that is the
        // hash cost worth reporting.
        const ChannelSet probe = population.unrelated_query(rng);
        const VerifyResult reject_run = verify(helper, probe);

        sim_s.push_back(sim);
        match_s.push_back(accept_run.match_seconds);
        hash_s.push_back(reject_run.hash_seconds);
        total_s.push_back(sim + accept_run.match_seconds + accept_run.hash_seconds);
    }

    TimingBreakdown out;
    out.repetitions = repetitions;
    out.simulate_mean = stats::mean(sim_s);
    out.simulate_p95 = stats::percentile(sim_s, 95.0);
    out.match_mean = stats::mean(match_s);
    out.match_p95 = stats::percentile(match_s, 95.0);
    out.hash_mean = stats::mean(hash_s);
    out.hash_p95 = stats::percentile(hash_s, 95.0);
    out.total_mean = stats::mean(total_s);
    out.total_p95 = stats::percentile(total_s, 95.0);
    return out;
}

// --- report output ----------------------------------------------------------

void write_roc_csv(const ConfigReport& config, const std::string& path) {
    std::string text = "fpr,tpr,tr\n";
    char line[96];
    for (const auto& p : config.roc) {
        std::snprintf(line, sizeof line, "%.10g,%.10g,%u\n", p.fpr, p.tpr, p.tr);
        text += line;
    }
    write_text_file(path, text);
}

void write_table_csv(const BenchReport& report, const std::string& path) {
    std::string text = "m,k,tr,tpr,tnr,fpr,auc,genuine_trials,imposter_trials,seed\n";
    char line[192];
    for (const auto& c : report.configs) {
        std::snprintf(line, sizeof line, "%u,%u,%u,%.10g,%.10g,%.10g,%.10g,%llu,%llu,%llu\n",
                      c.params.m, c.params.k, c.params.tr, c.tpr_at_tr, c.tnr_at_tr, c.fpr_at_tr,
                      c.auc, static_cast<unsigned long long>(c.genuine_trials),
                      static_cast<unsigned long long>(c.imposter_trials),
                      static_cast<unsigned long long>(report.seed));
        text += line;
    }
    write_text_file(path, text);
}

void write_timing_csv(const TimingBreakdown& timing, const std::string& path) {
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "phase,mean_seconds,p95_seconds\n"
                  "simulate,%.9f,%.9f\n"
                  "match,%.9f,%.9f\n"
                  "hash,%.9f,%.9f\n"
                  "total,%.9f,%.9f\n",
                  timing.simulate_mean, timing.simulate_p95, timing.match_mean, timing.match_p95,
                  timing.hash_mean, timing.hash_p95, timing.total_mean, timing.total_p95);
    write_text_file(path, buf);
}

void write_histogram_csv(const Histogram& hist, const std::string& path) {
    std::string text = "bin_lo,bin_hi,count,fraction\n";
    char line[96];
    for (std::size_t i = 0; i < hist.counts.size(); ++i) {
        const double bin_lo = hist.lo + double(i) * hist.bin_width;
        const double frac = hist.total ? double(hist.counts[i]) / double(hist.total) : 0.0;
        std::snprintf(line, sizeof line, "%.4g,%.4g,%llu,%.10g\n", bin_lo, bin_lo + hist.bin_width,
                      static_cast<unsigned long long>(hist.counts[i]), frac);
        text += line;
    }
    write_text_file(path, text);
}

void emit_report(const BenchReport& report, const std::string& path, ReportFormat format) {
    if (format == ReportFormat::Json) {
        write_text_file(path, report_to_json(report).dump(2) + "\n");
        return;
    }
    if (report.configs.empty()) throw std::invalid_argument("emit_report: empty report");
    write_roc_csv(report.configs.front(), path + "/roc.csv");
    write_table_csv(report, path + "/table.csv");
    write_timing_csv(report.configs.front().timing, path + "/timing.csv");
}

} // namespace mvot
