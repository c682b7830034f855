#include "mvot/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace mvot {

namespace {

void expect_schema(const Json& j, const std::string& schema) {
    if (j.contains("schema") && j.at("schema").get<std::string>() != schema)
        throw std::runtime_error("expected schema '" + schema + "', found '" +
                                 j.at("schema").get<std::string>() + "'");
}

Json dist_to_json(const DistSpec& d) {
    return Json{{"mean", d.mean}, {"std", d.stddev}, {"lo", d.lo}, {"hi", d.hi}};
}

DistSpec dist_from_json(const Json& j) {
    DistSpec d;
    d.mean = j.at("mean").get<double>();
    d.stddev = j.at("std").get<double>();
    d.lo = j.at("lo").get<double>();
    d.hi = j.at("hi").get<double>();
    return d;
}

} // namespace

Json params_to_json(const ProtocolParams& p) {
    return Json{{"schema", "mvot-params/1"},
                {"gamma", p.gamma},
                {"n", p.n},
                {"m", p.m},
                {"k", p.k},
                {"tr", p.tr},
                {"dim", p.dim},
                {"scalar_range", Json::array({p.scalar_min, p.scalar_max})},
                {"noise_delta", p.noise_delta},
                {"hash_version", p.hash_version}};
}

ProtocolParams params_from_json(const Json& j) {
    expect_schema(j, "mvot-params/1");
    ProtocolParams p;
    p.gamma = j.at("gamma").get<std::uint32_t>();
    p.n = j.at("n").get<std::uint32_t>();
    p.m = j.at("m").get<std::uint32_t>();
    p.k = j.at("k").get<std::uint32_t>();
    p.tr = j.at("tr").get<std::uint32_t>();
    p.dim = j.at("dim").get<std::uint32_t>();
    const auto& range = j.at("scalar_range");
    if (!range.is_array() || range.size() != 2)
        throw std::runtime_error("params: scalar_range must be [min, max]");
    p.scalar_min = range[0].get<double>();
    p.scalar_max = range[1].get<double>();
    p.noise_delta = j.at("noise_delta").get<double>();
    p.hash_version = j.value("hash_version", kHashVersionSha256);
    p.validate();
    return p;
}

void write_params_file(const std::string& path, const ProtocolParams& params) {
    write_json_file(path, params_to_json(params));
}

ProtocolParams read_params_file(const std::string& path) {
    return params_from_json(load_json_file(path));
}

Json population_to_json(const PopulationSpec& s) {
    return Json{{"schema", "mvot-population/1"},
                {"num_identities", s.num_identities},
                {"dim", s.dim},
                {"n_channels", s.n_channels},
                {"genuine_cos", dist_to_json(s.genuine_cos)},
                {"imposter_cos", dist_to_json(s.imposter_cos)},
                {"unrelated_cos", dist_to_json(s.unrelated_cos)},
                {"channel_coupling", s.channel_coupling},
                {"rng_seed", s.rng_seed}};
}

PopulationSpec population_from_json(const Json& j) {
    expect_schema(j, "mvot-population/1");
    PopulationSpec s;
    s.num_identities = j.at("num_identities").get<std::uint32_t>();
    s.dim = j.at("dim").get<std::uint32_t>();
    s.n_channels = j.at("n_channels").get<std::uint32_t>();
    s.genuine_cos = dist_from_json(j.at("genuine_cos"));
    s.imposter_cos = dist_from_json(j.at("imposter_cos"));
    s.unrelated_cos = dist_from_json(j.at("unrelated_cos"));
    s.channel_coupling = j.value("channel_coupling", 0.0);
    s.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    s.validate();
    return s;
}

Json bench_config_to_json(const BenchConfig& c) {
    Json grid = Json::array();
    for (const auto& p : c.params_grid) grid.push_back(params_to_json(p));
    return Json{{"schema", "mvot-bench/1"},
                {"population", population_to_json(c.population)},
                {"params_grid", grid},
                {"tr_sweep", c.tr_sweep},
                {"genuine_trials", c.genuine_trials},
                {"imposter_trials", c.imposter_trials},
                {"rng_seed", c.rng_seed}};
}

BenchConfig bench_config_from_json(const Json& j) {
    expect_schema(j, "mvot-bench/1");
    BenchConfig c;
    c.population = population_from_json(j.at("population"));
    c.params_grid.clear();
    for (const auto& p : j.at("params_grid")) c.params_grid.push_back(params_from_json(p));
    c.tr_sweep = j.at("tr_sweep").get<std::vector<std::uint32_t>>();
    c.genuine_trials = j.at("genuine_trials").get<std::uint64_t>();
    c.imposter_trials = j.at("imposter_trials").get<std::uint64_t>();
    c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    c.validate();
    return c;
}

Json timing_to_json(const TimingBreakdown& t) {
    return Json{{"repetitions", t.repetitions},
                {"simulate_mean_s", t.simulate_mean},
                {"simulate_p95_s", t.simulate_p95},
                {"match_mean_s", t.match_mean},
                {"match_p95_s", t.match_p95},
                {"hash_mean_s", t.hash_mean},
                {"hash_p95_s", t.hash_p95},
                {"total_mean_s", t.total_mean},
                {"total_p95_s", t.total_p95}};
}

TimingBreakdown timing_from_json(const Json& j) {
    TimingBreakdown t;
    t.repetitions = j.at("repetitions").get<std::uint64_t>();
    t.simulate_mean = j.at("simulate_mean_s").get<double>();
    t.simulate_p95 = j.at("simulate_p95_s").get<double>();
    t.match_mean = j.at("match_mean_s").get<double>();
    t.match_p95 = j.at("match_p95_s").get<double>();
    t.hash_mean = j.at("hash_mean_s").get<double>();
    t.hash_p95 = j.at("hash_p95_s").get<double>();
    t.total_mean = j.at("total_mean_s").get<double>();
    t.total_p95 = j.at("total_p95_s").get<double>();
    return t;
}

Json report_to_json(const BenchReport& r) {
    Json configs = Json::array();
    for (const auto& c : r.configs) {
        Json roc = Json::array();
        for (const auto& p : c.roc)
            roc.push_back(Json{{"tr", p.tr}, {"fpr", p.fpr}, {"tpr", p.tpr}});
        configs.push_back(Json{{"params", params_to_json(c.params)},
                               {"roc", roc},
                               {"auc", c.auc},
                               {"tpr", c.tpr_at_tr},
                               {"fpr", c.fpr_at_tr},
                               {"tnr", c.tnr_at_tr},
                               {"timing", timing_to_json(c.timing)},
                               {"genuine_trials", c.genuine_trials},
                               {"imposter_trials", c.imposter_trials}});
    }
    return Json{{"schema", "mvot-report/1"},
                {"seed", r.seed},
                {"population", population_to_json(r.population)},
                {"configs", configs}};
}

BenchReport report_from_json(const Json& j) {
    expect_schema(j, "mvot-report/1");
    BenchReport r;
    r.seed = j.at("seed").get<std::uint64_t>();
    r.population = population_from_json(j.at("population"));
    for (const auto& cj : j.at("configs")) {
        ConfigReport c;
        c.params = params_from_json(cj.at("params"));
        for (const auto& pj : cj.at("roc")) {
            RocPoint p;
            p.tr = pj.at("tr").get<std::uint32_t>();
            p.fpr = pj.at("fpr").get<double>();
            p.tpr = pj.at("tpr").get<double>();
            c.roc.push_back(p);
        }
        c.auc = cj.at("auc").get<double>();
        c.tpr_at_tr = cj.at("tpr").get<double>();
        c.fpr_at_tr = cj.at("fpr").get<double>();
        c.tnr_at_tr = cj.at("tnr").get<double>();
        c.timing = timing_from_json(cj.at("timing"));
        c.genuine_trials = cj.at("genuine_trials").get<std::uint64_t>();
        c.imposter_trials = cj.at("imposter_trials").get<std::uint64_t>();
        r.configs.push_back(std::move(c));
    }
    return r;
}

Json far_to_json(const FarEstimate& est) {
    return Json{{"accepts", est.accepts},
                {"trials", est.trials},
                {"point_estimate", est.point_estimate},
                {"wilson_95_lo", est.wilson_lo},
                {"wilson_95_hi", est.wilson_hi},
                {"analytic_bound", est.analytic_bound}};
}

Json work_factor_to_json(const WorkFactorReport& report) {
    return Json{{"naive_bits", report.naive_bits},
                {"refined_bits", report.refined_bits},
                {"expected_tries", report.expected_tries}};
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("failed to parse '" + path + "': " + e.what());
    }
    return j;
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

} // namespace mvot
