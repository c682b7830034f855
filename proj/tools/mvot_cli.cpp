// mvot: multi-vault obfuscated template toolkit.
//
// Subcommands: keygen, enroll, verify, bench, attack, simulate. All
// structured output is JSON (stdout) or CSV (bench artifacts); the vault
// container is the only binary format. Every run echoes its resolved
// configuration and seed so results can be reproduced exactly.
//
// Exit codes: 0 success/accept, 1 reject or refused operation, 2 usage
// error, 3 I/O or format error.

#include <CLI11.hpp>

#include "mvot/bench.hpp"
#include "mvot/json_io.hpp"
#include "mvot/security.hpp"
#include "mvot/serialize.hpp"
#include "mvot/sources.hpp"
#include "mvot/vault.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <random>
#include <string>

namespace {

using namespace mvot;

constexpr int kExitAccept = 0;
constexpr int kExitReject = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

// Synthetic identities are a fixture: latents depend only on the identity
// number (not on --seed), so a vault enrolled today verifies against the
// same synthetic identity tomorrow.
constexpr std::uint64_t kSyntheticIdentityBase = 0x6d766f74u; // "mvot"

EmbeddingVector synthetic_latent(std::uint64_t identity, std::uint32_t channel,
                                 std::uint32_t dim) {
    RngStream rng(splitmix64(kSyntheticIdentityBase ^
                             splitmix64(identity * 0x10001ULL + channel)));
    return random_unit_vector(dim, rng);
}

ChannelSet synthetic_channels(std::uint64_t identity, std::uint32_t n, std::uint32_t dim) {
    std::vector<EmbeddingVector> channels;
    channels.reserve(n);
    for (std::uint32_t c = 0; c < n; ++c) channels.push_back(synthetic_latent(identity, c, dim));
    return make_channel_set(std::move(channels));
}

// Template/query source grammar: "synthetic:<id>" or "<path>:<identity>".
ChannelSet load_channels(const std::string& source, std::uint32_t n, std::uint32_t dim) {
    if (source.rfind("synthetic:", 0) == 0) {
        const std::string id_str = source.substr(10);
        std::size_t used = 0;
        std::uint64_t id = 0;
        try {
            id = std::stoull(id_str, &used);
        } catch (...) {
            used = 0;
        }
        if (used != id_str.size() || id_str.empty())
            throw std::invalid_argument("bad synthetic identity '" + id_str + "'");
        return synthetic_channels(id, n, dim);
    }
    const auto colon = source.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == source.size())
        throw std::invalid_argument(
            "source must be 'synthetic:<id>' or '<file>:<identity>', got '" + source + "'");
    const std::string path = source.substr(0, colon);
    const std::string identity = source.substr(colon + 1);
    return channels_from_table(ingest_embeddings(path, dim), identity, n);
}

ChaffSource parse_chaff(const std::string& source, std::uint32_t dim, std::uint64_t seed) {
    if (source == "synthetic")
        return ChaffSource{ChaffSource::Mode::Synthetic, dim, splitmix64(seed ^ 0xc4affULL), {}};
    return ChaffSource{ChaffSource::Mode::FileBacked, dim, 0, source};
}

struct GlobalOptions {
    std::uint64_t seed = 0;
    bool seed_given = false;
    unsigned threads = 0;
    std::string config_path;

    std::uint64_t effective_seed() {
        if (!seed_given) {
            std::random_device rd;
            seed = (std::uint64_t(rd()) << 32) ^ rd();
            seed_given = true;
        }
        return seed;
    }

    std::optional<Json> config() const {
        std::string path = config_path;
        if (path.empty()) {
            if (const char* env = std::getenv("MVOT_CONFIG")) path = env;
        }
        if (path.empty()) return std::nullopt;
        return load_json_file(path);
    }
};

void print_json(const Json& j) { std::cout << j.dump(2) << std::endl; }

Json run_header(GlobalOptions& global) {
    return Json{{"seed", global.effective_seed()}, {"threads", global.threads}};
}

// --- subcommands -------------------------------------------------------------

struct KeygenArgs {
    std::uint32_t gamma = 0, n = 0, k = 0, dim = 512;
    std::int64_t m = -1;
    std::uint32_t tr = 3;
    double delta = 0.05, rmin = 0.5, rmax = 2.0;
    std::string out;
};

int cmd_keygen(const KeygenArgs& args) {
    KeygenOptions opts;
    if (args.m >= 0) opts.m = std::uint32_t(args.m);
    opts.tr = args.tr;
    opts.noise_delta = args.delta;
    opts.scalar_min = args.rmin;
    opts.scalar_max = args.rmax;
    const auto params = keygen(args.gamma, args.n, args.k, args.dim, opts);
    if (args.out.empty()) print_json(params_to_json(params));
    else write_params_file(args.out, params);
    return kExitAccept;
}

struct EnrollArgs {
    std::string params_path, template_src, chaff_src = "synthetic", out;
};

int cmd_enroll(GlobalOptions& global, const EnrollArgs& args) {
    ProtocolParams params;
    if (!args.params_path.empty()) {
        params = read_params_file(args.params_path);
    } else if (const auto cfg = global.config(); cfg && cfg->contains("params")) {
        params = params_from_json(cfg->at("params"));
    } else {
        throw std::invalid_argument("enroll: --params (or a config file) is required");
    }

    const auto tpl = load_channels(args.template_src, params.n, params.dim);
    const auto chaff = parse_chaff(args.chaff_src, params.dim, global.effective_seed());
    RngStream rng(global.effective_seed());
    const auto helper = enroll(tpl, chaff, params, rng);
    write_helper_file(args.out, helper);

    Json out = run_header(global);
    out["params"] = params_to_json(params);
    out["template"] = args.template_src;
    out["chaff"] = args.chaff_src;
    out["helper_file"] = args.out;
    out["helper_bytes"] = serialized_helper_size(params);
    print_json(out);
    return kExitAccept;
}

struct VerifyArgs {
    std::string helper_path, query_src;
    std::int64_t tr = -1;
    double query_cos = 1.0;
};

int cmd_verify(GlobalOptions& global, const VerifyArgs& args) {
    const auto helper = read_helper_file(args.helper_path);
    auto query = load_channels(args.query_src, helper.params.n, helper.params.dim);
    if (args.query_cos < 1.0) {
        // Degrade the query to the requested similarity band.
        RngStream rng(global.effective_seed());
        query = derive_channels(query.channels, args.query_cos, rng);
    }
    std::optional<std::uint32_t> tr;
    if (args.tr >= 0) {
        if (args.tr < 1) throw std::invalid_argument("verify: --tr must be >= 1");
        tr = std::uint32_t(args.tr);
    }
    const auto result = verify(helper, query, tr);

    Json out = run_header(global);
    out["helper_file"] = args.helper_path;
    out["params"] = params_to_json(helper.params);
    out["tr"] = tr ? *tr : helper.params.tr;
    out["decision"] = result.accepted ? "accept" : "reject";
    out["matched_subset"] = result.matched_subset;
    out["matched_rank"] = result.matched_rank;
    out["best_similarity"] = result.best_similarity;
    out["hash_count"] = result.hash_count;
    out["match_seconds"] = result.match_seconds;
    out["hash_seconds"] = result.hash_seconds;
    print_json(out);
    return result.accepted ? kExitAccept : kExitReject;
}

struct AttackArgs {
    std::string helper_path;
    double budget = kDefaultAttackBudget;
};

int cmd_attack(GlobalOptions& global, const AttackArgs& args) {
    const auto helper = read_helper_file(args.helper_path);
    const auto wf = work_factor(helper.params);
    RngStream rng(global.effective_seed());

    Json out = run_header(global);
    out["helper_file"] = args.helper_path;
    out["budget"] = args.budget;
    out["work_factor"] = work_factor_to_json(wf);
    try {
        const auto result = brute_force_attack(helper, rng, args.budget);
        out["tries_to_success"] = result.tries_to_success;
        out["succeeded"] = result.succeeded;
        out["wall_seconds"] = result.wall_seconds;
        print_json(out);
        return kExitAccept;
    } catch (const std::invalid_argument& e) {
        out["refused"] = e.what();
        print_json(out);
        std::fprintf(stderr, "attack refused: %s\n", e.what());
        return kExitReject;
    }
}

struct BenchArgs {
    std::string config_path, out_dir;
};

BenchConfig default_bench_config(std::uint64_t seed) {
    // Desk-scale grid mirroring the chaff-count / relaxation comparisons:
    // a low-dimension population with a widened genuine band keeps TPR off
    // its ceiling so the orderings stay visible.
    BenchConfig config;
    config.population.num_identities = 6;
    config.population.dim = 16;
    config.population.n_channels = 5;
    config.population.genuine_cos = DistSpec{0.8, 0.1, 0.6, 1.0};
    config.population.rng_seed = splitmix64(seed ^ 0x9090ULL);

    KeygenOptions m2000, m4000;
    m2000.m = 2000;
    m2000.tr = 2;
    m4000.m = 4000;
    m4000.tr = 2;
    config.params_grid = {keygen(40, 5, 5, 16, m2000), keygen(40, 5, 5, 16, m4000),
                          keygen(40, 5, 4, 16, m4000)};
    config.tr_sweep = {1, 2, 3};
    config.genuine_trials = 120;
    config.imposter_trials = 120;
    config.rng_seed = seed;
    return config;
}

int cmd_bench(GlobalOptions& global, const BenchArgs& args) {
    std::optional<Json> cfg_json;
    if (!args.config_path.empty()) cfg_json = load_json_file(args.config_path);
    else if (const auto cfg = global.config(); cfg && cfg->contains("bench"))
        cfg_json = cfg->at("bench");

    BenchConfig config = cfg_json ? bench_config_from_json(*cfg_json)
                                  : default_bench_config(global.effective_seed());

    // Timing block: paper-scale defaults unless the config overrides them.
    KeygenOptions timing_opts;
    timing_opts.m = 2000;
    timing_opts.tr = 3;
    ProtocolParams timing_params = keygen(54, 5, 5, 512, timing_opts);
    std::uint32_t timing_reps = 10;
    if (cfg_json && cfg_json->contains("timing_params"))
        timing_params = params_from_json(cfg_json->at("timing_params"));
    if (cfg_json && cfg_json->contains("timing_repetitions"))
        timing_reps = cfg_json->at("timing_repetitions").get<std::uint32_t>();

    std::filesystem::create_directories(args.out_dir);
    const auto dir = std::filesystem::path(args.out_dir);

    const BenchReport report = run_roc(config, global.threads);
    emit_report(report, (dir / "report.json").string(), ReportFormat::Json);
    write_roc_csv(report.configs.front(), (dir / "roc.csv").string());
    write_table_csv(report, (dir / "table.csv").string());

    const auto hists =
        score_histograms(Population(config.population), 2000, splitmix64(config.rng_seed));
    write_histogram_csv(hists.genuine, (dir / "hist_genuine.csv").string());
    write_histogram_csv(hists.imposter, (dir / "hist_imposter.csv").string());
    write_histogram_csv(hists.chaff, (dir / "hist_chaff.csv").string());

    const auto timing = timing_report(timing_params, timing_reps, config.rng_seed);
    write_timing_csv(timing, (dir / "timing.csv").string());

    Json out = run_header(global);
    out["config"] = bench_config_to_json(config);
    out["timing_params"] = params_to_json(timing_params);
    out["timing"] = timing_to_json(timing);
    out["out_dir"] = args.out_dir;
    Json tables = Json::array();
    for (const auto& c : report.configs)
        tables.push_back(Json{{"m", c.params.m},
                              {"k", c.params.k},
                              {"tr", c.params.tr},
                              {"tpr", c.tpr_at_tr},
                              {"tnr", c.tnr_at_tr},
                              {"auc", c.auc}});
    out["table"] = tables;
    print_json(out);
    return kExitAccept;
}

struct SimulateArgs {
    std::string spec_path, out;
    std::uint64_t queries = 0;
};

int cmd_simulate(GlobalOptions& global, const SimulateArgs& args) {
    PopulationSpec spec;
    if (!args.spec_path.empty()) {
        spec = population_from_json(load_json_file(args.spec_path));
    } else if (const auto cfg = global.config(); cfg && cfg->contains("population")) {
        spec = population_from_json(cfg->at("population"));
    } else {
        throw std::invalid_argument("simulate: --spec (or a config file) is required");
    }
    if (global.seed_given) spec.rng_seed = global.seed;

    const Population pop(spec);
    EmbeddingTable table;
    for (std::uint32_t id = 0; id < spec.num_identities; ++id)
        for (std::uint32_t c = 0; c < spec.n_channels; ++c)
            table.emplace(EmbeddingKey{"id" + std::to_string(id), c}, pop.latent(id, c));

    // Optional genuine probes alongside the ground truth.
    RngStream rng(splitmix64(spec.rng_seed ^ 0x5157ULL));
    for (std::uint64_t q = 0; q < args.queries; ++q) {
        const auto id = std::uint32_t(q % spec.num_identities);
        const auto query = pop.genuine_query(id, rng);
        for (std::uint32_t c = 0; c < spec.n_channels; ++c)
            table.emplace(
                EmbeddingKey{"query" + std::to_string(q) + "_of_id" + std::to_string(id), c},
                query.channels[c]);
    }
    write_embeddings(args.out, table);

    Json out = run_header(global);
    out["population"] = population_to_json(spec);
    out["out_file"] = args.out;
    out["identities"] = spec.num_identities;
    out["rows"] = table.size();
    print_json(out);
    return kExitAccept;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-vault obfuscated template toolkit"};
    app.require_subcommand(1);

    GlobalOptions global;
    app.add_option("--seed", global.seed, "root seed; runs are deterministic given it")
        ->each([&](const std::string&) { global.seed_given = true; });
    app.add_option("--threads", global.threads, "worker threads (0 = all cores, 1 = serial)");
    app.add_option("--config", global.config_path,
                   "JSON config file (default: $MVOT_CONFIG) supplying params/population/bench");

    KeygenArgs keygen_args;
    auto* keygen_cmd = app.add_subcommand("keygen", "generate protocol parameters");
    keygen_cmd->add_option("--gamma", keygen_args.gamma, "security target in bits")->required();
    keygen_cmd->add_option("--n", keygen_args.n, "vault count")->required();
    keygen_cmd->add_option("--k", keygen_args.k, "required vault successes")->required();
    keygen_cmd->add_option("--dim", keygen_args.dim, "embedding dimension");
    keygen_cmd->add_option("--m", keygen_args.m, "chaff per vault (validated; default: minimal)");
    keygen_cmd->add_option("--tr", keygen_args.tr, "default retrieval depth");
    keygen_cmd->add_option("--delta", keygen_args.delta, "relative obfuscation noise bound");
    keygen_cmd->add_option("--rmin", keygen_args.rmin, "obfuscation scalar lower bound");
    keygen_cmd->add_option("--rmax", keygen_args.rmax, "obfuscation scalar upper bound");
    keygen_cmd->add_option("--out", keygen_args.out, "params file (default: stdout)");

    EnrollArgs enroll_args;
    auto* enroll_cmd = app.add_subcommand("enroll", "build helper data from a template");
    enroll_cmd->add_option("--params", enroll_args.params_path, "params JSON file");
    enroll_cmd->add_option("--template", enroll_args.template_src,
                           "'synthetic:<id>' or '<file>:<identity>'")
        ->required();
    enroll_cmd->add_option("--chaff", enroll_args.chaff_src, "'synthetic' or an embedding file");
    enroll_cmd->add_option("--out", enroll_args.out, "helper output file")->required();

    VerifyArgs verify_args;
    auto* verify_cmd = app.add_subcommand("verify", "verify a query against helper data");
    verify_cmd->add_option("--helper", verify_args.helper_path, "helper file")->required();
    verify_cmd->add_option("--query", verify_args.query_src,
                           "'synthetic:<id>' or '<file>:<identity>'")
        ->required();
    verify_cmd->add_option("--tr", verify_args.tr, "retrieval depth (default: from params)");
    verify_cmd->add_option("--query-cos", verify_args.query_cos,
                           "degrade the query to this cosine against its source");

    AttackArgs attack_args;
    auto* attack_cmd = app.add_subcommand("attack", "brute-force the commitments (small scale)");
    attack_cmd->add_option("--helper", attack_args.helper_path, "helper file")->required();
    attack_cmd->add_option("--budget", attack_args.budget, "max hash evaluations");

    BenchArgs bench_args;
    auto* bench_cmd = app.add_subcommand("bench", "ROC/table/histogram/timing harness");
    bench_cmd->add_option("--config", bench_args.config_path, "bench config JSON");
    bench_cmd->add_option("--out", bench_args.out_dir, "output directory")->required();

    SimulateArgs simulate_args;
    auto* simulate_cmd = app.add_subcommand("simulate", "write a synthetic embedding file");
    simulate_cmd->add_option("--spec", simulate_args.spec_path, "population spec JSON");
    simulate_cmd->add_option("--out", simulate_args.out, "embedding file to write")->required();
    simulate_cmd->add_option("--queries", simulate_args.queries, "genuine probes to append");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (keygen_cmd->parsed()) return cmd_keygen(keygen_args);
        if (enroll_cmd->parsed()) return cmd_enroll(global, enroll_args);
        if (verify_cmd->parsed()) return cmd_verify(global, verify_args);
        if (attack_cmd->parsed()) return cmd_attack(global, attack_args);
        if (bench_cmd->parsed()) return cmd_bench(global, bench_args);
        if (simulate_cmd->parsed()) return cmd_simulate(global, simulate_args);
        return kExitUsage;
    } catch (const FormatError& e) {
        std::fprintf(stderr, "format error: %s\n", e.what());
        return kExitIo;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    }
}
