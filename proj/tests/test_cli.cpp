#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mvot/json_io.hpp"
#include "mvot/serialize.hpp"
#include "mvot/sources.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

using namespace mvot;

namespace {

const std::filesystem::path kWorkDir =
    std::filesystem::temp_directory_path() / "mvot_cli_tests";

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

RunResult run_cli(const std::string& args) {
    const auto out_path = kWorkDir / "stdout.txt";
    const auto err_path = kWorkDir / "stderr.txt";
    const std::string cmd = std::string(MVOT_CLI_PATH) + " " + args + " > " +
                            out_path.string() + " 2> " + err_path.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

std::string path_of(const std::string& name) { return (kWorkDir / name).string(); }

struct WorkDirSetup {
    WorkDirSetup() {
        std::filesystem::remove_all(kWorkDir);
        std::filesystem::create_directories(kWorkDir);
    }
};
const WorkDirSetup setup_once{};

} // namespace

TEST_CASE("keygen: file output, stdout default, usage errors") {
    auto r = run_cli("keygen --gamma 54 --n 5 --k 5 --m 2000 --out " + path_of("params.json"));
    CHECK(r.exit_code == 0);
    const auto params = read_params_file(path_of("params.json"));
    CHECK(params.m == 2000);
    CHECK(params.n == 5);

    r = run_cli("keygen --gamma 10 --n 3 --k 1");
    CHECK(r.exit_code == 0);
    CHECK(params_from_json(Json::parse(r.out)).m == 1024);

    CHECK(run_cli("keygen --gamma 0 --n 5 --k 5").exit_code == 2);
    CHECK(run_cli("keygen --n 5 --k 5").exit_code == 2);            // missing required
    CHECK(run_cli("keygen --gamma 54 --n 5 --k 9").exit_code == 2); // k > n
    CHECK(run_cli("frobnicate").exit_code == 2);
}

TEST_CASE("enroll/verify workflow with synthetic identities") {
    REQUIRE(run_cli("keygen --gamma 8 --n 5 --k 5 --dim 32 --m 60 --tr 2 --out " +
                    path_of("small.json"))
                .exit_code == 0);

    auto r = run_cli("--seed 42 enroll --params " + path_of("small.json") +
                     " --template synthetic:7 --out " + path_of("helper.mvot"));
    CHECK(r.exit_code == 0);

    // File size: 4*dim*n*(m+1) payload plus metadata, as serialized_helper_size says.
    const auto params = read_params_file(path_of("small.json"));
    CHECK(std::filesystem::file_size(path_of("helper.mvot")) == serialized_helper_size(params));

    r = run_cli("verify --helper " + path_of("helper.mvot") + " --query synthetic:7 --tr 1");
    CHECK(r.exit_code == 0);
    const auto diag = Json::parse(r.out);
    CHECK(diag.at("decision") == "accept");
    CHECK(diag.at("hash_count").get<std::uint64_t>() >= 1);

    CHECK(run_cli("verify --helper " + path_of("helper.mvot") + " --query synthetic:8")
              .exit_code == 1);
    CHECK(run_cli("verify --helper " + path_of("helper.mvot") + " --query synthetic:7 --tr 0")
              .exit_code == 2);
    CHECK(run_cli("verify --helper " + path_of("nonexistent.mvot") + " --query synthetic:7")
              .exit_code == 3);
}

TEST_CASE("enrollment is deterministic per seed, fresh otherwise") {
    const std::string base = "enroll --params " + path_of("small.json") +
                             " --template synthetic:7 --out ";
    REQUIRE(run_cli("--seed 9 " + base + path_of("h1.mvot")).exit_code == 0);
    REQUIRE(run_cli("--seed 9 " + base + path_of("h2.mvot")).exit_code == 0);
    REQUIRE(run_cli("--seed 10 " + base + path_of("h3.mvot")).exit_code == 0);

    CHECK(slurp(path_of("h1.mvot")) == slurp(path_of("h2.mvot")));
    CHECK(slurp(path_of("h1.mvot")) != slurp(path_of("h3.mvot")));

    // Fresh salt, fresh vaults, but both verify the same template.
    CHECK(run_cli("verify --helper " + path_of("h1.mvot") + " --query synthetic:7").exit_code == 0);
    CHECK(run_cli("verify --helper " + path_of("h3.mvot") + " --query synthetic:7").exit_code == 0);
}

TEST_CASE("file-backed templates and chaff, including shortfalls") {
    // 12 identities x 2 channels at dim 8 = 24 rows of ground truth.
    const std::string spec = R"({"schema":"mvot-population/1","num_identities":12,"dim":8,
        "n_channels":2,"genuine_cos":{"mean":0.9,"std":0.05,"lo":0.8,"hi":1.0},
        "imposter_cos":{"mean":0.3,"std":0.05,"lo":0.2,"hi":0.4},
        "unrelated_cos":{"mean":0.0,"std":0.1,"lo":-0.25,"hi":0.25},"rng_seed":5})";
    {
        std::ofstream out(path_of("pop_spec.json"));
        out << spec;
    }
    REQUIRE(run_cli("simulate --spec " + path_of("pop_spec.json") + " --out " +
                    path_of("pop.csv"))
                .exit_code == 0);

    REQUIRE(run_cli("keygen --gamma 4 --n 2 --k 2 --dim 8 --m 10 --tr 2 --out " +
                    path_of("file_params.json"))
                .exit_code == 0);

    // Template from file, chaff from the same file (needs 2*10 = 20 <= 24 rows).
    auto r = run_cli("--seed 3 enroll --params " + path_of("file_params.json") +
                     " --template " + path_of("pop.csv") + ":id0 --chaff " + path_of("pop.csv") +
                     " --out " + path_of("file_helper.mvot"));
    CHECK(r.exit_code == 0);
    CHECK(run_cli("verify --helper " + path_of("file_helper.mvot") + " --query " +
                  path_of("pop.csv") + ":id0")
              .exit_code == 0);
    CHECK(run_cli("verify --helper " + path_of("file_helper.mvot") + " --query " +
                  path_of("pop.csv") + ":id3")
              .exit_code == 1);

    // m = 15 needs 30 rows; the file has 24.
    REQUIRE(run_cli("keygen --gamma 4 --n 2 --k 2 --dim 8 --m 15 --tr 2 --out " +
                    path_of("file_params_big.json"))
                .exit_code == 0);
    r = run_cli("--seed 3 enroll --params " + path_of("file_params_big.json") + " --template " +
                path_of("pop.csv") + ":id0 --chaff " + path_of("pop.csv") + " --out " +
                path_of("no.mvot"));
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("need 30") != std::string::npos);
}

TEST_CASE("simulate output is deterministic and re-ingestable") {
    REQUIRE(run_cli("--seed 11 simulate --spec " + path_of("pop_spec.json") +
                    " --queries 3 --out " + path_of("sim1.csv"))
                .exit_code == 0);
    REQUIRE(run_cli("--seed 11 simulate --spec " + path_of("pop_spec.json") +
                    " --queries 3 --out " + path_of("sim2.csv"))
                .exit_code == 0);
    CHECK(slurp(path_of("sim1.csv")) == slurp(path_of("sim2.csv")));

    const auto table = ingest_embeddings(path_of("sim1.csv"), 8);
    CHECK(table.size() == 12 * 2 + 3 * 2);
}

TEST_CASE("attack succeeds at toy scale and refuses at production scale") {
    REQUIRE(run_cli("keygen --gamma 3 --n 2 --k 2 --dim 8 --m 3 --tr 1 --out " +
                    path_of("tiny.json"))
                .exit_code == 0);
    REQUIRE(run_cli("--seed 1 enroll --params " + path_of("tiny.json") +
                    " --template synthetic:3 --out " + path_of("tiny.mvot"))
                .exit_code == 0);
    auto r = run_cli("--seed 5 attack --helper " + path_of("tiny.mvot"));
    CHECK(r.exit_code == 0);
    const auto report = Json::parse(r.out);
    CHECK(report.at("succeeded").get<bool>());
    CHECK(report.at("tries_to_success").get<std::uint64_t>() <= 16);

    REQUIRE(run_cli("keygen --gamma 54 --n 5 --k 5 --dim 8 --m 2000 --tr 3 --out " +
                    path_of("big.json"))
                .exit_code == 0);
    REQUIRE(run_cli("--seed 1 enroll --params " + path_of("big.json") +
                    " --template synthetic:3 --out " + path_of("big.mvot"))
                .exit_code == 0);
    r = run_cli("attack --helper " + path_of("big.mvot"));
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("54.8") != std::string::npos);
}

TEST_CASE("bench default grid writes the full artifact set") {
    const auto dir = kWorkDir / "benchout";
    const auto r = run_cli("--seed 3 bench --out " + dir.string());
    CHECK(r.exit_code == 0);
    for (const char* name : {"report.json", "roc.csv", "table.csv", "timing.csv",
                             "hist_genuine.csv", "hist_imposter.csv", "hist_chaff.csv"})
        CHECK(std::filesystem::exists(dir / name));

    std::ifstream roc(dir / "roc.csv");
    std::string header;
    std::getline(roc, header);
    CHECK(header == "fpr,tpr,tr");

    const auto report = report_from_json(load_json_file((dir / "report.json").string()));
    CHECK(report.configs.size() == 3);
    for (const auto& c : report.configs) CHECK(c.tnr_at_tr == 1.0);
}

TEST_CASE("bench accepts an explicit config file") {
    // Single tiny config with an overridden timing block.
    Json cfg = bench_config_to_json([] {
        BenchConfig config;
        config.population.num_identities = 4;
        config.population.dim = 16;
        config.population.n_channels = 4;
        config.population.rng_seed = 21;
        KeygenOptions opts;
        opts.m = 50;
        opts.tr = 2;
        config.params_grid = {keygen(8, 4, 4, 16, opts)};
        config.tr_sweep = {1, 2};
        config.genuine_trials = 100;
        config.imposter_trials = 100;
        config.rng_seed = 77;
        return config;
    }());
    KeygenOptions topts;
    topts.m = 100;
    topts.tr = 2;
    cfg["timing_params"] = params_to_json(keygen(8, 4, 4, 16, topts));
    cfg["timing_repetitions"] = 10;
    write_json_file(path_of("bench_cfg.json"), cfg);

    const auto dir = kWorkDir / "benchcfg";
    const auto r =
        run_cli("bench --config " + path_of("bench_cfg.json") + " --out " + dir.string());
    CHECK(r.exit_code == 0);
    const auto report = report_from_json(load_json_file((dir / "report.json").string()));
    CHECK(report.configs.size() == 1);
    CHECK(report.seed == 77);
    CHECK(report.configs[0].tpr_at_tr == doctest::Approx(1.0)); // default bands, easy match
}

TEST_CASE("global config file feeds enroll and simulate defaults") {
    KeygenOptions opts;
    opts.m = 40;
    opts.tr = 2;
    Json global_cfg;
    global_cfg["params"] = params_to_json(keygen(8, 3, 3, 16, opts));
    global_cfg["population"] = population_to_json([] {
        PopulationSpec spec;
        spec.num_identities = 3;
        spec.dim = 16;
        spec.n_channels = 3;
        spec.rng_seed = 2;
        return spec;
    }());
    write_json_file(path_of("global.json"), global_cfg);

    auto r = run_cli("--config " + path_of("global.json") +
                     " --seed 5 enroll --template synthetic:1 --out " + path_of("cfg_helper.mvot"));
    CHECK(r.exit_code == 0);
    CHECK(run_cli("verify --helper " + path_of("cfg_helper.mvot") + " --query synthetic:1")
              .exit_code == 0);

    r = run_cli("--config " + path_of("global.json") + " simulate --out " + path_of("cfg_pop.csv"));
    CHECK(r.exit_code == 0);
    CHECK(ingest_embeddings(path_of("cfg_pop.csv"), 16).size() == 9);

    // MVOT_CONFIG is the fallback config source.
    const auto env_out = kWorkDir / "env_stdout.txt";
    const std::string env_cmd = "MVOT_CONFIG=" + path_of("global.json") + " " + MVOT_CLI_PATH +
                                " simulate --out " + path_of("env_pop.csv") + " > " +
                                env_out.string() + " 2>&1";
    const int env_status = std::system(env_cmd.c_str());
    CHECK(WEXITSTATUS(env_status) == 0);
    CHECK(ingest_embeddings(path_of("env_pop.csv"), 16).size() == 9);

    // Without any config source the same commands are usage errors.
    CHECK(run_cli("enroll --template synthetic:1 --out " + path_of("x.mvot")).exit_code == 2);
    CHECK(run_cli("simulate --out " + path_of("x.csv")).exit_code == 2);
}
