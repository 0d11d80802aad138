#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "support/synthetic.hpp"
#include "support/tempdir.hpp"
#include "tandem/report.hpp"

using testsupport::TempDir;
using nlohmann::json;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// Shell out to the built binary, capturing both streams.
CliResult run_cli(const TempDir& tmp, const std::string& args) {
    const auto out_path = tmp.path() / "stdout.txt";
    const auto err_path = tmp.path() / "stderr.txt";
    const std::string cmd = std::string(TANDEM_CLI_PATH) + " " + args + " > " +
                            out_path.string() + " 2> " + err_path.string();
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = tmp.read(out_path);
    r.err = tmp.read(err_path);
    return r;
}

json base_config(const std::string& csv_path, const std::string& out_dir) {
    return json{{"data",
                 {{"csv", csv_path},
                  {"split", {{"train_fraction", 0.8}, {"seed", 4}}},
                  {"target", "y"},
                  {"task", "classification"}}},
                {"model1", {{"kind", "logistic"}, {"max_iter", 250}, {"lambda", 0.01}}},
                {"model2", {{"kind", "forest"}, {"n_trees", 12}, {"seed", 9}}},
                {"criterion", "f1"},
                {"agreeability", "cohen_kappa"},
                {"seed", 11},
                {"threads", 2},
                {"out_dir", out_dir}};
}

}  // namespace

TEST_CASE("cli run produces the artifacts and matches the library path") {
    TempDir tmp;
    const auto s = testsupport::make_linear_logit(14, 140, 3, 1);
    const auto csv = tmp.write("data.csv", testsupport::dataset_to_csv(s.data, "y"));

    const auto cli_out = (tmp.path() / "cli_out").string();
    const auto cfg_json = base_config(csv.string(), cli_out);
    const auto cfg_path = tmp.write("config.json", cfg_json.dump(2));

    const auto r = run_cli(tmp, "run " + cfg_path.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("iteration 1/") != std::string::npos);
    CHECK(std::filesystem::exists(std::filesystem::path(cli_out) / "results.json"));
    CHECK(std::filesystem::exists(std::filesystem::path(cli_out) / "results.csv"));
    CHECK(std::filesystem::exists(std::filesystem::path(cli_out) / "manifest.json"));

    // Thin-shell check: the library path on the same config produces a
    // byte-identical results.json.
    auto lib_cfg_json = cfg_json;
    const auto lib_out = (tmp.path() / "lib_out").string();
    lib_cfg_json["out_dir"] = lib_out;
    const auto lib_result = tandem::run_experiment(tandem::parse_run_config(lib_cfg_json));
    CHECK(tmp.read(lib_result.results_json) ==
          tmp.read(std::filesystem::path(cli_out) / "results.json"));
}

TEST_CASE("cli exit codes distinguish config from runtime failures") {
    TempDir tmp;

    SUBCASE("unknown criterion is a config error (exit 2)") {
        const auto s = testsupport::make_linear_logit(15, 60, 2, 0);
        const auto csv = tmp.write("data.csv", testsupport::dataset_to_csv(s.data, "y"));
        auto cfg = base_config(csv.string(), (tmp.path() / "out").string());
        cfg["criterion"] = "auc";
        const auto cfg_path = tmp.write("config.json", cfg.dump());
        const auto r = run_cli(tmp, "run " + cfg_path.string());
        CHECK(r.exit_code == 2);
        const auto err = json::parse(r.err);
        CHECK(err["error"] == "config");
        CHECK(err["details"].dump().find("auc") != std::string::npos);
        CHECK(err["details"].dump().find("valid options") != std::string::npos);
    }

    SUBCASE("missing data file is a runtime error (exit 3)") {
        auto cfg = base_config((tmp.path() / "absent.csv").string(),
                               (tmp.path() / "out").string());
        const auto cfg_path = tmp.write("config.json", cfg.dump());
        const auto r = run_cli(tmp, "run " + cfg_path.string());
        CHECK(r.exit_code == 3);
        CHECK(json::parse(r.err)["error"] == "run");
    }

    SUBCASE("config that is not JSON is a config error") {
        const auto cfg_path = tmp.write("config.json", "not json {");
        const auto r = run_cli(tmp, "run " + cfg_path.string());
        CHECK(r.exit_code == 2);
    }
}

TEST_CASE("cli seed and threads overrides change runs predictably") {
    TempDir tmp;
    const auto s = testsupport::make_linear_logit(16, 120, 3, 0);
    const auto csv = tmp.write("data.csv", testsupport::dataset_to_csv(s.data, "y"));

    const auto out_a = (tmp.path() / "a").string();
    const auto out_b = (tmp.path() / "b").string();
    const auto out_c = (tmp.path() / "c").string();
    const auto cfg_path =
        tmp.write("config.json", base_config(csv.string(), out_a).dump());

    CHECK(run_cli(tmp, "run " + cfg_path.string()).exit_code == 0);
    CHECK(run_cli(tmp, "run " + cfg_path.string() + " --out-dir " + out_b +
                           " --threads 1")
              .exit_code == 0);
    // Thread count must not change the numbers.
    CHECK(tmp.read(std::filesystem::path(out_a) / "results.json") ==
          tmp.read(std::filesystem::path(out_b) / "results.json"));

    // A different seed reseeds the stochastic model.
    CHECK(run_cli(tmp, "run " + cfg_path.string() + " --out-dir " + out_c + " --seed 999")
              .exit_code == 0);
    const auto run_a = tandem::run_from_json(
        json::parse(tmp.read(std::filesystem::path(out_a) / "results.json")));
    const auto run_c = tandem::run_from_json(
        json::parse(tmp.read(std::filesystem::path(out_c) / "results.json")));
    CHECK(run_a.config.seed != run_c.config.seed);
}

TEST_CASE("cli compare-n-best and plot consume results.json") {
    TempDir tmp;
    const auto s = testsupport::make_linear_logit(17, 140, 4, 0);
    const auto csv = tmp.write("data.csv", testsupport::dataset_to_csv(s.data, "y"));
    const auto out = (tmp.path() / "out").string();
    const auto cfg_path = tmp.write("config.json", base_config(csv.string(), out).dump());
    REQUIRE(run_cli(tmp, "run " + cfg_path.string()).exit_code == 0);
    const auto results = (std::filesystem::path(out) / "results.json").string();

    SUBCASE("compare-n-best prints one line per consecutive pair") {
        const auto r =
            run_cli(tmp, "compare-n-best " + results + " --n 3 --test mcnemar_chisquare");
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("rank 1 vs 2") != std::string::npos);
        CHECK(r.out.find("rank 2 vs 3") != std::string::npos);
    }

    SUBCASE("plot writes the svg and its data csv") {
        const auto plot_dir = (tmp.path() / "plots").string();
        const auto r = run_cli(tmp, "plot " + results +
                                        " --kind agreeability_curves --out-dir " + plot_dir);
        CHECK(r.exit_code == 0);
        CHECK(std::filesystem::exists(std::filesystem::path(plot_dir) /
                                      "agreeability_curves.svg"));
        CHECK(std::filesystem::exists(std::filesystem::path(plot_dir) /
                                      "agreeability_curves_data.csv"));
    }

    SUBCASE("an oversized n is a runtime error") {
        const auto r =
            run_cli(tmp, "compare-n-best " + results + " --n 99 --test mcnemar_binomial");
        CHECK(r.exit_code == 3);
    }
}
