#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "support/synthetic.hpp"
#include "support/tempdir.hpp"
#include "tandem/error.hpp"
#include "tandem/report.hpp"

using namespace tandem;
using testsupport::TempDir;

namespace {

ComparisonRun small_run(std::size_t groups, bool self_compare = false) {
    auto s = testsupport::make_linear_logit(3, 150, groups, 0);
    auto [train, val] = train_val_split(s.data, {0.8, 5});
    const ModelSpec logit = ModelSpec::logistic({0.1, 300, 1e-6, 0.01});
    const ModelSpec other = self_compare ? logit : ModelSpec::forest({10, 2}, 6);
    return compare_models(logit, other, train, val, s.feature_set,
                          Criterion{CriterionName::f1}, AgreeMetric::cohen_kappa);
}

std::vector<std::string> csv_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
        if (!line.empty()) lines.push_back(line);
    return lines;
}

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cell);
            cell.clear();
        } else {
            cell += c;
        }
    }
    cells.push_back(cell);
    return cells;
}

nlohmann::json minimal_config_json(const std::string& csv_path) {
    return nlohmann::json{
        {"data",
         {{"csv", csv_path},
          {"split", {{"train_fraction", 0.8}, {"seed", 3}}},
          {"target", "y"},
          {"task", "classification"}}},
        {"model1", {{"kind", "logistic"}, {"max_iter", 300}, {"lambda", 0.01}}},
        {"model2", {{"kind", "logistic"}, {"max_iter", 300}, {"lambda", 0.01}}},
        {"criterion", "f1"},
        {"agreeability", "cohen_kappa"},
        {"seed", 7}};
}

}  // namespace

TEST_CASE("csv export layout") {
    const auto run = small_run(3);
    const auto lines = csv_lines(export_results_csv(run));
    REQUIRE(lines.size() == 4);  // header + 3 iterations
    CHECK(lines[0] ==
          "iteration,m1_best_score,m2_best_score,best_agreeability,"
          "mean_agreeability,std_agreeability,m1_dropped,m2_dropped");

    const auto first = split_csv_row(lines[1]);
    REQUIRE(first.size() == 8);
    CHECK(first[0] == "1");
    CHECK(first[4].empty());  // no mean at the full-set iteration
    CHECK(first[5].empty());
    CHECK(first[6].empty());  // nothing dropped yet
    CHECK(first[7].empty());

    const auto second = split_csv_row(lines[2]);
    CHECK_FALSE(second[4].empty());
    CHECK_FALSE(second[6].empty());
}

TEST_CASE("single-iteration run exports a single row") {
    const auto run = small_run(1);
    const auto lines = csv_lines(export_results_csv(run));
    REQUIRE(lines.size() == 2);
    const auto row = split_csv_row(lines[1]);
    CHECK(row[0] == "1");
    CHECK(row[4].empty());
    CHECK(row[5].empty());
}

TEST_CASE("self-run exports all-1 best agreeability") {
    const auto run = small_run(3, /*self_compare=*/true);
    const auto lines = csv_lines(export_results_csv(run));
    for (std::size_t i = 1; i < lines.size(); ++i) CHECK(split_csv_row(lines[i])[3] == "1");
}

TEST_CASE("results JSON round-trips exactly") {
    const auto run = small_run(3);
    const auto doc = run_to_json(run);
    const auto back = run_from_json(doc);
    CHECK(run_to_json(back).dump() == doc.dump());

    // Spot-check reconstruction of the pieces compare_n_best consumes.
    CHECK(back.iterations.size() == run.iterations.size());
    CHECK(back.config.criterion == run.config.criterion);
    CHECK(back.iterations[0].m1.candidates[0].predictions ==
          run.iterations[0].m1.candidates[0].predictions);
    CHECK(back.total_fits == run.total_fits);
}

TEST_CASE("model specs round-trip through JSON") {
    LayeredNetConfig net;
    net.layers = {{16, Activation::relu, true}, {4, Activation::sigmoid, false}};
    net.output = OutputKind::sigmoid;
    for (const ModelSpec& spec :
         {ModelSpec::logistic({0.2, 100, 1e-5, 0.5}, 3), ModelSpec::forest({50, 4}, 4),
          ModelSpec::layered_net(net, 5), ModelSpec::linear(6)}) {
        const ModelSpec back = model_spec_from_json(model_spec_to_json(spec));
        CHECK(back == spec);
    }
}

TEST_CASE("config parsing reports every problem at once") {
    nlohmann::json bad{{"data",
                        {{"csv", "x.csv"},
                         {"target", "y"},
                         {"task", "classification"},
                         {"smote", {{"enabled", true}, {"k", 0}}}}},
                       {"model1", {{"kind", "logistic"}}},
                       {"model2", {{"kind", "spaceship"}}},
                       {"criterion", "auc"},
                       {"agreeability", "pearson"},
                       {"typo_field", 1}};
    try {
        parse_run_config(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const auto& problems = e.problems();
        auto has = [&](const std::string& needle) {
            for (const auto& p : problems)
                if (p.find(needle) != std::string::npos) return true;
            return false;
        };
        CHECK(has("criterion"));
        CHECK(has("valid options"));  // names the alternatives
        CHECK(has("model2"));
        CHECK(has("typo_field"));
        CHECK(has("smote"));
        CHECK(has("agreeability"));  // pearson clashes with classification
        CHECK(problems.size() >= 5);
    }
}

TEST_CASE("config requires exactly one data source form") {
    auto doc = minimal_config_json("a.csv");
    doc["data"]["train_csv"] = "b.csv";
    CHECK_THROWS_AS(parse_run_config(doc), ConfigError);

    nlohmann::json neither = minimal_config_json("a.csv");
    neither["data"].erase("csv");
    neither["data"].erase("split");
    CHECK_THROWS_AS(parse_run_config(neither), ConfigError);
}

TEST_CASE("run_experiment writes the three artifacts") {
    TempDir tmp;
    const auto s = testsupport::make_linear_logit(21, 120, 3, 0);
    const auto csv = tmp.write("synth.csv", testsupport::dataset_to_csv(s.data, "y"));

    auto doc = minimal_config_json(csv.string());
    doc["out_dir"] = (tmp.path() / "out").string();
    const RunConfig cfg = parse_run_config(doc);
    const auto result = run_experiment(cfg);

    CHECK(std::filesystem::exists(result.results_json));
    CHECK(std::filesystem::exists(result.results_csv));
    CHECK(std::filesystem::exists(result.manifest_json));
    CHECK(result.run.iterations.size() == 3);

    const auto manifest = nlohmann::json::parse(tmp.read(result.manifest_json));
    CHECK(manifest.contains("tandem_version"));
    CHECK(manifest.contains("wall_time_seconds"));
    CHECK(manifest["config"]["criterion"] == "f1");

    // The written CSV matches the in-memory export.
    CHECK(tmp.read(result.results_csv) == export_results_csv(result.run));
}

TEST_CASE("run_experiment resolves dummy groups and fixed features") {
    TempDir tmp;
    const auto churn = testsupport::make_churn_like(31, 300);
    const auto csv =
        tmp.write("churn.csv", testsupport::dataset_to_csv(churn.raw, "ChurnValue"));

    nlohmann::json doc{
        {"data",
         {{"csv", csv.string()},
          {"split", {{"train_fraction", 0.8}, {"seed", 1}}},
          {"target", "ChurnValue"},
          {"task", "classification"},
          {"categorical", churn.categorical},
          {"fixed", {"TenureMonths"}},
          {"smote", {{"enabled", true}, {"k", 5}}}}},
        {"model1", {{"kind", "logistic"}, {"max_iter", 150}, {"lambda", 0.01}}},
        {"model2", {{"kind", "logistic"}, {"max_iter", 150}, {"lambda", 0.01}}},
        {"criterion", "f1"},
        {"agreeability", "cohen_kappa"},
        {"seed", 2},
        {"out_dir", (tmp.path() / "out").string()}};

    const auto result = run_experiment(parse_run_config(doc));
    // 22 groups, one fixed: 21 removable -> 21 iterations.
    CHECK(result.run.iterations.size() == 21);
    for (const auto& g : result.run.config.feature_set.groups)
        if (g.name == "TenureMonths") CHECK(g.fixed);

    nlohmann::json bad = doc;
    bad["data"]["fixed"] = {"NoSuchColumn"};
    CHECK_THROWS_AS(run_experiment(parse_run_config(bad)), ConfigError);
}

TEST_CASE("plots carry the run's numbers verbatim") {
    const auto run = small_run(3, /*self_compare=*/true);
    const auto files = emit_plots(run, PlotKind::agreeability_curves);

    // One x tick per iteration.
    std::size_t ticks = 0;
    for (std::size_t at = files.svg.find("class=\"xtick\""); at != std::string::npos;
         at = files.svg.find("class=\"xtick\"", at + 1))
        ++ticks;
    CHECK(ticks == run.iterations.size());

    const auto lines = csv_lines(files.data_csv);
    REQUIRE(lines.size() == run.iterations.size() + 1);
    CHECK(lines[0] ==
          "iteration,best_agreeability,mean_agreeability,std_agreeability,band_low,band_high");

    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_csv_row(lines[i]);
        const auto& it = run.iterations[i - 1];
        CHECK(cells[1] == format_double(it.best_agreeability));
        if (it.mean_agreeability) {
            // Exact pass-through, and a zero-height band for constant 1.0.
            CHECK(cells[2] == format_double(*it.mean_agreeability));
            CHECK(cells[4] == cells[5]);
        } else {
            CHECK(cells[2].empty());
        }
    }

    const auto dual = emit_plots(run, PlotKind::dual_axis);
    const auto dual_lines = csv_lines(dual.data_csv);
    REQUIRE(dual_lines.size() == run.iterations.size() + 1);
    for (std::size_t i = 1; i < dual_lines.size(); ++i) {
        const auto cells = split_csv_row(dual_lines[i]);
        CHECK(cells[1] == format_double(run.iterations[i - 1].m1.best_score));
        CHECK(cells[2] == format_double(run.iterations[i - 1].m2.best_score));
    }

    const auto one = small_run(1);
    CHECK_THROWS_AS(emit_plots(one, PlotKind::agreeability_curves), Error);
}

TEST_CASE("format_double survives the round trip") {
    for (double v : {0.1, 1.0 / 3.0, 12345.6789, 1e-17, -0.0, 5625.0})
        CHECK(std::stod(format_double(v)) == v);
}
