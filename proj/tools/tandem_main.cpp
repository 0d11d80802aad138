// Command-line front end: run a comparison experiment from a JSON config,
// re-test stored results, or plot them.
//
// Exit codes: 0 success, 2 config error, 3 runtime error. stderr carries a
// single structured JSON error object; stdout carries the iteration
// summaries and command output.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "tandem/error.hpp"
#include "tandem/report.hpp"
#include "tandem/version.hpp"

namespace {

using nlohmann::json;

void print_error(const std::string& stage, const std::exception& e) {
    json err;
    err["error"] = stage;
    if (const auto* cfg = dynamic_cast<const tandem::ConfigError*>(&e)) {
        err["details"] = cfg->problems();
    } else {
        err["details"] = {std::string(e.what())};
    }
    std::cerr << err.dump() << "\n";
}

int default_threads() {
    if (const char* env = std::getenv("TANDEM_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

tandem::ComparisonRun load_results(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw tandem::Error("cannot open results file \"" + path + "\"");
    json doc;
    in >> doc;
    return tandem::run_from_json(doc);
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw tandem::Error("cannot write \"" + path + "\"");
    out << content;
}

int cmd_run(const std::string& config_path, const std::string& out_dir_override,
            bool has_threads, int threads, bool has_seed, std::uint64_t seed) {
    tandem::RunConfig cfg;
    try {
        cfg = tandem::load_run_config(config_path);
        if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;
        if (has_threads) cfg.threads = threads;
        if (has_seed) cfg.seed = seed;
    } catch (const std::exception& e) {
        print_error("config", e);
        return 2;
    }
    try {
        const auto result = tandem::run_experiment(cfg, &std::cout);
        std::cout << "wrote " << result.results_json.string() << "\n";
        std::cout << "wrote " << result.results_csv.string() << "\n";
        std::cout << "wrote " << result.manifest_json.string() << "\n";
        return 0;
    } catch (const tandem::ConfigError& e) {
        print_error("config", e);
        return 2;
    } catch (const std::exception& e) {
        print_error("run", e);
        return 3;
    }
}

int cmd_compare_n_best(const std::string& results_path, int n, const std::string& test_name) {
    try {
        const auto run = load_results(results_path);
        const auto test = tandem::n_best_test_from_string(test_name);
        const auto report = tandem::compare_n_best(run, n, test);

        auto print_side = [&](const char* label, const std::vector<tandem::NBestPair>& pairs) {
            std::cout << label << ":\n";
            for (const auto& p : pairs) {
                std::cout << "  rank " << p.rank_a << " vs " << p.rank_b << " (iterations "
                          << p.iteration_a << " vs " << p.iteration_b << "): ";
                if (p.result) {
                    if (p.result->statistic)
                        std::cout << "statistic=" << tandem::format_double(*p.result->statistic)
                                  << " ";
                    std::cout << "p=" << tandem::format_double(p.result->p_value);
                    if (p.result->variant_chosen)
                        std::cout << " variant=" << tandem::to_string(*p.result->variant_chosen);
                } else {
                    std::cout << "undefined (" << p.error << ")";
                }
                std::cout << "\n";
            }
        };
        print_side("m1", report.m1);
        print_side("m2", report.m2);
        std::cout << tandem::n_best_report_to_json(report).dump(2) << "\n";
        return 0;
    } catch (const tandem::ConfigError& e) {
        print_error("config", e);
        return 2;
    } catch (const std::exception& e) {
        print_error("compare-n-best", e);
        return 3;
    }
}

int cmd_plot(const std::string& results_path, const std::string& kind_name,
             const std::string& out_dir) {
    try {
        const auto run = load_results(results_path);
        const auto kind = tandem::plot_kind_from_string(kind_name);
        const auto files = tandem::emit_plots(run, kind);
        std::filesystem::create_directories(out_dir);
        const auto svg_path = std::filesystem::path(out_dir) / (kind_name + ".svg");
        const auto csv_path = std::filesystem::path(out_dir) / (kind_name + "_data.csv");
        write_text(svg_path.string(), files.svg);
        write_text(csv_path.string(), files.data_csv);
        std::cout << "wrote " << svg_path.string() << "\n";
        std::cout << "wrote " << csv_path.string() << "\n";
        return 0;
    } catch (const tandem::ConfigError& e) {
        print_error("config", e);
        return 2;
    } catch (const std::exception& e) {
        print_error("plot", e);
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"tandem: paired backward elimination with inter-model agreement"};
    app.set_version_flag("--version", TANDEM_VERSION);
    app.require_subcommand(1);

    // run
    std::string config_path;
    std::string out_dir_override;
    int threads = default_threads();
    std::uint64_t seed = 0;
    auto* run_cmd = app.add_subcommand("run", "run an experiment from a JSON config");
    run_cmd->add_option("config", config_path, "config JSON file")->required();
    run_cmd->add_option("--out-dir", out_dir_override, "override the config's output directory");
    auto* threads_opt =
        run_cmd->add_option("--threads", threads, "candidate evaluation threads");
    auto* seed_opt = run_cmd->add_option("--seed", seed, "override the config's seed");

    // compare-n-best
    std::string results_path;
    int n = 2;
    std::string test_name;
    auto* nbest_cmd =
        app.add_subcommand("compare-n-best", "test consecutive n-best predictions within models");
    nbest_cmd->add_option("results", results_path, "results.json from a run")->required();
    nbest_cmd->add_option("--n", n, "how many best prediction sets to compare")->required();
    nbest_cmd->add_option("--test", test_name,
                          "mcnemar_binomial, mcnemar_chisquare or t_test")
        ->required();

    // plot
    std::string plot_results;
    std::string kind_name;
    std::string plot_out = ".";
    auto* plot_cmd = app.add_subcommand("plot", "emit a static SVG plot plus its data CSV");
    plot_cmd->add_option("results", plot_results, "results.json from a run")->required();
    plot_cmd->add_option("--kind", kind_name, "agreeability_curves or dual_axis")->required();
    plot_cmd->add_option("--out-dir", plot_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    const bool env_threads = std::getenv("TANDEM_THREADS") != nullptr;
    if (run_cmd->parsed())
        return cmd_run(config_path, out_dir_override,
                       threads_opt->count() > 0 || env_threads, threads, seed_opt->count() > 0,
                       seed);
    if (nbest_cmd->parsed()) return cmd_compare_n_best(results_path, n, test_name);
    if (plot_cmd->parsed()) return cmd_plot(plot_results, kind_name, plot_out);
    return 0;
}
