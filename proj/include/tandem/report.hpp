#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tandem/search.hpp"

namespace tandem {

/// Where the experiment's rows come from: either one CSV plus a seeded
/// split, or pre-split train/validation files.
struct DataConfig {
    std::optional<std::string> csv;        // single file + split
    std::optional<SplitConfig> split;
    std::optional<std::string> train_csv;  // pre-split pair
    std::optional<std::string> val_csv;
    std::string target;
    Task task = Task::classification;
    std::vector<std::string> categorical;              // columns to one-hot
    std::vector<FeatureGroup> dummy_groups;            // pre-encoded groups
    std::vector<std::string> fixed;                    // group names exempt from elimination
    bool smote = false;
    int smote_k = 5;
};

struct RunConfig {
    DataConfig data;
    ModelSpec m1;
    ModelSpec m2;
    Criterion criterion;
    AgreeMetric agreeability = AgreeMetric::cohen_kappa;
    std::optional<TrainParams> train_params;
    std::uint64_t seed = 0;
    double tau = 0.5;
    int threads = 1;
    std::string out_dir = ".";
};

/// Parse and validate a config document. Every problem found is collected
/// and reported together in one ConfigError; nothing is computed until the
/// config is clean.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::string& path);

nlohmann::json run_config_to_json(const RunConfig& cfg);

struct ExperimentResult {
    ComparisonRun run;
    std::filesystem::path results_json;
    std::filesystem::path results_csv;
    std::filesystem::path manifest_json;
};

/// Execute the full pipeline (load, encode, split, optional SMOTE,
/// compare_models), then write results.json, results.csv and a run
/// manifest (config echo, library version, wall time) into out_dir.
/// Iteration summaries go to `log` when set.
ExperimentResult run_experiment(const RunConfig& cfg, std::ostream* log = nullptr);

/// Tabular export, one row per iteration:
/// iteration,m1_best_score,m2_best_score,best_agreeability,
/// mean_agreeability,std_agreeability,m1_dropped,m2_dropped.
/// Mean/std cells are empty for the single-candidate first iteration.
std::string export_results_csv(const ComparisonRun& run);

/// Full-fidelity serialization: config snapshot, per-iteration candidate
/// detail (feature lists, scores), paired agreeability and the retained
/// best predictions. Round-trips exactly through run_from_json.
nlohmann::json run_to_json(const ComparisonRun& run);
ComparisonRun run_from_json(const nlohmann::json& doc);

enum class PlotKind { agreeability_curves, dual_axis };

PlotKind plot_kind_from_string(const std::string& s);

/// A static SVG plus the numeric plot-data CSV behind it (the CSV is the
/// testable contract; the SVG is a convenience). agreeability_curves shows
/// best and mean agreeability per iteration with a +/-1 std band;
/// dual_axis shows each model's best score (right axis) against the
/// agreeability curves (left axis). Requires at least two iterations.
struct PlotFiles {
    std::string svg;
    std::string data_csv;
};

PlotFiles emit_plots(const ComparisonRun& run, PlotKind kind);

/// Shortest round-trip decimal form (used by every CSV writer so repeated
/// runs produce byte-identical files).
std::string format_double(double v);

nlohmann::json model_spec_to_json(const ModelSpec& spec);
ModelSpec model_spec_from_json(const nlohmann::json& doc);
nlohmann::json n_best_report_to_json(const NBestReport& report);

}  // namespace tandem
