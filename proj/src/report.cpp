#include "tandem/report.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <set>

#include "tandem/error.hpp"
#include "tandem/rng.hpp"
#include "tandem/version.hpp"

namespace tandem {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Model spec <-> JSON

json model_spec_to_json(const ModelSpec& spec) {
    json j;
    j["kind"] = to_string(spec.kind());
    j["seed"] = spec.seed;
    switch (spec.kind()) {
        case ModelKind::logistic: {
            const auto& c = std::get<LogisticConfig>(spec.config);
            j["learning_rate"] = c.learning_rate;
            j["max_iter"] = c.max_iter;
            j["tol"] = c.tol;
            j["lambda"] = c.lambda;
            break;
        }
        case ModelKind::forest: {
            const auto& c = std::get<ForestConfig>(spec.config);
            j["n_trees"] = c.n_trees;
            j["min_samples_split"] = c.min_samples_split;
            break;
        }
        case ModelKind::layered_net: {
            const auto& c = std::get<LayeredNetConfig>(spec.config);
            j["learning_rate"] = c.learning_rate;
            j["output"] = c.output == OutputKind::sigmoid ? "sigmoid" : "linear";
            json layers = json::array();
            for (const auto& l : c.layers) {
                layers.push_back({{"units", l.units},
                                  {"activation", to_string(l.activation)},
                                  {"batch_norm", l.batch_norm}});
            }
            j["layers"] = std::move(layers);
            break;
        }
        case ModelKind::linear:
            break;
    }
    return j;
}

namespace {

// Collect one spec; problems are appended to `errors` under `where`.
std::optional<ModelSpec> parse_model_spec(const json& doc, const std::string& where,
                                          std::vector<std::string>& errors) {
    if (!doc.is_object()) {
        errors.push_back(where + ": must be an object");
        return std::nullopt;
    }
    if (!doc.contains("kind") || !doc["kind"].is_string()) {
        errors.push_back(where + ".kind: required string (logistic, forest, layered_net, linear)");
        return std::nullopt;
    }

    static const std::set<std::string> common{"kind", "seed"};
    static const std::set<std::string> logistic_keys{"learning_rate", "max_iter", "tol", "lambda"};
    static const std::set<std::string> forest_keys{"n_trees", "min_samples_split"};
    static const std::set<std::string> net_keys{"learning_rate", "output", "layers"};

    ModelKind kind;
    try {
        kind = model_kind_from_string(doc["kind"].get<std::string>());
    } catch (const std::exception& e) {
        errors.push_back(where + ".kind: " + e.what());
        return std::nullopt;
    }

    const std::set<std::string>* allowed = nullptr;
    switch (kind) {
        case ModelKind::logistic: allowed = &logistic_keys; break;
        case ModelKind::forest: allowed = &forest_keys; break;
        case ModelKind::layered_net: allowed = &net_keys; break;
        case ModelKind::linear: allowed = nullptr; break;
    }
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (common.count(key)) continue;
        if (allowed && allowed->count(key)) continue;
        errors.push_back(where + "." + key + ": unknown field for kind \"" +
                         to_string(kind) + "\"");
    }

    ModelSpec spec;
    try {
        const std::uint64_t seed = doc.value("seed", std::uint64_t{0});
        switch (kind) {
            case ModelKind::logistic: {
                LogisticConfig c;
                c.learning_rate = doc.value("learning_rate", c.learning_rate);
                c.max_iter = doc.value("max_iter", c.max_iter);
                c.tol = doc.value("tol", c.tol);
                c.lambda = doc.value("lambda", c.lambda);
                spec = ModelSpec::logistic(c, seed);
                break;
            }
            case ModelKind::forest: {
                ForestConfig c;
                c.n_trees = doc.value("n_trees", c.n_trees);
                c.min_samples_split = doc.value("min_samples_split", c.min_samples_split);
                spec = ModelSpec::forest(c, seed);
                break;
            }
            case ModelKind::layered_net: {
                LayeredNetConfig c;
                c.learning_rate = doc.value("learning_rate", c.learning_rate);
                const std::string out = doc.value("output", std::string("sigmoid"));
                if (out == "sigmoid") c.output = OutputKind::sigmoid;
                else if (out == "linear") c.output = OutputKind::linear;
                else {
                    errors.push_back(where + ".output: \"" + out +
                                     "\" (valid options: sigmoid, linear)");
                    return std::nullopt;
                }
                if (doc.contains("layers")) {
                    for (const auto& lj : doc["layers"]) {
                        LayerSpec l;
                        l.units = lj.value("units", 0);
                        l.activation = activation_from_string(
                            lj.value("activation", std::string("linear")));
                        l.batch_norm = lj.value("batch_norm", false);
                        c.layers.push_back(l);
                    }
                } else {
                    // Documented default architecture: 128-64 hidden units.
                    c.layers = {{128, Activation::linear, false}, {64, Activation::linear, false}};
                }
                spec = ModelSpec::layered_net(std::move(c), seed);
                break;
            }
            case ModelKind::linear:
                spec = ModelSpec::linear(seed);
                break;
        }
        spec.validate();
    } catch (const std::exception& e) {
        errors.push_back(where + ": " + e.what());
        return std::nullopt;
    }
    return spec;
}

ModelSpec require_model_spec(const json& doc) {
    std::vector<std::string> errors;
    auto spec = parse_model_spec(doc, "model", errors);
    if (!spec) throw Error(errors.empty() ? "bad model spec" : errors.front());
    return *spec;
}

json train_params_to_json(const TrainParams& p) {
    return {{"batch_size", p.batch_size},   {"epochs", p.epochs},
            {"validation_split", p.validation_split}, {"patience", p.patience},
            {"restore_best", p.restore_best}, {"verbose", p.verbose}};
}

TrainParams train_params_from_json(const json& doc) {
    TrainParams p;
    p.batch_size = doc.value("batch_size", p.batch_size);
    p.epochs = doc.value("epochs", p.epochs);
    p.validation_split = doc.value("validation_split", p.validation_split);
    p.patience = doc.value("patience", p.patience);
    p.restore_best = doc.value("restore_best", p.restore_best);
    p.verbose = doc.value("verbose", p.verbose);
    return p;
}

json feature_set_to_json(const FeatureSet& fs) {
    json arr = json::array();
    for (const auto& g : fs.groups)
        arr.push_back({{"name", g.name}, {"members", g.members}, {"fixed", g.fixed}});
    return arr;
}

FeatureSet feature_set_from_json(const json& arr) {
    FeatureSet fs;
    for (const auto& gj : arr) {
        FeatureGroup g;
        g.name = gj.at("name").get<std::string>();
        g.members = gj.at("members").get<std::vector<std::string>>();
        g.fixed = gj.value("fixed", false);
        fs.groups.push_back(std::move(g));
    }
    return fs;
}

}  // namespace

ModelSpec model_spec_from_json(const json& doc) { return require_model_spec(doc); }

// ---------------------------------------------------------------------------
// Run <-> JSON

namespace {

json model_iteration_to_json(const ModelIteration& m) {
    json candidates = json::array();
    for (const auto& c : m.candidates) {
        json cj;
        cj["removed_group"] = c.removed_group ? json(*c.removed_group) : json(nullptr);
        cj["remaining_groups"] = c.remaining_groups;
        cj["score"] = c.score;
        candidates.push_back(std::move(cj));
    }
    json j;
    j["candidates"] = std::move(candidates);
    j["dropped_group"] = m.dropped_group ? json(*m.dropped_group) : json(nullptr);
    j["best_score"] = m.best_score;
    j["best_predictions"] = m.candidates.empty() ? std::vector<double>{}
                                                 : m.candidates.front().predictions;
    return j;
}

ModelIteration model_iteration_from_json(const json& j) {
    ModelIteration m;
    for (const auto& cj : j.at("candidates")) {
        Candidate c;
        if (!cj.at("removed_group").is_null())
            c.removed_group = cj.at("removed_group").get<std::string>();
        c.remaining_groups = cj.at("remaining_groups").get<std::vector<std::string>>();
        c.score = cj.at("score").get<double>();
        m.candidates.push_back(std::move(c));
    }
    if (!j.at("dropped_group").is_null())
        m.dropped_group = j.at("dropped_group").get<std::string>();
    m.best_score = j.at("best_score").get<double>();
    if (!m.candidates.empty())
        m.candidates.front().predictions = j.at("best_predictions").get<std::vector<double>>();
    return m;
}

}  // namespace

json run_to_json(const ComparisonRun& run) {
    json j;
    json cfg;
    cfg["m1"] = model_spec_to_json(run.config.m1);
    cfg["m2"] = model_spec_to_json(run.config.m2);
    cfg["task"] = to_string(run.config.task);
    cfg["criterion"] = run.config.criterion.str();
    cfg["agreeability"] = to_string(run.config.agreeability);
    cfg["train_params"] =
        run.config.params ? train_params_to_json(*run.config.params) : json(nullptr);
    cfg["seed"] = run.config.seed;
    cfg["tau"] = run.config.tau;
    cfg["feature_set"] = feature_set_to_json(run.config.feature_set);
    j["config"] = std::move(cfg);
    j["total_fits"] = run.total_fits;

    json iterations = json::array();
    for (const auto& it : run.iterations) {
        json ij;
        ij["index"] = it.index;
        ij["m1"] = model_iteration_to_json(it.m1);
        ij["m2"] = model_iteration_to_json(it.m2);
        ij["paired_agreeability"] = it.paired_agreeability;
        ij["best_agreeability"] = it.best_agreeability;
        ij["mean_agreeability"] =
            it.mean_agreeability ? json(*it.mean_agreeability) : json(nullptr);
        ij["std_agreeability"] = it.std_agreeability ? json(*it.std_agreeability) : json(nullptr);
        iterations.push_back(std::move(ij));
    }
    j["iterations"] = std::move(iterations);
    return j;
}

ComparisonRun run_from_json(const json& doc) {
    ComparisonRun run;
    const json& cfg = doc.at("config");
    run.config.m1 = model_spec_from_json(cfg.at("m1"));
    run.config.m2 = model_spec_from_json(cfg.at("m2"));
    run.config.task = task_from_string(cfg.at("task").get<std::string>());
    run.config.criterion = Criterion::from_string(cfg.at("criterion").get<std::string>());
    run.config.agreeability =
        agree_metric_from_string(cfg.at("agreeability").get<std::string>());
    if (!cfg.at("train_params").is_null())
        run.config.params = train_params_from_json(cfg.at("train_params"));
    run.config.seed = cfg.at("seed").get<std::uint64_t>();
    run.config.tau = cfg.at("tau").get<double>();
    run.config.feature_set = feature_set_from_json(cfg.at("feature_set"));
    run.total_fits = doc.at("total_fits").get<std::int64_t>();

    for (const auto& ij : doc.at("iterations")) {
        IterationResult it;
        it.index = ij.at("index").get<int>();
        it.m1 = model_iteration_from_json(ij.at("m1"));
        it.m2 = model_iteration_from_json(ij.at("m2"));
        it.paired_agreeability = ij.at("paired_agreeability").get<std::vector<double>>();
        it.best_agreeability = ij.at("best_agreeability").get<double>();
        if (!ij.at("mean_agreeability").is_null())
            it.mean_agreeability = ij.at("mean_agreeability").get<double>();
        if (!ij.at("std_agreeability").is_null())
            it.std_agreeability = ij.at("std_agreeability").get<double>();
        run.iterations.push_back(std::move(it));
    }
    return run;
}

// ---------------------------------------------------------------------------
// CSV export

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

}  // namespace

std::string export_results_csv(const ComparisonRun& run) {
    std::string out =
        "iteration,m1_best_score,m2_best_score,best_agreeability,"
        "mean_agreeability,std_agreeability,m1_dropped,m2_dropped\n";
    for (const auto& it : run.iterations) {
        out += std::to_string(it.index);
        out += ',' + format_double(it.m1.best_score);
        out += ',' + format_double(it.m2.best_score);
        out += ',' + format_double(it.best_agreeability);
        out += ',';
        if (it.mean_agreeability) out += format_double(*it.mean_agreeability);
        out += ',';
        if (it.std_agreeability) out += format_double(*it.std_agreeability);
        out += ',';
        if (it.m1.dropped_group) out += csv_escape(*it.m1.dropped_group);
        out += ',';
        if (it.m2.dropped_group) out += csv_escape(*it.m2.dropped_group);
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

const std::set<std::string> kTopKeys{"data",         "model1", "model2", "criterion",
                                     "agreeability", "train_params", "seed", "tau",
                                     "threads",      "out_dir"};
const std::set<std::string> kDataKeys{"csv",          "split",       "train_csv", "val_csv",
                                      "target",       "task",        "categorical",
                                      "dummy_groups", "fixed",       "smote"};

}  // namespace

RunConfig parse_run_config(const json& doc) {
    std::vector<std::string> errors;
    RunConfig cfg;

    if (!doc.is_object()) throw ConfigError("config: document must be a JSON object");

    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (!kTopKeys.count(key)) errors.push_back(key + ": unknown field");
    }

    // --- data ---
    if (!doc.contains("data") || !doc["data"].is_object()) {
        errors.push_back("data: required object");
    } else {
        const json& dj = doc["data"];
        for (const auto& [key, value] : dj.items()) {
            (void)value;
            if (!kDataKeys.count(key)) errors.push_back("data." + key + ": unknown field");
        }
        try {
            if (dj.contains("csv")) cfg.data.csv = dj["csv"].get<std::string>();
            if (dj.contains("train_csv")) cfg.data.train_csv = dj["train_csv"].get<std::string>();
            if (dj.contains("val_csv")) cfg.data.val_csv = dj["val_csv"].get<std::string>();
            if (cfg.data.csv) {
                if (cfg.data.train_csv || cfg.data.val_csv)
                    errors.push_back("data: give either csv+split or train_csv+val_csv, not both");
                SplitConfig sc;
                if (dj.contains("split")) {
                    sc.train_fraction = dj["split"].value("train_fraction", sc.train_fraction);
                    sc.seed = dj["split"].value("seed", sc.seed);
                }
                if (!(sc.train_fraction > 0.0 && sc.train_fraction < 1.0))
                    errors.push_back(
                        "data.split.train_fraction: must lie strictly inside (0, 1)");
                cfg.data.split = sc;
            } else if (cfg.data.train_csv && cfg.data.val_csv) {
                if (dj.contains("split"))
                    errors.push_back("data.split: meaningless with pre-split train_csv/val_csv");
            } else {
                errors.push_back("data: need either csv (plus optional split) or both "
                                 "train_csv and val_csv");
            }

            if (dj.contains("target") && dj["target"].is_string())
                cfg.data.target = dj["target"].get<std::string>();
            else
                errors.push_back("data.target: required string");

            if (dj.contains("task")) {
                try {
                    cfg.data.task = task_from_string(dj["task"].get<std::string>());
                } catch (const std::exception& e) {
                    errors.push_back(std::string("data.task: ") + e.what());
                }
            } else {
                errors.push_back("data.task: required (classification or regression)");
            }

            if (dj.contains("categorical"))
                cfg.data.categorical = dj["categorical"].get<std::vector<std::string>>();
            if (dj.contains("fixed"))
                cfg.data.fixed = dj["fixed"].get<std::vector<std::string>>();
            if (dj.contains("dummy_groups")) {
                if (!dj["dummy_groups"].is_object()) {
                    errors.push_back("data.dummy_groups: must map group name -> column list");
                } else {
                    for (const auto& [name, members] : dj["dummy_groups"].items()) {
                        FeatureGroup g;
                        g.name = name;
                        g.members = members.get<std::vector<std::string>>();
                        cfg.data.dummy_groups.push_back(std::move(g));
                    }
                }
            }
            if (dj.contains("smote")) {
                cfg.data.smote = dj["smote"].value("enabled", false);
                cfg.data.smote_k = dj["smote"].value("k", 5);
                if (cfg.data.smote_k < 1) errors.push_back("data.smote.k: must be >= 1");
            }
        } catch (const std::exception& e) {
            errors.push_back(std::string("data: ") + e.what());
        }
    }

    // --- models ---
    std::optional<ModelSpec> m1, m2;
    if (doc.contains("model1")) m1 = parse_model_spec(doc["model1"], "model1", errors);
    else errors.push_back("model1: required object");
    if (doc.contains("model2")) m2 = parse_model_spec(doc["model2"], "model2", errors);
    else errors.push_back("model2: required object");

    // --- criterion / agreeability ---
    if (doc.contains("criterion") && doc["criterion"].is_string()) {
        try {
            cfg.criterion = Criterion::from_string(doc["criterion"].get<std::string>());
        } catch (const std::exception& e) {
            errors.push_back(std::string("criterion: ") + e.what());
        }
    } else {
        errors.push_back("criterion: required string");
    }
    if (doc.contains("agreeability") && doc["agreeability"].is_string()) {
        try {
            cfg.agreeability =
                agree_metric_from_string(doc["agreeability"].get<std::string>());
        } catch (const std::exception& e) {
            errors.push_back(std::string("agreeability: ") + e.what());
        }
    } else {
        errors.push_back("agreeability: required string");
    }

    if (doc.contains("train_params")) {
        try {
            cfg.train_params = train_params_from_json(doc["train_params"]);
        } catch (const std::exception& e) {
            errors.push_back(std::string("train_params: ") + e.what());
        }
    }

    try {
        cfg.seed = doc.value("seed", cfg.seed);
        cfg.tau = doc.value("tau", cfg.tau);
        cfg.threads = doc.value("threads", cfg.threads);
        cfg.out_dir = doc.value("out_dir", cfg.out_dir);
    } catch (const std::exception& e) {
        errors.push_back(std::string("config: ") + e.what());
    }
    if (cfg.tau < 0.0 || cfg.tau > 1.0) errors.push_back("tau: must lie in [0, 1]");
    if (cfg.threads < 1) errors.push_back("threads: must be >= 1");

    // --- cross-field checks ---
    if (m1 && m2) {
        cfg.m1 = *m1;
        cfg.m2 = *m2;
        const bool needs_params = cfg.m1.kind() == ModelKind::layered_net ||
                                  cfg.m2.kind() == ModelKind::layered_net;
        if (needs_params && !cfg.train_params)
            errors.push_back("train_params: required when a model is a layered_net");
    }
    if (doc.contains("data") && doc["data"].is_object() && doc["data"].contains("task")) {
        std::optional<Task> task;
        try {
            task = task_from_string(doc["data"]["task"].get<std::string>());
        } catch (const std::exception&) {
            // already recorded above
        }
        if (task) {
            // Each compatibility check stands alone so one bad field cannot
            // mask another's problem.
            if (doc.contains("criterion") && doc["criterion"].is_string()) {
                try {
                    const Criterion c =
                        Criterion::from_string(doc["criterion"].get<std::string>());
                    if (!c.compatible_with(*task))
                        errors.push_back("criterion: \"" + c.str() +
                                         "\" is incompatible with a " + to_string(*task) +
                                         " task");
                } catch (const std::exception&) {
                }
            }
            if (doc.contains("agreeability") && doc["agreeability"].is_string()) {
                try {
                    const AgreeMetric am =
                        agree_metric_from_string(doc["agreeability"].get<std::string>());
                    if ((am == AgreeMetric::cohen_kappa) != (*task == Task::classification))
                        errors.push_back("agreeability: \"" + to_string(am) +
                                         "\" is incompatible with a " + to_string(*task) +
                                         " task");
                } catch (const std::exception&) {
                }
            }
            if (*task == Task::regression && doc["data"].contains("smote") &&
                doc["data"]["smote"].value("enabled", false))
                errors.push_back("data.smote: only defined for classification");
        }
    }

    if (!errors.empty()) throw ConfigError(std::move(errors));
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file \"" + path + "\"");
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_run_config(doc);
}

json run_config_to_json(const RunConfig& cfg) {
    json dj;
    if (cfg.data.csv) {
        dj["csv"] = *cfg.data.csv;
        dj["split"] = {{"train_fraction", cfg.data.split->train_fraction},
                       {"seed", cfg.data.split->seed}};
    } else {
        dj["train_csv"] = *cfg.data.train_csv;
        dj["val_csv"] = *cfg.data.val_csv;
    }
    dj["target"] = cfg.data.target;
    dj["task"] = to_string(cfg.data.task);
    if (!cfg.data.categorical.empty()) dj["categorical"] = cfg.data.categorical;
    if (!cfg.data.dummy_groups.empty()) {
        json groups = json::object();
        for (const auto& g : cfg.data.dummy_groups) groups[g.name] = g.members;
        dj["dummy_groups"] = std::move(groups);
    }
    if (!cfg.data.fixed.empty()) dj["fixed"] = cfg.data.fixed;
    dj["smote"] = {{"enabled", cfg.data.smote}, {"k", cfg.data.smote_k}};

    json j;
    j["data"] = std::move(dj);
    j["model1"] = model_spec_to_json(cfg.m1);
    j["model2"] = model_spec_to_json(cfg.m2);
    j["criterion"] = cfg.criterion.str();
    j["agreeability"] = to_string(cfg.agreeability);
    if (cfg.train_params) j["train_params"] = train_params_to_json(*cfg.train_params);
    j["seed"] = cfg.seed;
    j["tau"] = cfg.tau;
    j["threads"] = cfg.threads;
    j["out_dir"] = cfg.out_dir;
    return j;
}

// ---------------------------------------------------------------------------
// Experiment pipeline

namespace {

// Assemble the feature set: encoded categorical groups and singletons from
// the loader, then the config's explicit dummy groups replace the
// singletons of their member columns, then fixed flags are applied.
FeatureSet assemble_feature_set(const std::vector<FeatureGroup>& encoded,
                                const DataConfig& data) {
    FeatureSet fs;
    fs.groups = encoded;

    for (const auto& dg : data.dummy_groups) {
        if (dg.members.empty())
            throw ConfigError("data.dummy_groups." + dg.name + ": no member columns");
        std::size_t insert_at = fs.groups.size();
        for (const auto& member : dg.members) {
            bool found = false;
            for (std::size_t i = 0; i < fs.groups.size(); ++i) {
                const auto& g = fs.groups[i];
                if (g.members.size() == 1 && g.members[0] == member && g.name == member) {
                    insert_at = std::min(insert_at, i);
                    found = true;
                    break;
                }
                if (std::find(g.members.begin(), g.members.end(), member) != g.members.end())
                    throw ConfigError("data.dummy_groups." + dg.name + ": column \"" + member +
                                      "\" already belongs to group \"" + g.name + "\"");
            }
            if (!found)
                throw ConfigError("data.dummy_groups." + dg.name + ": column \"" + member +
                                  "\" not found");
        }
        std::erase_if(fs.groups, [&](const FeatureGroup& g) {
            return g.members.size() == 1 &&
                   std::find(dg.members.begin(), dg.members.end(), g.members[0]) !=
                       dg.members.end();
        });
        FeatureGroup named = dg;
        fs.groups.insert(fs.groups.begin() + static_cast<std::ptrdiff_t>(
                                                 std::min(insert_at, fs.groups.size())),
                         std::move(named));
    }

    for (const auto& name : data.fixed) {
        bool found = false;
        for (auto& g : fs.groups) {
            if (g.name == name) {
                g.fixed = true;
                found = true;
                break;
            }
        }
        if (!found)
            throw ConfigError("data.fixed: group \"" + name + "\" not found "
                              "(fixed names refer to feature groups)");
    }
    return fs;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write \"" + path.string() + "\"");
    out << content;
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& cfg, std::ostream* log) {
    const auto t0 = std::chrono::steady_clock::now();

    Dataset train, val;
    std::vector<FeatureGroup> encoded_groups;
    if (cfg.data.csv) {
        Dataset full = load_csv(*cfg.data.csv, cfg.data.target, cfg.data.task);
        auto [enc, groups] = one_hot_encode(full, cfg.data.categorical);
        encoded_groups = std::move(groups);
        std::tie(train, val) = train_val_split(enc, *cfg.data.split);
    } else {
        // Pre-split files: derive the categorical levels from the union of
        // the two files so both sides get identical dummy columns.
        Dataset tr = load_csv(*cfg.data.train_csv, cfg.data.target, cfg.data.task);
        Dataset va = load_csv(*cfg.data.val_csv, cfg.data.target, cfg.data.task);
        if (tr.columns != va.columns)
            throw ConfigError("data: train_csv and val_csv have different columns");
        const std::size_t n_train = tr.n_rows();
        Dataset joint = tr;
        for (std::size_t r = 0; r < va.n_rows(); ++r) {
            joint.X.push_row(va.X.row(r));
            joint.y.push_back(va.y[r]);
        }
        auto [enc, groups] = one_hot_encode(joint, cfg.data.categorical);
        encoded_groups = std::move(groups);
        std::vector<std::size_t> idx_train(n_train);
        std::iota(idx_train.begin(), idx_train.end(), 0);
        std::vector<std::size_t> idx_val(va.n_rows());
        std::iota(idx_val.begin(), idx_val.end(), n_train);
        train.columns = val.columns = enc.columns;
        train.task = val.task = enc.task;
        train.X = enc.X.select_rows(idx_train);
        val.X = enc.X.select_rows(idx_val);
        train.y.assign(enc.y.begin(), enc.y.begin() + static_cast<std::ptrdiff_t>(n_train));
        val.y.assign(enc.y.begin() + static_cast<std::ptrdiff_t>(n_train), enc.y.end());
    }

    const FeatureSet fs = assemble_feature_set(encoded_groups, cfg.data);

    if (cfg.data.smote)
        train = smote_balance(train, cfg.data.smote_k, seed_combine(cfg.seed, 0x534d4f5445ULL));

    SearchOptions opts;
    opts.seed = cfg.seed;
    opts.threads = cfg.threads;
    opts.tau = cfg.tau;
    opts.log = log;

    ComparisonRun run = compare_models(cfg.m1, cfg.m2, train, val, fs, cfg.criterion,
                                       cfg.agreeability, cfg.train_params, opts);

    const auto t1 = std::chrono::steady_clock::now();
    const double wall_s =
        std::chrono::duration_cast<std::chrono::duration<double>>(t1 - t0).count();

    std::filesystem::create_directories(cfg.out_dir);
    ExperimentResult result;
    result.run = std::move(run);
    result.results_json = std::filesystem::path(cfg.out_dir) / "results.json";
    result.results_csv = std::filesystem::path(cfg.out_dir) / "results.csv";
    result.manifest_json = std::filesystem::path(cfg.out_dir) / "manifest.json";

    write_file(result.results_json, run_to_json(result.run).dump(2) + "\n");
    write_file(result.results_csv, export_results_csv(result.run));

    json manifest;
    manifest["tandem_version"] = TANDEM_VERSION;
    manifest["config"] = run_config_to_json(cfg);
    manifest["wall_time_seconds"] = wall_s;
    manifest["total_fits"] = result.run.total_fits;
    write_file(result.manifest_json, manifest.dump(2) + "\n");

    return result;
}

json n_best_report_to_json(const NBestReport& report) {
    auto side = [](const std::vector<NBestPair>& pairs) {
        json arr = json::array();
        for (const auto& p : pairs) {
            json pj;
            pj["rank_a"] = p.rank_a;
            pj["rank_b"] = p.rank_b;
            pj["iteration_a"] = p.iteration_a;
            pj["iteration_b"] = p.iteration_b;
            if (p.result) {
                json rj;
                rj["test_name"] = p.result->test_name;
                rj["statistic"] = p.result->statistic ? json(*p.result->statistic) : json(nullptr);
                rj["p_value"] = p.result->p_value;
                if (p.result->variant_chosen)
                    rj["variant_chosen"] = to_string(*p.result->variant_chosen);
                pj["result"] = std::move(rj);
            } else {
                pj["error"] = p.error;
            }
            arr.push_back(std::move(pj));
        }
        return arr;
    };
    json j;
    j["m1"] = side(report.m1);
    j["m2"] = side(report.m2);
    return j;
}

}  // namespace tandem
