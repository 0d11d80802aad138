#include "tandem/search.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <ostream>
#include <set>
#include <thread>

#include "tandem/error.hpp"
#include "tandem/rng.hpp"

namespace tandem {

namespace {

// Columns backing a set of groups, in dataset column order.
std::vector<std::size_t> columns_for(const Dataset& d, const FeatureSet& fs,
                                     const std::vector<std::string>& removable,
                                     const std::string* skip) {
    std::set<std::string> wanted;
    for (const auto& name : removable) {
        if (skip && name == *skip) continue;
        wanted.insert(name);
    }
    std::vector<std::size_t> idx;
    for (const auto& g : fs.groups) {
        if (!g.fixed && !wanted.count(g.name)) continue;
        for (const auto& m : g.members) idx.push_back(d.column_index(m));
    }
    std::sort(idx.begin(), idx.end());
    return idx;
}

std::vector<std::string> groups_after_drop(const FeatureSet& fs,
                                           const std::vector<std::string>& removable,
                                           const std::string* skip) {
    // All groups the model still fits (fixed ones included), in fs order.
    std::set<std::string> live(removable.begin(), removable.end());
    if (skip) live.erase(*skip);
    std::vector<std::string> out;
    for (const auto& g : fs.groups)
        if (g.fixed || live.count(g.name)) out.push_back(g.name);
    return out;
}

std::size_t group_position(const FeatureSet& fs, const std::string& name) {
    for (std::size_t i = 0; i < fs.groups.size(); ++i)
        if (fs.groups[i].name == name) return i;
    throw Error("search: group \"" + name + "\" not in the feature set");
}

Candidate evaluate_one(const ModelSpec& spec, const Dataset& train, const Dataset& val,
                       const FeatureSet& fs, const std::vector<std::string>& groups,
                       const std::string* removed, const Criterion& criterion,
                       const std::optional<TrainParams>& params, const EvalContext& ctx) {
    const std::size_t tag = removed ? group_position(fs, *removed) : fs.groups.size();
    const std::uint64_t candidate_seed =
        seed_combine(seed_combine(ctx.run_seed, static_cast<std::uint64_t>(ctx.iteration)),
                     static_cast<std::uint64_t>(tag));

    const std::vector<std::size_t> cols = columns_for(train, fs, groups, removed);
    const Matrix X_train = train.X.select_columns(cols);
    const Matrix X_val = val.X.select_columns(cols);

    ModelSpec seeded = spec;
    seeded.seed = seed_combine(candidate_seed, spec.seed);
    const auto model = fit(seeded, X_train, train.y, params);
    if (ctx.fit_counter) ctx.fit_counter->fetch_add(1, std::memory_order_relaxed);

    std::vector<double> preds = model->predict(X_val);
    if (train.task == Task::classification) preds = apply_threshold(preds, ctx.tau);

    Candidate c;
    if (removed) c.removed_group = *removed;
    c.remaining_groups = groups_after_drop(fs, groups, removed);
    c.score = score(criterion, val.y, preds);
    c.predictions = std::move(preds);
    return c;
}

void sort_candidates(std::vector<Candidate>& cs, const Criterion& criterion) {
    // Ties keep the incoming (feature-set) order: first listed group wins.
    std::stable_sort(cs.begin(), cs.end(), [&](const Candidate& a, const Candidate& b) {
        return better(criterion, a.score, b.score) == Better::a_better;
    });
}

double sample_std(const std::vector<double>& v, double mean) {
    double s = 0.0;
    for (double x : v) {
        const double d = x - mean;
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

void log_iteration(std::ostream* log, const IterationResult& it, std::size_t total,
                   const Criterion& criterion) {
    if (!log) return;
    auto model_part = [&](const ModelIteration& m) {
        std::string s = criterion.str() + "=" + std::to_string(m.best_score);
        if (m.dropped_group) s += " drop=" + *m.dropped_group;
        return s;
    };
    (*log) << "iteration " << it.index << "/" << total << ": m1[" << model_part(it.m1)
           << "] m2[" << model_part(it.m2) << "] agree[best=" << it.best_agreeability;
    if (it.mean_agreeability)
        (*log) << " mean=" << *it.mean_agreeability << " std=" << *it.std_agreeability;
    (*log) << "]\n";
}

}  // namespace

std::vector<Candidate> evaluate_candidates(const ModelSpec& spec, const Dataset& train,
                                           const Dataset& val, const FeatureSet& fs,
                                           const std::vector<std::string>& groups,
                                           bool drop_each, const Criterion& criterion,
                                           const std::optional<TrainParams>& params,
                                           const EvalContext& ctx) {
    if (groups.empty()) throw Error("evaluate_candidates: no removable groups");

    if (!drop_each) {
        try {
            return {evaluate_one(spec, train, val, fs, groups, nullptr, criterion, params, ctx)};
        } catch (const std::exception& e) {
            throw Error("iteration " + std::to_string(ctx.iteration) + ", full set: " + e.what());
        }
    }

    std::vector<Candidate> out(groups.size());
    std::vector<std::exception_ptr> failures(groups.size());
    const std::size_t n_workers =
        std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(
                                     std::max(1, ctx.threads)), groups.size()));

    auto work = [&](std::size_t worker) {
        for (std::size_t i = worker; i < groups.size(); i += n_workers) {
            try {
                out[i] = evaluate_one(spec, train, val, fs, groups, &groups[i], criterion,
                                      params, ctx);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    if (n_workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }

    for (std::size_t i = 0; i < failures.size(); ++i) {
        if (!failures[i]) continue;
        try {
            std::rethrow_exception(failures[i]);
        } catch (const std::exception& e) {
            throw Error("iteration " + std::to_string(ctx.iteration) + ", group \"" +
                        groups[i] + "\": " + e.what());
        }
    }
    return out;
}

ComparisonRun compare_models(const ModelSpec& m1, const ModelSpec& m2, const Dataset& train,
                             const Dataset& val, const FeatureSet& fs,
                             const Criterion& criterion, AgreeMetric agree_metric,
                             const std::optional<TrainParams>& params,
                             const SearchOptions& options) {
    train.validate();
    val.validate();
    fs.validate(train);
    fs.validate(val);
    if (train.columns != val.columns)
        throw Error("compare_models: train and validation columns differ");
    if (train.task != val.task)
        throw Error("compare_models: train and validation tasks differ");
    if (!criterion.compatible_with(train.task))
        throw Error("compare_models: criterion \"" + criterion.str() +
                    "\" is incompatible with a " + to_string(train.task) + " task");
    const bool classification = train.task == Task::classification;
    if ((agree_metric == AgreeMetric::cohen_kappa) != classification)
        throw Error("compare_models: agreeability metric \"" + to_string(agree_metric) +
                    "\" is incompatible with a " + to_string(train.task) + " task");
    if ((m1.kind() == ModelKind::layered_net || m2.kind() == ModelKind::layered_net) && !params)
        throw Error("compare_models: TrainParams required for a layered_net model");
    m1.validate();
    m2.validate();

    const std::vector<std::string> removable = fs.removable_names();
    const std::size_t k = removable.size();
    if (k < 1) throw Error("compare_models: need at least one removable group");

    ComparisonRun run;
    run.config = RunSnapshot{m1, m2, train.task, criterion, agree_metric,
                             params, options.seed, options.tau, fs};

    std::atomic<std::int64_t> fits{0};
    EvalContext ctx;
    ctx.run_seed = options.seed;
    ctx.threads = options.threads;
    ctx.tau = options.tau;
    ctx.fit_counter = &fits;

    // Iteration 1: both models on the full set. One candidate each, one
    // agreeability value, nothing dropped.
    {
        ctx.iteration = 1;
        IterationResult it;
        it.index = 1;
        it.m1.candidates =
            evaluate_candidates(m1, train, val, fs, removable, false, criterion, params, ctx);
        it.m2.candidates =
            evaluate_candidates(m2, train, val, fs, removable, false, criterion, params, ctx);
        it.m1.best_score = it.m1.candidates[0].score;
        it.m2.best_score = it.m2.candidates[0].score;
        it.paired_agreeability = {agreement_value(agree_metric, it.m1.candidates[0].predictions,
                                                  it.m2.candidates[0].predictions)};
        it.best_agreeability = it.paired_agreeability[0];
        log_iteration(options.log, it, k, criterion);
        run.iterations.push_back(std::move(it));
    }

    std::vector<std::string> remaining_1 = removable;
    std::vector<std::string> remaining_2 = removable;

    for (std::size_t iter = 2; iter <= k; ++iter) {
        ctx.iteration = static_cast<int>(iter);
        IterationResult it;
        it.index = static_cast<int>(iter);

        it.m1.candidates = evaluate_candidates(m1, train, val, fs, remaining_1, true,
                                               criterion, params, ctx);
        it.m2.candidates = evaluate_candidates(m2, train, val, fs, remaining_2, true,
                                               criterion, params, ctx);
        sort_candidates(it.m1.candidates, criterion);
        sort_candidates(it.m2.candidates, criterion);

        if (it.m1.candidates.size() != it.m2.candidates.size())
            throw Error("compare_models: candidate lists diverged in length");

        const std::size_t pairs = it.m1.candidates.size();
        it.paired_agreeability.resize(pairs);
        for (std::size_t r = 0; r < pairs; ++r)
            it.paired_agreeability[r] = agreement_value(
                agree_metric, it.m1.candidates[r].predictions, it.m2.candidates[r].predictions);

        it.best_agreeability = it.paired_agreeability[0];
        const double mean =
            std::accumulate(it.paired_agreeability.begin(), it.paired_agreeability.end(), 0.0) /
            static_cast<double>(pairs);
        it.mean_agreeability = mean;
        it.std_agreeability = sample_std(it.paired_agreeability, mean);

        // Each model independently drops the group whose removal scored best.
        it.m1.best_score = it.m1.candidates[0].score;
        it.m2.best_score = it.m2.candidates[0].score;
        it.m1.dropped_group = it.m1.candidates[0].removed_group;
        it.m2.dropped_group = it.m2.candidates[0].removed_group;
        std::erase(remaining_1, *it.m1.dropped_group);
        std::erase(remaining_2, *it.m2.dropped_group);

        // Only the best candidate's predictions are retained.
        for (std::size_t r = 1; r < pairs; ++r) {
            it.m1.candidates[r].predictions.clear();
            it.m2.candidates[r].predictions.clear();
        }

        log_iteration(options.log, it, k, criterion);
        run.iterations.push_back(std::move(it));
    }

    run.total_fits = fits.load();
    return run;
}

std::string to_string(NBestTest t) {
    switch (t) {
        case NBestTest::mcnemar_binomial: return "mcnemar_binomial";
        case NBestTest::mcnemar_chisquare: return "mcnemar_chisquare";
        case NBestTest::t_test: return "t_test";
    }
    return "?";
}

NBestTest n_best_test_from_string(const std::string& s) {
    if (s == "mcnemar_binomial") return NBestTest::mcnemar_binomial;
    if (s == "mcnemar_chisquare") return NBestTest::mcnemar_chisquare;
    if (s == "t_test") return NBestTest::t_test;
    throw Error("unknown test \"" + s +
                "\" (valid options: mcnemar_binomial, mcnemar_chisquare, t_test)");
}

namespace {

std::vector<NBestPair> n_best_for_model(const ComparisonRun& run, bool first_model, int n,
                                        NBestTest test) {
    struct Entry {
        int iteration;
        double score;
        const std::vector<double>* predictions;
    };
    std::vector<Entry> entries;
    for (const auto& it : run.iterations) {
        const ModelIteration& m = first_model ? it.m1 : it.m2;
        entries.push_back({it.index, m.best_score, &m.candidates[0].predictions});
    }
    // Best first; ties keep the earlier iteration.
    std::stable_sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
        return better(run.config.criterion, a.score, b.score) == Better::a_better;
    });

    std::vector<NBestPair> out;
    for (int r = 0; r + 1 < n; ++r) {
        const Entry& ea = entries[static_cast<std::size_t>(r)];
        const Entry& eb = entries[static_cast<std::size_t>(r) + 1];
        NBestPair pair;
        pair.rank_a = r + 1;
        pair.rank_b = r + 2;
        pair.iteration_a = ea.iteration;
        pair.iteration_b = eb.iteration;
        try {
            switch (test) {
                case NBestTest::mcnemar_binomial:
                    pair.result = mcnemar_test(mcnemar_table(*ea.predictions, *eb.predictions),
                                               McNemarVariant::binomial);
                    break;
                case NBestTest::mcnemar_chisquare:
                    pair.result = mcnemar_test(mcnemar_table(*ea.predictions, *eb.predictions),
                                               McNemarVariant::chisquare);
                    break;
                case NBestTest::t_test:
                    pair.result = two_sample_t(*ea.predictions, *eb.predictions);
                    break;
            }
        } catch (const std::exception& e) {
            pair.error = e.what();  // degenerate pair: reported, not fatal
        }
        out.push_back(std::move(pair));
    }
    return out;
}

}  // namespace

NBestReport compare_n_best(const ComparisonRun& run, int n, NBestTest test) {
    if (run.iterations.empty()) throw Error("compare_n_best: run has no iterations");
    if (n < 2) throw Error("compare_n_best: n must be at least 2");
    if (n > static_cast<int>(run.iterations.size()))
        throw Error("compare_n_best: n = " + std::to_string(n) + " exceeds the " +
                    std::to_string(run.iterations.size()) + " stored iterations");
    const bool classification = run.config.task == Task::classification;
    if ((test == NBestTest::t_test) == classification)
        throw Error("compare_n_best: test \"" + to_string(test) +
                    "\" is incompatible with a " + to_string(run.config.task) + " task");

    NBestReport report;
    report.m1 = n_best_for_model(run, true, n, test);
    report.m2 = n_best_for_model(run, false, n, test);
    return report;
}

}  // namespace tandem
