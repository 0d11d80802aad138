#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tandem/agreeability.hpp"
#include "tandem/data.hpp"
#include "tandem/metrics.hpp"
#include "tandem/models.hpp"
#include "tandem/stat_tests.hpp"

namespace tandem {

/// One inner-loop result: the model refit with one group removed.
/// For classification, predictions are the thresholded labels; raw
/// probabilities are not retained. Predictions are kept only for the
/// best-ranked candidate of each iteration; the others are cleared once
/// the iteration's agreeability values are computed.
struct Candidate {
    std::optional<std::string> removed_group;  // nullopt for the full-set fit
    std::vector<std::string> remaining_groups;
    double score = 0.0;
    std::vector<double> predictions;
};

struct ModelIteration {
    std::vector<Candidate> candidates;  // sorted best -> worst
    std::optional<std::string> dropped_group;
    double best_score = 0.0;
};

/// One elimination step. paired_agreeability[r] is the agreement between
/// the two models' rank-(r+1) candidate predictions. mean/std are absent
/// exactly when only one candidate exists (the iteration-1 full-set fit).
struct IterationResult {
    int index = 0;  // 1-based
    ModelIteration m1;
    ModelIteration m2;
    std::vector<double> paired_agreeability;
    double best_agreeability = 0.0;
    std::optional<double> mean_agreeability;
    std::optional<double> std_agreeability;
};

/// Provenance carried by every run so results are reproducible and
/// self-describing when serialized.
struct RunSnapshot {
    ModelSpec m1;
    ModelSpec m2;
    Task task = Task::classification;
    Criterion criterion;
    AgreeMetric agreeability = AgreeMetric::cohen_kappa;
    std::optional<TrainParams> params;
    std::uint64_t seed = 0;
    double tau = 0.5;
    FeatureSet feature_set;
};

struct ComparisonRun {
    RunSnapshot config;
    std::vector<IterationResult> iterations;
    std::int64_t total_fits = 0;
};

struct SearchOptions {
    std::uint64_t seed = 0;
    int threads = 1;
    double tau = 0.5;            // classification threshold
    std::ostream* log = nullptr; // per-iteration summary lines, when set
};

/// Context for one candidate-evaluation sweep. Seeds are derived per
/// candidate from (run seed, iteration, group index), so worker scheduling
/// can never change results.
struct EvalContext {
    std::uint64_t run_seed = 0;
    int iteration = 1;
    int threads = 1;
    double tau = 0.5;
    std::atomic<std::int64_t>* fit_counter = nullptr;
};

/// Fit one candidate per removable group in `groups` (drop_each = true), or
/// a single candidate on the full `groups` set (drop_each = false).
/// Candidates come back in `groups` order regardless of how many worker
/// threads evaluated them. Fit errors are rethrown with the group named.
std::vector<Candidate> evaluate_candidates(const ModelSpec& spec, const Dataset& train,
                                           const Dataset& val, const FeatureSet& fs,
                                           const std::vector<std::string>& groups,
                                           bool drop_each, const Criterion& criterion,
                                           const std::optional<TrainParams>& params,
                                           const EvalContext& ctx);

/// Simultaneous backward elimination on two models with rank-paired
/// agreeability at every step.
///
/// Iteration 1 fits both models on the full set (one candidate, one
/// agreeability value, no mean/std). Each later iteration refits every
/// remaining removable group's complement, sorts candidates best-to-worst
/// by the criterion (ties break toward the group listed first in fs),
/// pairs the two models' candidates by rank for agreeability, and drops,
/// independently per model, the group whose removal scored best. A run
/// over k removable groups therefore has exactly k iterations and leaves
/// one group per model never individually eliminated. Fixed groups are
/// present in every fitted subset and never become candidates.
ComparisonRun compare_models(const ModelSpec& m1, const ModelSpec& m2, const Dataset& train,
                             const Dataset& val, const FeatureSet& fs,
                             const Criterion& criterion, AgreeMetric agree_metric,
                             const std::optional<TrainParams>& params = std::nullopt,
                             const SearchOptions& options = {});

enum class NBestTest { mcnemar_binomial, mcnemar_chisquare, t_test };

std::string to_string(NBestTest t);
NBestTest n_best_test_from_string(const std::string& s);

/// One consecutive pair from the n-best comparison. `error` is set instead
/// of `result` when the test is undefined for the pair (for example
/// McNemar with no discordant predictions).
struct NBestPair {
    int rank_a = 0;  // 1-based position in the sorted n-best list
    int rank_b = 0;
    int iteration_a = 0;  // iteration the ranked predictions came from
    int iteration_b = 0;
    std::optional<TestResult> result;
    std::string error;
};

struct NBestReport {
    std::vector<NBestPair> m1;
    std::vector<NBestPair> m2;
};

/// Within-model significance testing over the stored per-iteration best
/// predictions: sort them by score (criterion direction), take the top n
/// and test consecutive pairs (1st vs 2nd, ..., (n-1)th vs nth). Degenerate
/// pairs are reported per-pair, never fatal.
NBestReport compare_n_best(const ComparisonRun& run, int n, NBestTest test);

}  // namespace tandem
