#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tandem/matrix.hpp"

namespace tandem {

enum class Task { classification, regression };

std::string to_string(Task t);
Task task_from_string(const std::string& s);

/// Tabular learning problem: numeric predictor matrix, named columns and a
/// target vector. Classification targets must be exactly 0 or 1.
struct Dataset {
    std::vector<std::string> columns;
    Matrix X;
    std::vector<double> y;
    Task task = Task::classification;

    std::size_t n_rows() const { return X.rows(); }
    std::size_t n_cols() const { return X.cols(); }

    /// Index of a named column; throws if absent.
    std::size_t column_index(const std::string& name) const;

    /// Enforces the structural invariants (shape consistency, unique column
    /// names, binary targets for classification). Throws on violation.
    void validate() const;
};

/// Named set of columns treated as one feature during elimination. Dummy
/// columns from one categorical variable form one group; plain columns are
/// singleton groups. Fixed groups are exempt from elimination.
struct FeatureGroup {
    std::string name;
    std::vector<std::string> members;
    bool fixed = false;

    bool operator==(const FeatureGroup&) const = default;
};

struct FeatureSet {
    std::vector<FeatureGroup> groups;

    const FeatureGroup* find(const std::string& name) const;
    std::vector<std::string> removable_names() const;
    std::size_t removable_count() const;

    /// Every member column must exist in the dataset and belong to exactly
    /// one group; at least one group must be removable.
    void validate(const Dataset& d) const;

    bool operator==(const FeatureSet&) const = default;
};

struct SplitConfig {
    double train_fraction = 0.8;  // strictly inside (0, 1)
    std::uint64_t seed = 0;
};

/// Parse an RFC-4180-style CSV (header row required, UTF-8, '.' decimals)
/// into a Dataset. The target column is removed from X and placed in y; row
/// order is preserved. Missing or non-numeric cells are rejected with the
/// offending row and column named; this library does no imputation.
Dataset load_csv(const std::string& path, const std::string& target, Task task);

/// Seed-driven shuffle, then a disjoint partition of the rows into
/// floor(n * train_fraction) training rows and the remainder validation.
/// The same seed always yields the same partition.
std::pair<Dataset, Dataset> train_val_split(const Dataset& d, const SplitConfig& cfg);

/// Expand each listed categorical column with k distinct values into k
/// binary columns named "<col>=<value>", bound together as one FeatureGroup
/// (all k levels are kept). Unlisted columns become singleton groups. The
/// returned groups cover every output column in original column order.
std::pair<Dataset, std::vector<FeatureGroup>> one_hot_encode(
    const Dataset& d, const std::vector<std::string>& categorical);

/// Oversample the minority class to exact parity by interpolating between a
/// minority row and one of its k nearest minority neighbours:
/// x_new = x_i + u * (x_nn - x_i), u uniform in [0, 1]. Distances are
/// Euclidean on the raw, unscaled columns. Scale beforehand if the columns
/// have incomparable units. Already balanced input is returned unchanged.
Dataset smote_balance(const Dataset& train, int k, std::uint64_t seed);

}  // namespace tandem
