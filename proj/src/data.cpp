#include "tandem/data.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "tandem/error.hpp"
#include "tandem/rng.hpp"

namespace tandem {

std::string to_string(Task t) {
    return t == Task::classification ? "classification" : "regression";
}

Task task_from_string(const std::string& s) {
    if (s == "classification") return Task::classification;
    if (s == "regression") return Task::regression;
    throw Error("unknown task \"" + s + "\" (valid options: classification, regression)");
}

std::size_t Dataset::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw Error("column \"" + name + "\" not found");
}

void Dataset::validate() const {
    if (columns.size() != X.cols())
        throw Error("dataset: " + std::to_string(columns.size()) + " column names for " +
                    std::to_string(X.cols()) + " matrix columns");
    if (y.size() != X.rows())
        throw Error("dataset: X has " + std::to_string(X.rows()) + " rows but y has " +
                    std::to_string(y.size()));
    std::set<std::string> seen;
    for (const auto& c : columns)
        if (!seen.insert(c).second) throw Error("dataset: duplicate column name \"" + c + "\"");
    if (task == Task::classification) {
        for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] != 0.0 && y[i] != 1.0)
                throw Error("dataset: classification target must be 0/1, row " +
                            std::to_string(i) + " has " + std::to_string(y[i]));
    }
}

const FeatureGroup* FeatureSet::find(const std::string& name) const {
    for (const auto& g : groups)
        if (g.name == name) return &g;
    return nullptr;
}

std::vector<std::string> FeatureSet::removable_names() const {
    std::vector<std::string> out;
    for (const auto& g : groups)
        if (!g.fixed) out.push_back(g.name);
    return out;
}

std::size_t FeatureSet::removable_count() const {
    return removable_names().size();
}

void FeatureSet::validate(const Dataset& d) const {
    std::set<std::string> group_names;
    std::set<std::string> member_seen;
    bool any_removable = false;
    for (const auto& g : groups) {
        if (g.name.empty()) throw Error("feature set: unnamed group");
        if (!group_names.insert(g.name).second)
            throw Error("feature set: duplicate group name \"" + g.name + "\"");
        if (g.members.empty())
            throw Error("feature set: group \"" + g.name + "\" has no member columns");
        for (const auto& m : g.members) {
            d.column_index(m);  // throws if the column is missing
            if (!member_seen.insert(m).second)
                throw Error("feature set: column \"" + m + "\" belongs to more than one group");
        }
        if (!g.fixed) any_removable = true;
    }
    if (groups.empty()) throw Error("feature set: no groups");
    if (!any_removable)
        throw Error("feature set: every group is fixed, nothing to eliminate");
}

std::pair<Dataset, Dataset> train_val_split(const Dataset& d, const SplitConfig& cfg) {
    if (d.n_rows() == 0) throw Error("train_val_split: empty dataset");
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0))
        throw Error("train_val_split: train_fraction must lie strictly inside (0, 1)");

    std::vector<std::size_t> order(d.n_rows());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(cfg.seed);
    rng.shuffle(order);

    const auto n_train = static_cast<std::size_t>(
        std::floor(static_cast<double>(d.n_rows()) * cfg.train_fraction));
    std::vector<std::size_t> train_idx(order.begin(), order.begin() + n_train);
    std::vector<std::size_t> val_idx(order.begin() + n_train, order.end());

    auto take = [&](const std::vector<std::size_t>& idx) {
        Dataset out;
        out.columns = d.columns;
        out.task = d.task;
        out.X = d.X.select_rows(idx);
        out.y.reserve(idx.size());
        for (std::size_t i : idx) out.y.push_back(d.y[i]);
        return out;
    };
    return {take(train_idx), take(val_idx)};
}

std::pair<Dataset, std::vector<FeatureGroup>> one_hot_encode(
    const Dataset& d, const std::vector<std::string>& categorical) {
    std::set<std::string> cat(categorical.begin(), categorical.end());
    for (const auto& name : categorical) d.column_index(name);  // fail early

    struct OutCol {
        std::string name;
        std::size_t source = 0;
        bool dummy = false;
        double level = 0.0;
    };
    std::vector<OutCol> out_cols;
    std::vector<FeatureGroup> groups;

    for (std::size_t c = 0; c < d.columns.size(); ++c) {
        const std::string& col = d.columns[c];
        if (!cat.count(col)) {
            out_cols.push_back({col, c, false, 0.0});
            groups.push_back({col, {col}, false});
            continue;
        }
        std::set<double> levels;
        for (std::size_t r = 0; r < d.n_rows(); ++r) levels.insert(d.X(r, c));
        if (levels.size() < 2)
            throw Error("one_hot_encode: column \"" + col +
                        "\" has a single distinct value, encoding is degenerate");
        FeatureGroup g{col, {}, false};
        for (double level : levels) {  // std::set iterates ascending: stable naming
            std::ostringstream name;
            name << col << "=";
            if (level == std::floor(level) && std::abs(level) < 1e15)
                name << static_cast<long long>(level);
            else
                name << level;
            out_cols.push_back({name.str(), c, true, level});
            g.members.push_back(name.str());
        }
        groups.push_back(std::move(g));
    }

    Dataset out;
    out.task = d.task;
    out.y = d.y;
    out.X = Matrix(d.n_rows(), out_cols.size());
    out.columns.reserve(out_cols.size());
    for (const auto& oc : out_cols) out.columns.push_back(oc.name);
    for (std::size_t r = 0; r < d.n_rows(); ++r) {
        for (std::size_t j = 0; j < out_cols.size(); ++j) {
            const auto& oc = out_cols[j];
            const double v = d.X(r, oc.source);
            out.X(r, j) = oc.dummy ? (v == oc.level ? 1.0 : 0.0) : v;
        }
    }
    out.validate();
    return {std::move(out), std::move(groups)};
}

Dataset smote_balance(const Dataset& train, int k, std::uint64_t seed) {
    if (train.task != Task::regression && train.task != Task::classification)
        throw Error("smote_balance: unknown task");
    if (train.task == Task::regression)
        throw Error("smote_balance: only defined for classification");
    if (k < 1) throw Error("smote_balance: k must be >= 1");
    train.validate();

    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < train.y.size(); ++i)
        (train.y[i] == 1.0 ? pos : neg).push_back(i);
    if (pos.empty() || neg.empty())
        throw Error("smote_balance: both classes must be present");
    if (pos.size() == neg.size()) return train;

    const auto& minority = pos.size() < neg.size() ? pos : neg;
    const double minority_label = pos.size() < neg.size() ? 1.0 : 0.0;
    const std::size_t need = (pos.size() < neg.size() ? neg.size() : pos.size()) - minority.size();
    if (minority.size() <= static_cast<std::size_t>(k))
        throw Error("smote_balance: minority class has " + std::to_string(minority.size()) +
                    " rows, need more than k = " + std::to_string(k));

    // k nearest minority neighbours of each minority row, by squared
    // Euclidean distance on the raw columns; ties break toward the lower
    // row index so the table is deterministic.
    const std::size_t m = minority.size();
    const std::size_t cols = train.n_cols();
    std::vector<std::vector<std::size_t>> neighbours(m);
    std::vector<std::pair<double, std::size_t>> dist;
    for (std::size_t i = 0; i < m; ++i) {
        dist.clear();
        dist.reserve(m - 1);
        const auto xi = train.X.row(minority[i]);
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            const auto xj = train.X.row(minority[j]);
            double d2 = 0.0;
            for (std::size_t c = 0; c < cols; ++c) {
                const double diff = xi[c] - xj[c];
                d2 += diff * diff;
            }
            dist.emplace_back(d2, j);
        }
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
        neighbours[i].reserve(static_cast<std::size_t>(k));
        for (int t = 0; t < k; ++t) neighbours[i].push_back(dist[static_cast<std::size_t>(t)].second);
    }

    Dataset out = train;
    Rng rng(seed);
    std::vector<double> row(cols);
    for (std::size_t s = 0; s < need; ++s) {
        const std::size_t base = s % m;  // round-robin over minority rows
        const std::size_t nn = neighbours[base][rng.below(static_cast<std::size_t>(k))];
        const double u = rng.uniform();
        const auto xi = train.X.row(minority[base]);
        const auto xn = train.X.row(minority[nn]);
        for (std::size_t c = 0; c < cols; ++c) row[c] = xi[c] + u * (xn[c] - xi[c]);
        out.X.push_row(row);
        out.y.push_back(minority_label);
    }
    return out;
}

}  // namespace tandem
