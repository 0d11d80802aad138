#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <vector>

#include "tandem/error.hpp"
#include "tandem/models.hpp"
#include "tandem/rng.hpp"

namespace tandem {

namespace {

struct Node {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double leaf_value = 0.0;  // majority class, ties toward 0
};

struct SplitChoice {
    bool found = false;
    std::size_t feature = 0;
    double threshold = 0.0;
    double child_impurity = 0.0;  // n_l * gini_l + n_r * gini_r
};

// n * gini for a binary node with `pos` positives out of `n` samples.
double scaled_gini(double pos, double n) {
    if (n == 0.0) return 0.0;
    const double neg = n - pos;
    return n - (pos * pos + neg * neg) / n;
}

class TreeBuilder {
public:
    TreeBuilder(const Matrix& X, const std::vector<double>& y, int min_samples_split,
                std::size_t mtry, Rng& rng)
        : X_(X), y_(y), min_split_(min_samples_split), mtry_(mtry), rng_(rng) {
        feature_order_.resize(X.cols());
    }

    std::vector<Node> build(std::vector<std::size_t> sample) {
        nodes_.clear();
        grow(std::move(sample));
        return std::move(nodes_);
    }

private:
    std::int32_t grow(std::vector<std::size_t> idx) {
        const std::int32_t self = static_cast<std::int32_t>(nodes_.size());
        nodes_.emplace_back();

        double pos = 0.0;
        for (std::size_t i : idx) pos += y_[i];
        const double n = static_cast<double>(idx.size());
        nodes_[self].leaf_value = (2.0 * pos > n) ? 1.0 : 0.0;

        const bool pure = pos == 0.0 || pos == n;
        if (pure || idx.size() < static_cast<std::size_t>(min_split_)) return self;

        const SplitChoice split = best_split(idx);
        if (!split.found) return self;

        std::vector<std::size_t> left_idx, right_idx;
        left_idx.reserve(idx.size());
        right_idx.reserve(idx.size());
        for (std::size_t i : idx)
            (X_(i, split.feature) <= split.threshold ? left_idx : right_idx).push_back(i);
        idx.clear();
        idx.shrink_to_fit();

        nodes_[self].feature = static_cast<std::int32_t>(split.feature);
        nodes_[self].threshold = split.threshold;
        const std::int32_t l = grow(std::move(left_idx));
        nodes_[self].left = l;
        const std::int32_t r = grow(std::move(right_idx));
        nodes_[self].right = r;
        return self;
    }

    // Try mtry randomly drawn features; if none of them admits a split
    // (all constant within the node), keep scanning the rest of the drawn
    // order so a splittable node is never abandoned early. A best split may
    // have zero impurity gain: children still shrink strictly, so growth
    // terminates at purity or constant rows.
    SplitChoice best_split(const std::vector<std::size_t>& idx) {
        std::iota(feature_order_.begin(), feature_order_.end(), 0);
        for (std::size_t i = 0; i < mtry_ && i + 1 < feature_order_.size(); ++i) {
            const std::size_t j = i + rng_.below(feature_order_.size() - i);
            std::swap(feature_order_[i], feature_order_[j]);
        }

        SplitChoice best;
        std::size_t tried = 0;
        for (std::size_t f : feature_order_) {
            ++tried;
            scan_feature(idx, f, best);
            if (tried >= mtry_ && best.found) break;
        }
        return best;
    }

    void scan_feature(const std::vector<std::size_t>& idx, std::size_t f, SplitChoice& best) {
        sorted_.clear();
        sorted_.reserve(idx.size());
        for (std::size_t i : idx) sorted_.emplace_back(X_(i, f), y_[i]);
        std::sort(sorted_.begin(), sorted_.end());

        const double n = static_cast<double>(sorted_.size());
        double total_pos = 0.0;
        for (const auto& [v, t] : sorted_) total_pos += t;

        double left_n = 0.0, left_pos = 0.0;
        for (std::size_t i = 0; i + 1 < sorted_.size(); ++i) {
            left_n += 1.0;
            left_pos += sorted_[i].second;
            if (sorted_[i].first == sorted_[i + 1].first) continue;
            const double impurity = scaled_gini(left_pos, left_n) +
                                    scaled_gini(total_pos - left_pos, n - left_n);
            if (!best.found || impurity < best.child_impurity) {
                best.found = true;
                best.feature = f;
                best.threshold = 0.5 * (sorted_[i].first + sorted_[i + 1].first);
                best.child_impurity = impurity;
            }
        }
    }

    const Matrix& X_;
    const std::vector<double>& y_;
    const int min_split_;
    const std::size_t mtry_;
    Rng& rng_;
    std::vector<Node> nodes_;
    std::vector<std::size_t> feature_order_;
    std::vector<std::pair<double, double>> sorted_;
};

double predict_tree(const std::vector<Node>& nodes, std::span<const double> row) {
    std::int32_t at = 0;
    while (nodes[at].feature >= 0)
        at = row[static_cast<std::size_t>(nodes[at].feature)] <= nodes[at].threshold
                 ? nodes[at].left
                 : nodes[at].right;
    return nodes[at].leaf_value;
}

class ForestModel final : public FittedModel {
public:
    ForestModel(std::vector<std::vector<Node>> trees, std::size_t width) : trees_(std::move(trees)) {
        input_width_ = width;
        info_.epochs_run = 1;
        info_.final_val_loss = std::numeric_limits<double>::quiet_NaN();
    }

    ModelKind kind() const override { return ModelKind::forest; }

    std::vector<double> predict(const Matrix& X) const override {
        check_width(X);
        std::vector<double> out(X.rows(), 0.0);
        const double inv = 1.0 / static_cast<double>(trees_.size());
        for (std::size_t r = 0; r < X.rows(); ++r) {
            const auto row = X.row(r);
            double votes = 0.0;
            for (const auto& tree : trees_) votes += predict_tree(tree, row);
            out[r] = votes * inv;  // fraction of trees voting 1
        }
        return out;
    }

private:
    std::vector<std::vector<Node>> trees_;
};

}  // namespace

std::unique_ptr<FittedModel> fit_forest(const ForestConfig& cfg, std::uint64_t seed,
                                        const Matrix& X, const std::vector<double>& y) {
    for (double t : y)
        if (t != 0.0 && t != 1.0) throw Error("forest: targets must be 0/1");

    const std::size_t n = X.rows();
    const std::size_t p = X.cols();
    const auto mtry = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::sqrt(static_cast<double>(p))));

    Rng rng(mix64(seed));
    std::vector<std::vector<Node>> trees;
    trees.reserve(static_cast<std::size_t>(cfg.n_trees));
    TreeBuilder builder(X, y, cfg.min_samples_split, mtry, rng);
    std::vector<std::size_t> sample(n);
    for (int t = 0; t < cfg.n_trees; ++t) {
        for (std::size_t i = 0; i < n; ++i) sample[i] = rng.below(n);
        trees.push_back(builder.build(sample));
    }
    return std::make_unique<ForestModel>(std::move(trees), p);
}

}  // namespace tandem
