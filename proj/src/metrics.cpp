#include "tandem/metrics.hpp"

#include <cmath>

#include "tandem/error.hpp"

namespace tandem {

namespace {

void check_binary(const std::vector<double>& v, const char* which) {
    for (double x : v) {
        if (x != 0.0 && x != 1.0)
            throw Error(std::string("metric: ") + which + " must be binary (0/1)");
    }
}

struct Confusion {
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

Confusion confusion(const std::vector<double>& y_true, const std::vector<double>& y_pred) {
    Confusion m;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const bool t = y_true[i] == 1.0;
        const bool p = y_pred[i] == 1.0;
        if (t && p) ++m.tp;
        else if (!t && p) ++m.fp;
        else if (t && !p) ++m.fn;
        else ++m.tn;
    }
    return m;
}

double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

Direction Criterion::direction() const {
    switch (name) {
        case CriterionName::mse:
        case CriterionName::rmse:
        case CriterionName::mae:
            return Direction::minimize;
        default:
            return Direction::maximize;
    }
}

bool Criterion::for_classification() const {
    switch (name) {
        case CriterionName::accuracy:
        case CriterionName::precision:
        case CriterionName::recall:
        case CriterionName::f1:
            return true;
        default:
            return false;
    }
}

bool Criterion::compatible_with(Task t) const {
    return for_classification() == (t == Task::classification);
}

std::string Criterion::str() const {
    switch (name) {
        case CriterionName::accuracy: return "accuracy";
        case CriterionName::precision: return "precision";
        case CriterionName::recall: return "recall";
        case CriterionName::f1: return "f1";
        case CriterionName::mse: return "mse";
        case CriterionName::rmse: return "rmse";
        case CriterionName::mae: return "mae";
    }
    return "?";
}

Criterion Criterion::from_string(const std::string& name) {
    if (name == "accuracy") return {CriterionName::accuracy};
    if (name == "precision") return {CriterionName::precision};
    if (name == "recall") return {CriterionName::recall};
    if (name == "f1") return {CriterionName::f1};
    if (name == "mse") return {CriterionName::mse};
    if (name == "rmse") return {CriterionName::rmse};
    if (name == "mae") return {CriterionName::mae};
    throw Error("unknown criterion \"" + name +
                "\" (valid options: accuracy, precision, recall, f1, mse, rmse, mae)");
}

double score(const Criterion& c, const std::vector<double>& y_true,
             const std::vector<double>& y_pred) {
    if (y_true.size() != y_pred.size())
        throw Error("score: length mismatch (" + std::to_string(y_true.size()) + " vs " +
                    std::to_string(y_pred.size()) + ")");
    if (y_true.empty()) throw Error("score: empty vectors");

    const double n = static_cast<double>(y_true.size());

    if (c.for_classification()) {
        check_binary(y_true, "y_true");
        check_binary(y_pred, "y_pred");
        const Confusion m = confusion(y_true, y_pred);
        switch (c.name) {
            case CriterionName::accuracy:
                return static_cast<double>(m.tp + m.tn) / n;
            case CriterionName::precision:
                return safe_ratio(static_cast<double>(m.tp), static_cast<double>(m.tp + m.fp));
            case CriterionName::recall:
                return safe_ratio(static_cast<double>(m.tp), static_cast<double>(m.tp + m.fn));
            case CriterionName::f1: {
                // Harmonic mean written on the counts: 2TP / (2TP + FP + FN).
                return safe_ratio(2.0 * static_cast<double>(m.tp),
                                  static_cast<double>(2 * m.tp + m.fp + m.fn));
            }
            default:
                break;
        }
    }

    double sum_sq = 0.0;
    double sum_abs = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        const double r = y_pred[i] - y_true[i];
        sum_sq += r * r;
        sum_abs += std::abs(r);
    }
    switch (c.name) {
        case CriterionName::mse: return sum_sq / n;
        case CriterionName::rmse: return std::sqrt(sum_sq / n);
        case CriterionName::mae: return sum_abs / n;
        default:
            throw Error("score: unreachable criterion");
    }
}

Better better(const Criterion& c, double a, double b) {
    if (std::isnan(a) || std::isnan(b)) throw Error("better: NaN score");
    if (a == b) return Better::tie;
    const bool a_wins = c.direction() == Direction::maximize ? a > b : a < b;
    return a_wins ? Better::a_better : Better::b_better;
}

}  // namespace tandem
