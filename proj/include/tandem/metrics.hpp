#pragma once

#include <string>
#include <vector>

#include "tandem/data.hpp"

namespace tandem {

enum class CriterionName { accuracy, precision, recall, f1, mse, rmse, mae };
enum class Direction { maximize, minimize };

/// Evaluation criterion. The direction is derived from the name: error
/// metrics are minimized, everything else maximized.
struct Criterion {
    CriterionName name = CriterionName::f1;

    Direction direction() const;
    bool for_classification() const;
    bool compatible_with(Task t) const;
    std::string str() const;

    /// Accepts exactly the config strings: "accuracy", "precision",
    /// "recall", "f1", "mse", "rmse", "mae". Throws naming the valid
    /// options otherwise.
    static Criterion from_string(const std::string& name);

    bool operator==(const Criterion&) const = default;
};

/// Compute the criterion. Classification criteria require binary vectors.
/// Precision, recall and F1 return 0 when their denominator is 0, so the
/// elimination loop stays total on degenerate predictions.
double score(const Criterion& c, const std::vector<double>& y_true,
             const std::vector<double>& y_pred);

enum class Better { a_better, b_better, tie };

/// Direction-aware comparison of two scores; exact equality is a tie.
Better better(const Criterion& c, double a, double b);

}  // namespace tandem
