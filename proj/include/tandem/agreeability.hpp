#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tandem {

/// 2x2 agreement counts between two binary raters over the same items:
/// a = both rate 1, b = first only, c = second only, d = both rate 0.
struct AgreementTable {
    std::int64_t a = 0;
    std::int64_t b = 0;
    std::int64_t c = 0;
    std::int64_t d = 0;

    std::int64_t n() const { return a + b + c + d; }

    bool operator==(const AgreementTable&) const = default;
};

struct KappaResult {
    double p_o = 0.0;   // observed agreement proportion
    double p_e = 0.0;   // chance agreement proportion
    double kappa = 0.0; // (p_o - p_e) / (1 - p_e)
};

/// Count the 2x2 table from two equal-length binary vectors.
AgreementTable agreement_table(const std::vector<double>& pred_a,
                               const std::vector<double>& pred_b);

/// Cohen's kappa with p_o = (a+d)/n and
/// p_e = ((a+c)(a+b) + (b+d)(c+d)) / n^2. When p_e = 1 (both raters
/// constant and identical) kappa is defined as 1: full agreement.
KappaResult cohen_kappa(const AgreementTable& t);

/// Sample Pearson correlation. Requires length >= 2 and non-constant
/// inputs; a constant vector is an error, never NaN.
double pearson_rho(const std::vector<double>& x, const std::vector<double>& y);

enum class KappaBand { none, slight, fair, moderate, substantial, almost_perfect };

std::string to_string(KappaBand band);

/// Map a kappa value onto the conventional interpretation bands. The input
/// is rounded to two decimals first so the published cut points (0.20 vs
/// 0.21 and so on) are well-defined for values like 0.205.
KappaBand interpret_kappa(double k);

enum class AgreeMetric { cohen_kappa, pearson };

std::string to_string(AgreeMetric m);
/// Accepts the config strings "cohen_kappa" and "pearson".
AgreeMetric agree_metric_from_string(const std::string& name);

/// Dispatch: kappa on binary ratings, Pearson's rho on real-valued ones.
double agreement_value(AgreeMetric metric, const std::vector<double>& pred_a,
                       const std::vector<double>& pred_b);

}  // namespace tandem
