#include "tandem/agreeability.hpp"

#include <cmath>

#include "tandem/error.hpp"

namespace tandem {

AgreementTable agreement_table(const std::vector<double>& pred_a,
                               const std::vector<double>& pred_b) {
    if (pred_a.size() != pred_b.size())
        throw Error("agreement_table: length mismatch (" + std::to_string(pred_a.size()) +
                    " vs " + std::to_string(pred_b.size()) + ")");
    if (pred_a.empty()) throw Error("agreement_table: empty vectors");

    AgreementTable t;
    for (std::size_t i = 0; i < pred_a.size(); ++i) {
        const double x = pred_a[i];
        const double y = pred_b[i];
        if ((x != 0.0 && x != 1.0) || (y != 0.0 && y != 1.0))
            throw Error("agreement_table: non-binary value at row " + std::to_string(i));
        if (x == 1.0 && y == 1.0) ++t.a;
        else if (x == 1.0) ++t.b;
        else if (y == 1.0) ++t.c;
        else ++t.d;
    }
    return t;
}

KappaResult cohen_kappa(const AgreementTable& t) {
    const double n = static_cast<double>(t.n());
    if (t.n() < 1) throw Error("cohen_kappa: empty table");
    if (t.a < 0 || t.b < 0 || t.c < 0 || t.d < 0)
        throw Error("cohen_kappa: negative count");

    KappaResult r;
    r.p_o = static_cast<double>(t.a + t.d) / n;
    r.p_e = (static_cast<double>(t.a + t.c) * static_cast<double>(t.a + t.b) +
             static_cast<double>(t.b + t.d) * static_cast<double>(t.c + t.d)) /
            (n * n);
    if (r.p_e >= 1.0) {
        // Only reachable when both raters are constant and identical:
        // complete agreement.
        r.p_e = 1.0;
        r.kappa = 1.0;
        return r;
    }
    r.kappa = (r.p_o - r.p_e) / (1.0 - r.p_e);
    if (r.kappa > 1.0) r.kappa = 1.0;  // guard float excess; kappa <= 1 always
    return r;
}

double pearson_rho(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size())
        throw Error("pearson_rho: length mismatch");
    if (x.size() < 2) throw Error("pearson_rho: need at least 2 observations");

    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;

    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw Error("pearson_rho: correlation undefined for a constant vector");

    double rho = sxy / std::sqrt(sxx * syy);
    if (rho > 1.0) rho = 1.0;
    if (rho < -1.0) rho = -1.0;
    return rho;
}

std::string to_string(KappaBand band) {
    switch (band) {
        case KappaBand::none: return "none";
        case KappaBand::slight: return "slight";
        case KappaBand::fair: return "fair";
        case KappaBand::moderate: return "moderate";
        case KappaBand::substantial: return "substantial";
        case KappaBand::almost_perfect: return "almost perfect";
    }
    return "?";
}

KappaBand interpret_kappa(double k) {
    if (!std::isfinite(k)) throw Error("interpret_kappa: non-finite input");
    if (k > 1.0) throw Error("interpret_kappa: kappa cannot exceed 1");
    // Work in rounded hundredths so the band cut points are exact.
    const long long h = std::llround(k * 100.0);
    if (h < 0) return KappaBand::none;
    if (h <= 20) return KappaBand::slight;
    if (h <= 40) return KappaBand::fair;
    if (h <= 60) return KappaBand::moderate;
    if (h <= 80) return KappaBand::substantial;
    return KappaBand::almost_perfect;
}

std::string to_string(AgreeMetric m) {
    return m == AgreeMetric::cohen_kappa ? "cohen_kappa" : "pearson";
}

AgreeMetric agree_metric_from_string(const std::string& name) {
    if (name == "cohen_kappa") return AgreeMetric::cohen_kappa;
    if (name == "pearson") return AgreeMetric::pearson;
    throw Error("unknown agreeability metric \"" + name +
                "\" (valid options: cohen_kappa, pearson)");
}

double agreement_value(AgreeMetric metric, const std::vector<double>& pred_a,
                       const std::vector<double>& pred_b) {
    if (metric == AgreeMetric::cohen_kappa)
        return cohen_kappa(agreement_table(pred_a, pred_b)).kappa;
    return pearson_rho(pred_a, pred_b);
}

}  // namespace tandem
