#include <cmath>
#include <memory>
#include <vector>

#include "tandem/error.hpp"
#include "tandem/models.hpp"

namespace tandem {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

class LogisticModel final : public FittedModel {
public:
    LogisticModel(std::vector<double> w, double b, std::size_t width, TrainingInfo info) {
        weights_ = std::move(w);
        bias_ = b;
        input_width_ = width;
        info_ = info;
    }

    ModelKind kind() const override { return ModelKind::logistic; }

    std::vector<double> predict(const Matrix& X) const override {
        check_width(X);
        std::vector<double> out(X.rows());
        for (std::size_t r = 0; r < X.rows(); ++r) {
            const auto row = X.row(r);
            double z = bias_;
            for (std::size_t c = 0; c < row.size(); ++c) z += weights_[c] * row[c];
            out[r] = sigmoid(z);
        }
        return out;
    }

    const std::vector<double>& weights() const { return weights_; }
    double bias() const { return bias_; }

private:
    std::vector<double> weights_;
    double bias_ = 0.0;
};

double bce_plus_ridge(const std::vector<double>& p, const std::vector<double>& y,
                      const std::vector<double>& w, double lambda) {
    // Clamped log so a saturated sigmoid cannot produce -inf.
    constexpr double kFloor = 1e-12;
    double loss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double pi = std::min(1.0 - kFloor, std::max(kFloor, p[i]));
        loss += y[i] == 1.0 ? -std::log(pi) : -std::log(1.0 - pi);
    }
    loss /= static_cast<double>(y.size());
    double ridge = 0.0;
    for (double wi : w) ridge += wi * wi;
    return loss + 0.5 * lambda * ridge;
}

}  // namespace

std::unique_ptr<FittedModel> fit_logistic(const LogisticConfig& cfg, const Matrix& X,
                                          const std::vector<double>& y) {
    for (double t : y)
        if (t != 0.0 && t != 1.0) throw Error("logistic: targets must be 0/1");

    const std::size_t n = X.rows();
    const std::size_t p = X.cols();
    const double inv_n = 1.0 / static_cast<double>(n);

    std::vector<double> w(p, 0.0);
    double b = 0.0;
    std::vector<double> probs(n);
    std::vector<double> grad(p);

    int iters = 0;
    for (int it = 0; it < cfg.max_iter; ++it) {
        for (std::size_t r = 0; r < n; ++r) {
            const auto row = X.row(r);
            double z = b;
            for (std::size_t c = 0; c < p; ++c) z += w[c] * row[c];
            probs[r] = sigmoid(z);
        }

        std::fill(grad.begin(), grad.end(), 0.0);
        double grad_b = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            const double err = probs[r] - y[r];
            const auto row = X.row(r);
            for (std::size_t c = 0; c < p; ++c) grad[c] += err * row[c];
            grad_b += err;
        }
        double max_step = 0.0;
        for (std::size_t c = 0; c < p; ++c) {
            const double g = grad[c] * inv_n + cfg.lambda * w[c];
            const double step = cfg.learning_rate * g;
            w[c] -= step;
            max_step = std::max(max_step, std::abs(step));
            if (!std::isfinite(w[c]))
                throw Error("logistic: divergence at iteration " + std::to_string(it + 1));
        }
        const double step_b = cfg.learning_rate * grad_b * inv_n;
        b -= step_b;
        max_step = std::max(max_step, std::abs(step_b));
        iters = it + 1;
        if (max_step < cfg.tol) break;
    }

    for (std::size_t r = 0; r < n; ++r) {
        const auto row = X.row(r);
        double z = b;
        for (std::size_t c = 0; c < p; ++c) z += w[c] * row[c];
        probs[r] = sigmoid(z);
    }
    const double final_loss = bce_plus_ridge(probs, y, w, cfg.lambda);
    if (!std::isfinite(final_loss))
        throw Error("logistic: non-finite loss after " + std::to_string(iters) + " iterations");

    TrainingInfo info;
    info.epochs_run = iters;
    info.final_train_loss = final_loss;
    info.final_val_loss = std::numeric_limits<double>::quiet_NaN();
    return std::make_unique<LogisticModel>(std::move(w), b, p, info);
}

}  // namespace tandem
