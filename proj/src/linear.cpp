#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include "tandem/error.hpp"
#include "tandem/models.hpp"

namespace tandem {

namespace {

// Cholesky solve of A x = rhs for symmetric positive definite A (dense,
// row-major, d x d). Returns false when A is not positive definite.
bool cholesky_solve(std::vector<double> A, std::vector<double> rhs, std::size_t d,
                    std::vector<double>& out) {
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = A[i * d + j];
            for (std::size_t k = 0; k < j; ++k) sum -= A[i * d + k] * A[j * d + k];
            if (i == j) {
                if (sum <= 0.0) return false;
                A[i * d + i] = std::sqrt(sum);
            } else {
                A[i * d + j] = sum / A[j * d + j];
            }
        }
    }
    // Forward then back substitution, reusing rhs.
    for (std::size_t i = 0; i < d; ++i) {
        double sum = rhs[i];
        for (std::size_t k = 0; k < i; ++k) sum -= A[i * d + k] * rhs[k];
        rhs[i] = sum / A[i * d + i];
    }
    out.assign(d, 0.0);
    for (std::size_t ii = d; ii-- > 0;) {
        double sum = rhs[ii];
        for (std::size_t k = ii + 1; k < d; ++k) sum -= A[k * d + ii] * out[k];
        out[ii] = sum / A[ii * d + ii];
    }
    return true;
}

class LinearModel final : public FittedModel {
public:
    LinearModel(std::vector<double> w, double b, std::size_t width) {
        weights_ = std::move(w);
        bias_ = b;
        input_width_ = width;
        info_.epochs_run = 1;
        info_.final_val_loss = std::numeric_limits<double>::quiet_NaN();
    }

    ModelKind kind() const override { return ModelKind::linear; }

    std::vector<double> predict(const Matrix& X) const override {
        check_width(X);
        std::vector<double> out(X.rows());
        for (std::size_t r = 0; r < X.rows(); ++r) {
            const auto row = X.row(r);
            double z = bias_;
            for (std::size_t c = 0; c < row.size(); ++c) z += weights_[c] * row[c];
            out[r] = z;
        }
        return out;
    }

private:
    std::vector<double> weights_;
    double bias_ = 0.0;
};

}  // namespace

std::unique_ptr<FittedModel> fit_linear(const Matrix& X, const std::vector<double>& y) {
    const std::size_t n = X.rows();
    const std::size_t p = X.cols();
    const std::size_t d = p + 1;  // intercept appended last

    // Gram matrix and right-hand side of the normal equations.
    std::vector<double> G(d * d, 0.0);
    std::vector<double> rhs(d, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        const auto row = X.row(r);
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = i; j < p; ++j) G[i * d + j] += row[i] * row[j];
            G[i * d + p] += row[i];
            rhs[i] += row[i] * y[r];
        }
        rhs[p] += y[r];
    }
    G[p * d + p] = static_cast<double>(n);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < i; ++j) G[i * d + j] = G[j * d + i];

    double diag_scale = 0.0;
    for (std::size_t i = 0; i < d; ++i) diag_scale = std::max(diag_scale, G[i * d + i]);
    if (diag_scale == 0.0) diag_scale = 1.0;

    // Plain solve first; escalate a ridge jitter only if the Gram matrix is
    // singular (or numerically indefinite).
    std::vector<double> beta;
    double jitter = 0.0;
    bool solved = cholesky_solve(G, rhs, d, beta);
    for (int attempt = 0; !solved && attempt < 8; ++attempt) {
        jitter = (jitter == 0.0) ? diag_scale * 1e-12 : jitter * 100.0;
        std::vector<double> Gj = G;
        for (std::size_t i = 0; i < d; ++i) Gj[i * d + i] += jitter;
        solved = cholesky_solve(Gj, rhs, d, beta);
    }
    if (!solved) throw Error("linear: normal equations unsolvable");

    std::vector<double> w(beta.begin(), beta.begin() + static_cast<std::ptrdiff_t>(p));
    return std::make_unique<LinearModel>(std::move(w), beta[p], p);
}

}  // namespace tandem
