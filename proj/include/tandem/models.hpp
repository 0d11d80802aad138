#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tandem/matrix.hpp"

namespace tandem {

enum class ModelKind { logistic, forest, layered_net, linear };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

/// L2-regularized logistic regression trained by full-batch gradient
/// descent from a zero initialization: minimizes mean binary cross-entropy
/// plus (lambda/2)*||w||^2 (bias unpenalized). Stops at max_iter or when
/// the sup-norm of the parameter update falls below tol. Fully
/// deterministic; the ModelSpec seed is ignored.
struct LogisticConfig {
    double learning_rate = 0.1;
    int max_iter = 5000;
    double tol = 1e-6;
    double lambda = 1.0;

    bool operator==(const LogisticConfig&) const = default;
};

/// Random forest classifier: bootstrapped CART trees split on Gini
/// impurity, sqrt(p) features tried per split, grown to purity (no depth
/// cap), majority vote across trees. All randomness comes from the seed.
struct ForestConfig {
    int n_trees = 100;
    int min_samples_split = 2;

    bool operator==(const ForestConfig&) const = default;
};

/// Ordinary least squares via the normal equations; a tiny ridge jitter is
/// added only if the Gram matrix is singular.
struct LinearConfig {
    bool operator==(const LinearConfig&) const = default;
};

enum class Activation { linear, relu, sigmoid };
enum class OutputKind { sigmoid, linear };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct LayerSpec {
    int units = 0;
    Activation activation = Activation::linear;
    bool batch_norm = false;

    bool operator==(const LayerSpec&) const = default;
};

/// Feed-forward network: the listed hidden layers followed by a single
/// output unit (sigmoid head for classification, linear for regression).
/// The input width is deliberately absent: it is inferred from the data
/// at fit time, so the same spec can be refit as feature sets shrink.
struct LayeredNetConfig {
    std::vector<LayerSpec> layers;
    OutputKind output = OutputKind::sigmoid;
    double learning_rate = 0.001;  // Adam step size

    bool operator==(const LayeredNetConfig&) const = default;
};

/// Model family + hyperparameters + seed. The kind is carried by the
/// config variant.
struct ModelSpec {
    std::variant<LogisticConfig, ForestConfig, LayeredNetConfig, LinearConfig> config;
    std::uint64_t seed = 0;

    ModelKind kind() const { return static_cast<ModelKind>(config.index()); }

    static ModelSpec logistic(LogisticConfig c = {}, std::uint64_t seed = 0);
    static ModelSpec forest(ForestConfig c = {}, std::uint64_t seed = 0);
    static ModelSpec layered_net(LayeredNetConfig c, std::uint64_t seed = 0);
    static ModelSpec linear(std::uint64_t seed = 0);

    /// Hyperparameter sanity: positive counts, positive rates, at least one
    /// net layer with positive units. Throws on violation.
    void validate() const;

    bool operator==(const ModelSpec&) const = default;
};

/// Mini-batch training controls for the layered net.
struct TrainParams {
    int batch_size = 32;
    int epochs = 100;
    double validation_split = 0.2;  // in [0, 1); last fraction of the rows
    int patience = 3;               // 0 disables early stopping
    bool restore_best = true;
    bool verbose = false;

    bool operator==(const TrainParams&) const = default;
};

struct TrainingInfo {
    int epochs_run = 0;
    int best_epoch = 0;  // 1-based; 0 when not tracked
    double final_train_loss = 0.0;
    double final_val_loss = 0.0;  // NaN when no internal validation split
};

/// An immutable fitted model. predict is deterministic given the learned
/// parameters and safe to call concurrently from several threads.
class FittedModel {
public:
    virtual ~FittedModel() = default;

    virtual ModelKind kind() const = 0;

    /// Raw outputs: probabilities in [0,1] for classification kinds, reals
    /// for regression kinds. X must have the fit-time column count.
    virtual std::vector<double> predict(const Matrix& X) const = 0;

    std::size_t input_width() const { return input_width_; }
    const TrainingInfo& info() const { return info_; }

protected:
    void check_width(const Matrix& X) const;

    std::size_t input_width_ = 0;
    TrainingInfo info_;
};

/// Fit a model. TrainParams are required for (and only consumed by) the
/// layered net. Every kind is bitwise-reproducible given (spec, data,
/// params).
std::unique_ptr<FittedModel> fit(const ModelSpec& spec, const Matrix& X,
                                 const std::vector<double>& y,
                                 const std::optional<TrainParams>& params = std::nullopt);

/// Binarize probabilities: output 1 iff p >= tau. Inputs must lie in [0,1].
std::vector<double> apply_threshold(const std::vector<double>& probs, double tau);

}  // namespace tandem
