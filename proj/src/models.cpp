#include "tandem/models.hpp"

#include <cmath>

#include "tandem/error.hpp"

namespace tandem {

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::logistic: return "logistic";
        case ModelKind::forest: return "forest";
        case ModelKind::layered_net: return "layered_net";
        case ModelKind::linear: return "linear";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "logistic") return ModelKind::logistic;
    if (s == "forest") return ModelKind::forest;
    if (s == "layered_net") return ModelKind::layered_net;
    if (s == "linear") return ModelKind::linear;
    throw Error("unknown model kind \"" + s +
                "\" (valid options: logistic, forest, layered_net, linear)");
}

std::string to_string(Activation a) {
    switch (a) {
        case Activation::linear: return "linear";
        case Activation::relu: return "relu";
        case Activation::sigmoid: return "sigmoid";
    }
    return "?";
}

Activation activation_from_string(const std::string& s) {
    if (s == "linear") return Activation::linear;
    if (s == "relu") return Activation::relu;
    if (s == "sigmoid") return Activation::sigmoid;
    throw Error("unknown activation \"" + s + "\" (valid options: linear, relu, sigmoid)");
}

ModelSpec ModelSpec::logistic(LogisticConfig c, std::uint64_t seed) {
    return ModelSpec{c, seed};
}
ModelSpec ModelSpec::forest(ForestConfig c, std::uint64_t seed) {
    return ModelSpec{c, seed};
}
ModelSpec ModelSpec::layered_net(LayeredNetConfig c, std::uint64_t seed) {
    return ModelSpec{std::move(c), seed};
}
ModelSpec ModelSpec::linear(std::uint64_t seed) {
    return ModelSpec{LinearConfig{}, seed};
}

void ModelSpec::validate() const {
    switch (kind()) {
        case ModelKind::logistic: {
            const auto& c = std::get<LogisticConfig>(config);
            if (c.learning_rate <= 0.0) throw Error("logistic: learning_rate must be > 0");
            if (c.max_iter < 1) throw Error("logistic: max_iter must be >= 1");
            if (c.tol < 0.0) throw Error("logistic: tol must be >= 0");
            if (c.lambda < 0.0) throw Error("logistic: lambda must be >= 0");
            break;
        }
        case ModelKind::forest: {
            const auto& c = std::get<ForestConfig>(config);
            if (c.n_trees < 1) throw Error("forest: n_trees must be >= 1");
            if (c.min_samples_split < 2) throw Error("forest: min_samples_split must be >= 2");
            break;
        }
        case ModelKind::layered_net: {
            const auto& c = std::get<LayeredNetConfig>(config);
            if (c.layers.empty()) throw Error("layered_net: at least one layer required");
            for (const auto& l : c.layers)
                if (l.units < 1) throw Error("layered_net: layer units must be >= 1");
            if (c.learning_rate <= 0.0) throw Error("layered_net: learning_rate must be > 0");
            break;
        }
        case ModelKind::linear:
            break;
    }
}

void FittedModel::check_width(const Matrix& X) const {
    if (X.cols() != input_width_)
        throw Error("predict: input has " + std::to_string(X.cols()) +
                    " columns, model was fit on " + std::to_string(input_width_));
}

std::vector<double> apply_threshold(const std::vector<double>& probs, double tau) {
    std::vector<double> out(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double p = probs[i];
        if (!(p >= 0.0 && p <= 1.0))
            throw Error("apply_threshold: probability out of [0, 1] at index " +
                        std::to_string(i));
        out[i] = p >= tau ? 1.0 : 0.0;
    }
    return out;
}

// Per-kind fit implementations live in their own translation units.
std::unique_ptr<FittedModel> fit_logistic(const LogisticConfig& cfg, const Matrix& X,
                                          const std::vector<double>& y);
std::unique_ptr<FittedModel> fit_linear(const Matrix& X, const std::vector<double>& y);
std::unique_ptr<FittedModel> fit_forest(const ForestConfig& cfg, std::uint64_t seed,
                                        const Matrix& X, const std::vector<double>& y);
std::unique_ptr<FittedModel> fit_layered_net(const LayeredNetConfig& cfg, std::uint64_t seed,
                                             const Matrix& X, const std::vector<double>& y,
                                             const TrainParams& params);

std::unique_ptr<FittedModel> fit(const ModelSpec& spec, const Matrix& X,
                                 const std::vector<double>& y,
                                 const std::optional<TrainParams>& params) {
    spec.validate();
    if (X.rows() == 0 || X.cols() == 0) throw Error("fit: empty data");
    if (X.rows() != y.size())
        throw Error("fit: X has " + std::to_string(X.rows()) + " rows but y has " +
                    std::to_string(y.size()));

    switch (spec.kind()) {
        case ModelKind::logistic:
            return fit_logistic(std::get<LogisticConfig>(spec.config), X, y);
        case ModelKind::linear:
            return fit_linear(X, y);
        case ModelKind::forest:
            return fit_forest(std::get<ForestConfig>(spec.config), spec.seed, X, y);
        case ModelKind::layered_net: {
            if (!params)
                throw Error("fit: layered_net requires TrainParams");
            return fit_layered_net(std::get<LayeredNetConfig>(spec.config), spec.seed, X, y,
                                   *params);
        }
    }
    throw Error("fit: unreachable model kind");
}

}  // namespace tandem
