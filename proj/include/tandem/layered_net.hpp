#pragma once

#include <cstdint>
#include <vector>

#include "tandem/matrix.hpp"
#include "tandem/models.hpp"

namespace tandem {

/// The network behind the layered_net model kind, exposed so tests can
/// drive it directly (parameter access for finite-difference checks).
///
/// Layer forward pass: z = W x + b, optionally batch-normalized, then the
/// activation. Batch norm uses per-batch statistics in training mode and
/// exponential running averages (momentum 0.9) at inference.
class LayeredNet {
public:
    LayeredNet(std::size_t input_width, const LayeredNetConfig& cfg, std::uint64_t seed);

    std::size_t parameter_count() const;
    std::vector<double> parameters() const;
    void set_parameters(const std::vector<double>& theta);

    /// Loss on a batch in training mode (batch statistics, running averages
    /// untouched). Binary cross-entropy for a sigmoid head, MSE otherwise.
    double loss(const Matrix& X, const std::vector<double>& y) const;

    /// Loss and the gradient with respect to every parameter, training
    /// mode. Gradients flow through the batch-norm statistics.
    std::pair<double, std::vector<double>> loss_and_gradient(
        const Matrix& X, const std::vector<double>& y) const;

    /// Mini-batch Adam (beta1 0.9, beta2 0.999, eps 1e-8) with the internal
    /// validation split, early stopping and optional best-weight restore
    /// described by TrainParams. Throws on a non-finite loss, naming the
    /// offending epoch.
    void train(const Matrix& X, const std::vector<double>& y, const TrainParams& params);

    /// Inference-mode outputs (running batch-norm statistics).
    std::vector<double> predict(const Matrix& X) const;

    std::size_t input_width() const { return input_width_; }
    const TrainingInfo& info() const { return info_; }

private:
    struct Layer {
        std::size_t in = 0;
        std::size_t out = 0;
        Activation activation = Activation::linear;
        bool batch_norm = false;
        std::vector<double> W;  // out x in, row-major
        std::vector<double> b;
        std::vector<double> gamma;
        std::vector<double> beta;
        std::vector<double> running_mean;
        std::vector<double> running_var;
    };

    struct LayerCache;  // per-layer intermediates for backprop

    void forward(const Matrix& X, bool training, std::vector<LayerCache>& caches,
                 std::vector<double>& out) const;
    double output_loss(const std::vector<double>& out, const std::vector<double>& y) const;
    std::vector<double> backward(const std::vector<LayerCache>& caches,
                                 const std::vector<double>& out,
                                 const std::vector<double>& y) const;
    void update_running_stats(const std::vector<LayerCache>& caches);

    std::vector<Layer> layers_;
    OutputKind output_ = OutputKind::sigmoid;
    double learning_rate_ = 0.001;
    std::size_t input_width_ = 0;
    std::uint64_t seed_ = 0;
    TrainingInfo info_;
};

}  // namespace tandem
