#include "tandem/layered_net.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

#include "tandem/error.hpp"
#include "tandem/rng.hpp"

namespace tandem {

namespace {

constexpr double kBnEps = 1e-5;
constexpr double kBnMomentum = 0.9;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double activate(Activation a, double h) {
    switch (a) {
        case Activation::linear: return h;
        case Activation::relu: return h > 0.0 ? h : 0.0;
        case Activation::sigmoid: return sigmoid(h);
    }
    return h;
}

double activate_grad(Activation a, double h, double out) {
    switch (a) {
        case Activation::linear: return 1.0;
        case Activation::relu: return h > 0.0 ? 1.0 : 0.0;
        case Activation::sigmoid: return out * (1.0 - out);
    }
    return 1.0;
}

}  // namespace

// Batch intermediates needed by backprop; all row-major m x out.
struct LayeredNet::LayerCache {
    std::size_t m = 0;
    std::vector<double> input;  // m x in
    std::vector<double> z;      // pre-normalization affine output
    std::vector<double> z_hat;  // normalized (batch-norm layers only)
    std::vector<double> h;      // post-norm, pre-activation
    std::vector<double> out;    // activation output
    std::vector<double> mean;   // batch statistics (batch-norm layers only)
    std::vector<double> var;
};

LayeredNet::LayeredNet(std::size_t input_width, const LayeredNetConfig& cfg, std::uint64_t seed)
    : output_(cfg.output), learning_rate_(cfg.learning_rate), input_width_(input_width),
      seed_(seed) {
    if (input_width == 0) throw Error("layered_net: zero input width");
    if (cfg.layers.empty()) throw Error("layered_net: at least one layer required");

    Rng rng(mix64(seed));
    std::size_t in = input_width;
    auto add_layer = [&](std::size_t out, Activation act, bool bn) {
        Layer l;
        l.in = in;
        l.out = out;
        l.activation = act;
        l.batch_norm = bn;
        l.W.resize(out * in);
        const double limit = std::sqrt(6.0 / static_cast<double>(in + out));  // Glorot
        for (auto& w : l.W) w = (2.0 * rng.uniform() - 1.0) * limit;
        l.b.assign(out, 0.0);
        if (bn) {
            l.gamma.assign(out, 1.0);
            l.beta.assign(out, 0.0);
            l.running_mean.assign(out, 0.0);
            l.running_var.assign(out, 1.0);
        }
        layers_.push_back(std::move(l));
        in = out;
    };
    for (const auto& spec : cfg.layers) {
        if (spec.units < 1) throw Error("layered_net: layer units must be >= 1");
        add_layer(static_cast<std::size_t>(spec.units), spec.activation, spec.batch_norm);
    }
    // Output head: one unit, no batch norm.
    add_layer(1, output_ == OutputKind::sigmoid ? Activation::sigmoid : Activation::linear,
              false);
}

std::size_t LayeredNet::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers_) {
        n += l.W.size() + l.b.size();
        if (l.batch_norm) n += l.gamma.size() + l.beta.size();
    }
    return n;
}

std::vector<double> LayeredNet::parameters() const {
    std::vector<double> theta;
    theta.reserve(parameter_count());
    for (const auto& l : layers_) {
        theta.insert(theta.end(), l.W.begin(), l.W.end());
        theta.insert(theta.end(), l.b.begin(), l.b.end());
        if (l.batch_norm) {
            theta.insert(theta.end(), l.gamma.begin(), l.gamma.end());
            theta.insert(theta.end(), l.beta.begin(), l.beta.end());
        }
    }
    return theta;
}

void LayeredNet::set_parameters(const std::vector<double>& theta) {
    if (theta.size() != parameter_count())
        throw Error("layered_net: parameter vector size mismatch");
    std::size_t at = 0;
    auto take = [&](std::vector<double>& dst) {
        std::copy(theta.begin() + static_cast<std::ptrdiff_t>(at),
                  theta.begin() + static_cast<std::ptrdiff_t>(at + dst.size()), dst.begin());
        at += dst.size();
    };
    for (auto& l : layers_) {
        take(l.W);
        take(l.b);
        if (l.batch_norm) {
            take(l.gamma);
            take(l.beta);
        }
    }
}

void LayeredNet::forward(const Matrix& X, bool training, std::vector<LayerCache>& caches,
                         std::vector<double>& out) const {
    if (X.cols() != input_width_)
        throw Error("layered_net: input has " + std::to_string(X.cols()) +
                    " columns, network was built for " + std::to_string(input_width_));
    const std::size_t m = X.rows();
    caches.assign(layers_.size(), LayerCache{});

    std::vector<double> current(m * input_width_);
    for (std::size_t r = 0; r < m; ++r) {
        const auto row = X.row(r);
        std::copy(row.begin(), row.end(), current.begin() + static_cast<std::ptrdiff_t>(r * input_width_));
    }

    for (std::size_t li = 0; li < layers_.size(); ++li) {
        const Layer& l = layers_[li];
        LayerCache& c = caches[li];
        c.m = m;
        c.input = std::move(current);
        c.z.assign(m * l.out, 0.0);
        for (std::size_t r = 0; r < m; ++r) {
            const double* in_row = c.input.data() + r * l.in;
            double* z_row = c.z.data() + r * l.out;
            for (std::size_t j = 0; j < l.out; ++j) {
                const double* w = l.W.data() + j * l.in;
                double s = l.b[j];
                for (std::size_t k = 0; k < l.in; ++k) s += w[k] * in_row[k];
                z_row[j] = s;
            }
        }

        const std::vector<double>* pre_act = &c.z;
        if (l.batch_norm) {
            c.mean.assign(l.out, 0.0);
            c.var.assign(l.out, 0.0);
            if (training) {
                const double inv_m = 1.0 / static_cast<double>(m);
                for (std::size_t r = 0; r < m; ++r)
                    for (std::size_t j = 0; j < l.out; ++j) c.mean[j] += c.z[r * l.out + j];
                for (std::size_t j = 0; j < l.out; ++j) c.mean[j] *= inv_m;
                for (std::size_t r = 0; r < m; ++r)
                    for (std::size_t j = 0; j < l.out; ++j) {
                        const double d = c.z[r * l.out + j] - c.mean[j];
                        c.var[j] += d * d;
                    }
                for (std::size_t j = 0; j < l.out; ++j) c.var[j] *= inv_m;
            } else {
                c.mean = l.running_mean;
                c.var = l.running_var;
            }
            c.z_hat.assign(m * l.out, 0.0);
            c.h.assign(m * l.out, 0.0);
            for (std::size_t j = 0; j < l.out; ++j) {
                const double inv_std = 1.0 / std::sqrt(c.var[j] + kBnEps);
                for (std::size_t r = 0; r < m; ++r) {
                    const double zh = (c.z[r * l.out + j] - c.mean[j]) * inv_std;
                    c.z_hat[r * l.out + j] = zh;
                    c.h[r * l.out + j] = l.gamma[j] * zh + l.beta[j];
                }
            }
            pre_act = &c.h;
        }

        c.out.assign(m * l.out, 0.0);
        for (std::size_t i = 0; i < m * l.out; ++i)
            c.out[i] = activate(l.activation, (*pre_act)[i]);
        current = c.out;
    }
    out = std::move(current);  // m x 1
}

double LayeredNet::output_loss(const std::vector<double>& out,
                               const std::vector<double>& y) const {
    const double m = static_cast<double>(y.size());
    double loss = 0.0;
    if (output_ == OutputKind::sigmoid) {
        constexpr double kFloor = 1e-12;
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double p = std::min(1.0 - kFloor, std::max(kFloor, out[i]));
            loss += y[i] == 1.0 ? -std::log(p) : -std::log(1.0 - p);
        }
    } else {
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double d = out[i] - y[i];
            loss += d * d;
        }
    }
    return loss / m;
}

double LayeredNet::loss(const Matrix& X, const std::vector<double>& y) const {
    if (X.rows() != y.size()) throw Error("layered_net: X/y row mismatch");
    std::vector<LayerCache> caches;
    std::vector<double> out;
    forward(X, /*training=*/true, caches, out);
    return output_loss(out, y);
}

std::pair<double, std::vector<double>> LayeredNet::loss_and_gradient(
    const Matrix& X, const std::vector<double>& y) const {
    if (X.rows() != y.size()) throw Error("layered_net: X/y row mismatch");
    std::vector<LayerCache> caches;
    std::vector<double> out;
    forward(X, /*training=*/true, caches, out);
    return {output_loss(out, y), backward(caches, out, y)};
}

std::vector<double> LayeredNet::backward(const std::vector<LayerCache>& caches,
                                         const std::vector<double>& out,
                                         const std::vector<double>& y) const {
    const std::size_t m = y.size();
    const double inv_m = 1.0 / static_cast<double>(m);

    // d loss / d h for the output head. For the sigmoid head with binary
    // cross-entropy this collapses to (p - y) / m; for the linear head with
    // MSE it is 2 (p - y) / m.
    std::vector<double> delta(m);  // m x out of current layer, out shrinks to 1 at the head
    const double scale = output_ == OutputKind::sigmoid ? 1.0 : 2.0;
    for (std::size_t i = 0; i < m; ++i) delta[i] = scale * (out[i] - y[i]) * inv_m;

    std::vector<double> grad(parameter_count(), 0.0);

    // Parameter offsets mirror the flattening order of parameters().
    std::vector<std::size_t> offsets(layers_.size());
    {
        std::size_t at = 0;
        for (std::size_t li = 0; li < layers_.size(); ++li) {
            offsets[li] = at;
            at += layers_[li].W.size() + layers_[li].b.size();
            if (layers_[li].batch_norm)
                at += layers_[li].gamma.size() + layers_[li].beta.size();
        }
    }

    for (std::size_t li = layers_.size(); li-- > 0;) {
        const Layer& l = layers_[li];
        const LayerCache& c = caches[li];

        // delta currently holds d loss / d h (post-norm pre-activation) only
        // for the output layer; for inner layers it holds d loss / d out and
        // must first pass through the activation derivative.
        std::vector<double>& dh = delta;
        if (li != layers_.size() - 1) {
            const std::vector<double>& pre = l.batch_norm ? c.h : c.z;
            for (std::size_t i = 0; i < m * l.out; ++i)
                dh[i] *= activate_grad(l.activation, pre[i], c.out[i]);
        }

        double* gW = grad.data() + offsets[li];
        double* gb = gW + l.W.size();
        std::vector<double> dz;  // d loss / d z (pre-normalization)
        if (l.batch_norm) {
            double* ggamma = gb + l.b.size();
            double* gbeta = ggamma + l.gamma.size();
            dz.assign(m * l.out, 0.0);
            for (std::size_t j = 0; j < l.out; ++j) {
                const double inv_std = 1.0 / std::sqrt(c.var[j] + kBnEps);
                double sum_dzh = 0.0;
                double sum_dzh_zh = 0.0;
                for (std::size_t r = 0; r < m; ++r) {
                    const double dhij = dh[r * l.out + j];
                    const double zh = c.z_hat[r * l.out + j];
                    ggamma[j] += dhij * zh;
                    gbeta[j] += dhij;
                    const double dzh = dhij * l.gamma[j];
                    sum_dzh += dzh;
                    sum_dzh_zh += dzh * zh;
                }
                for (std::size_t r = 0; r < m; ++r) {
                    const double dzh = dh[r * l.out + j] * l.gamma[j];
                    const double zh = c.z_hat[r * l.out + j];
                    dz[r * l.out + j] =
                        inv_std * (dzh - (sum_dzh + zh * sum_dzh_zh) / static_cast<double>(m));
                }
            }
        } else {
            dz = dh;
        }

        for (std::size_t r = 0; r < m; ++r) {
            const double* in_row = c.input.data() + r * l.in;
            const double* dz_row = dz.data() + r * l.out;
            for (std::size_t j = 0; j < l.out; ++j) {
                const double d = dz_row[j];
                gb[j] += d;
                double* gW_row = gW + j * l.in;
                for (std::size_t k = 0; k < l.in; ++k) gW_row[k] += d * in_row[k];
            }
        }

        if (li > 0) {
            std::vector<double> dprev(m * l.in, 0.0);
            for (std::size_t r = 0; r < m; ++r) {
                const double* dz_row = dz.data() + r * l.out;
                double* dp_row = dprev.data() + r * l.in;
                for (std::size_t j = 0; j < l.out; ++j) {
                    const double d = dz_row[j];
                    const double* w = l.W.data() + j * l.in;
                    for (std::size_t k = 0; k < l.in; ++k) dp_row[k] += d * w[k];
                }
            }
            delta = std::move(dprev);
        }
    }

    return grad;
}

void LayeredNet::update_running_stats(const std::vector<LayerCache>& caches) {
    for (std::size_t li = 0; li < layers_.size(); ++li) {
        Layer& l = layers_[li];
        if (!l.batch_norm) continue;
        const LayerCache& c = caches[li];
        for (std::size_t j = 0; j < l.out; ++j) {
            l.running_mean[j] = kBnMomentum * l.running_mean[j] + (1.0 - kBnMomentum) * c.mean[j];
            l.running_var[j] = kBnMomentum * l.running_var[j] + (1.0 - kBnMomentum) * c.var[j];
        }
    }
}

void LayeredNet::train(const Matrix& X, const std::vector<double>& y,
                       const TrainParams& params) {
    if (X.rows() != y.size()) throw Error("layered_net: X/y row mismatch");
    if (params.batch_size < 1) throw Error("layered_net: batch_size must be >= 1");
    if (params.epochs < 1) throw Error("layered_net: epochs must be >= 1");
    if (params.validation_split < 0.0 || params.validation_split >= 1.0)
        throw Error("layered_net: validation_split must lie in [0, 1)");
    if (params.patience < 0) throw Error("layered_net: patience must be >= 0");

    const std::size_t n = X.rows();
    // Internal split takes the last fraction of the rows as provided, before
    // any shuffling.
    const auto n_val =
        static_cast<std::size_t>(std::floor(static_cast<double>(n) * params.validation_split));
    const std::size_t n_train = n - n_val;
    if (n_train == 0) throw Error("layered_net: no rows left to train on after the split");
    if (static_cast<std::size_t>(params.batch_size) > n_train)
        throw Error("layered_net: batch_size " + std::to_string(params.batch_size) +
                    " exceeds the " + std::to_string(n_train) +
                    " training rows left after the internal split");

    std::vector<std::size_t> train_idx(n_train);
    std::iota(train_idx.begin(), train_idx.end(), 0);
    std::vector<std::size_t> val_idx(n_val);
    std::iota(val_idx.begin(), val_idx.end(), n_train);
    Matrix X_val;
    std::vector<double> y_val;
    if (n_val > 0) {
        X_val = X.select_rows(val_idx);
        y_val.assign(y.begin() + static_cast<std::ptrdiff_t>(n_train), y.end());
    }

    Rng rng(seed_combine(mix64(seed_), 0x7261696eULL));  // batch order stream

    std::vector<double> adam_m(parameter_count(), 0.0);
    std::vector<double> adam_v(parameter_count(), 0.0);
    std::int64_t step = 0;

    double best_monitored = std::numeric_limits<double>::infinity();
    int best_epoch = 0;
    int wait = 0;
    std::vector<double> best_theta;
    std::vector<std::vector<double>> best_running;  // per batch-norm layer: mean then var

    auto snapshot_running = [&] {
        std::vector<std::vector<double>> snap;
        for (const auto& l : layers_)
            if (l.batch_norm) {
                snap.push_back(l.running_mean);
                snap.push_back(l.running_var);
            }
        return snap;
    };
    auto restore_running = [&](const std::vector<std::vector<double>>& snap) {
        std::size_t at = 0;
        for (auto& l : layers_)
            if (l.batch_norm) {
                l.running_mean = snap[at++];
                l.running_var = snap[at++];
            }
    };

    std::vector<std::size_t> batch_rows;
    std::vector<double> batch_y;
    int epochs_run = 0;
    double train_loss = 0.0;
    double val_loss = std::numeric_limits<double>::quiet_NaN();

    for (int epoch = 1; epoch <= params.epochs; ++epoch) {
        rng.shuffle(train_idx);
        double loss_sum = 0.0;

        for (std::size_t start = 0; start < n_train;
             start += static_cast<std::size_t>(params.batch_size)) {
            const std::size_t end =
                std::min(n_train, start + static_cast<std::size_t>(params.batch_size));
            batch_rows.assign(train_idx.begin() + static_cast<std::ptrdiff_t>(start),
                              train_idx.begin() + static_cast<std::ptrdiff_t>(end));
            const Matrix Xb = X.select_rows(batch_rows);
            batch_y.clear();
            for (std::size_t i : batch_rows) batch_y.push_back(y[i]);

            std::vector<LayerCache> caches;
            std::vector<double> out;
            forward(Xb, /*training=*/true, caches, out);
            const double batch_loss = output_loss(out, batch_y);
            if (!std::isfinite(batch_loss))
                throw Error("layered_net: training diverged (non-finite loss) at epoch " +
                            std::to_string(epoch));
            loss_sum += batch_loss * static_cast<double>(batch_rows.size());

            const std::vector<double> grad = backward(caches, out, batch_y);
            update_running_stats(caches);

            ++step;
            const double corr1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(step));
            const double corr2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(step));
            std::vector<double> theta = parameters();
            for (std::size_t i = 0; i < theta.size(); ++i) {
                adam_m[i] = kAdamBeta1 * adam_m[i] + (1.0 - kAdamBeta1) * grad[i];
                adam_v[i] = kAdamBeta2 * adam_v[i] + (1.0 - kAdamBeta2) * grad[i] * grad[i];
                const double mhat = adam_m[i] / corr1;
                const double vhat = adam_v[i] / corr2;
                theta[i] -= learning_rate_ * mhat / (std::sqrt(vhat) + kAdamEps);
            }
            set_parameters(theta);
        }

        epochs_run = epoch;
        train_loss = loss_sum / static_cast<double>(n_train);
        if (n_val > 0) {
            std::vector<LayerCache> caches;
            std::vector<double> out;
            forward(X_val, /*training=*/false, caches, out);
            val_loss = output_loss(out, y_val);
            if (!std::isfinite(val_loss))
                throw Error("layered_net: validation loss non-finite at epoch " +
                            std::to_string(epoch));
        }
        const double monitored = n_val > 0 ? val_loss : train_loss;
        if (params.verbose)
            std::cerr << "epoch " << epoch << "/" << params.epochs << " loss=" << train_loss
                      << (n_val > 0 ? " val_loss=" + std::to_string(val_loss) : "") << "\n";

        // Strict improvement only: an equal loss keeps the earlier epoch.
        if (monitored < best_monitored) {
            best_monitored = monitored;
            best_epoch = epoch;
            wait = 0;
            if (params.restore_best) {
                best_theta = parameters();
                best_running = snapshot_running();
            }
        } else {
            ++wait;
            if (params.patience > 0 && wait >= params.patience) break;
        }
    }

    if (params.restore_best && !best_theta.empty()) {
        set_parameters(best_theta);
        restore_running(best_running);
    }

    info_.epochs_run = epochs_run;
    info_.best_epoch = best_epoch;
    info_.final_train_loss = train_loss;
    info_.final_val_loss = val_loss;
}

std::vector<double> LayeredNet::predict(const Matrix& X) const {
    std::vector<LayerCache> caches;
    std::vector<double> out;
    forward(X, /*training=*/false, caches, out);
    if (output_ == OutputKind::sigmoid)
        for (double& p : out) p = std::min(1.0, std::max(0.0, p));
    return out;
}

namespace {

class LayeredNetModel final : public FittedModel {
public:
    LayeredNetModel(LayeredNet net, std::size_t width) : net_(std::move(net)) {
        input_width_ = width;
        info_ = net_.info();
    }

    ModelKind kind() const override { return ModelKind::layered_net; }

    std::vector<double> predict(const Matrix& X) const override {
        check_width(X);
        return net_.predict(X);
    }

private:
    LayeredNet net_;
};

}  // namespace

std::unique_ptr<FittedModel> fit_layered_net(const LayeredNetConfig& cfg, std::uint64_t seed,
                                             const Matrix& X, const std::vector<double>& y,
                                             const TrainParams& params) {
    if (cfg.output == OutputKind::sigmoid)
        for (double t : y)
            if (t != 0.0 && t != 1.0) throw Error("layered_net: targets must be 0/1");
    LayeredNet net(X.cols(), cfg, seed);
    net.train(X, y, params);
    return std::make_unique<LayeredNetModel>(std::move(net), X.cols());
}

}  // namespace tandem
