#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wellsim/metrics.hpp"
#include "wellsim/rng.hpp"

namespace wellsim {

enum class Activation { relu };
enum class Loss { mae, mse };

/// Feed-forward regression network: ReLU hidden layers, linear output
/// (targets are signed). split_index counts the dense layers that form the
/// shared root under federated personalization; the rest are the head.
struct Architecture {
    int input = 7;
    std::vector<int> hidden{64, 32, 16, 8, 4};
    int output = 2;
    Activation activation = Activation::relu;
    int split_index = 3;

    int layer_count() const { return static_cast<int>(hidden.size()) + 1; }

    /// (out_dim, in_dim) per dense layer, input to output.
    std::vector<std::pair<int, int>> layer_dims() const {
        std::vector<std::pair<int, int>> dims;
        int in = input;
        for (int h : hidden) {
            dims.emplace_back(h, in);
            in = h;
        }
        dims.emplace_back(output, in);
        return dims;
    }

    void validate() const {
        if (input < 1 || output < 1)
            throw std::invalid_argument("architecture: widths must be positive");
        for (int h : hidden)
            if (h < 1) throw std::invalid_argument("architecture: widths must be positive");
        if (split_index < 1 || split_index > layer_count() - 1)
            throw std::invalid_argument("architecture: split_index out of range");
    }

    bool operator==(const Architecture&) const = default;
};

struct DenseLayer {
    int out_dim = 0;
    int in_dim = 0;
    std::vector<double> w;  // row-major, w[o * in_dim + i]
    std::vector<double> b;

    bool operator==(const DenseLayer&) const = default;
};

struct ModelParams {
    std::vector<DenseLayer> layers;

    bool operator==(const ModelParams&) const = default;

    static ModelParams zeros(const Architecture& arch) {
        ModelParams p;
        for (auto [out, in] : arch.layer_dims()) {
            p.layers.push_back(DenseLayer{
                out, in, std::vector<double>(static_cast<std::size_t>(out) * in, 0.0),
                std::vector<double>(out, 0.0)});
        }
        return p;
    }

    static ModelParams zeros_like(const ModelParams& other) {
        ModelParams p;
        for (const auto& l : other.layers) {
            p.layers.push_back(DenseLayer{l.out_dim, l.in_dim,
                                          std::vector<double>(l.w.size(), 0.0),
                                          std::vector<double>(l.b.size(), 0.0)});
        }
        return p;
    }

    bool same_shape(const ModelParams& other) const {
        if (layers.size() != other.layers.size()) return false;
        for (std::size_t i = 0; i < layers.size(); ++i) {
            if (layers[i].out_dim != other.layers[i].out_dim ||
                layers[i].in_dim != other.layers[i].in_dim)
                return false;
        }
        return true;
    }

    double l2_norm() const {
        double acc = 0.0;
        for (const auto& l : layers) {
            for (double v : l.w) acc += v * v;
            for (double v : l.b) acc += v * v;
        }
        return std::sqrt(acc);
    }
};

/// Fan-in-scaled zero-mean init (variance 2/fan_in), zero biases.
inline ModelParams init_model(const Architecture& arch, std::uint64_t seed) {
    arch.validate();
    Rng rng(seed);
    ModelParams p = ModelParams::zeros(arch);
    for (auto& layer : p.layers) {
        const double sd = std::sqrt(2.0 / static_cast<double>(layer.in_dim));
        for (auto& w : layer.w) w = rng.normal(0.0, sd);
    }
    return p;
}

inline double apply_activation(double v, Activation a) {
    switch (a) {
        case Activation::relu:
            return v > 0.0 ? v : 0.0;
    }
    return v;
}

inline double activation_grad(double pre, Activation a) {
    switch (a) {
        case Activation::relu:
            return pre > 0.0 ? 1.0 : 0.0;  // subgradient 0 at the kink
    }
    return 1.0;
}

inline std::vector<double> forward(const ModelParams& params, std::span<const double> x) {
    if (params.layers.empty()) throw std::invalid_argument("forward: empty model");
    if (static_cast<int>(x.size()) != params.layers.front().in_dim)
        throw std::invalid_argument("forward: input width mismatch");
    std::vector<double> act(x.begin(), x.end());
    const std::size_t n_layers = params.layers.size();
    for (std::size_t li = 0; li < n_layers; ++li) {
        const auto& l = params.layers[li];
        if (static_cast<int>(act.size()) != l.in_dim)
            throw std::invalid_argument("forward: layer width mismatch");
        std::vector<double> next(l.out_dim);
        for (int o = 0; o < l.out_dim; ++o) {
            double acc = l.b[o];
            const double* row = &l.w[static_cast<std::size_t>(o) * l.in_dim];
            for (int i = 0; i < l.in_dim; ++i) acc += row[i] * act[i];
            next[o] = li + 1 < n_layers ? apply_activation(acc, Activation::relu) : acc;
        }
        act = std::move(next);
    }
    return act;
}

struct TrainData {
    std::vector<std::vector<double>> x;
    std::vector<std::vector<double>> y;

    std::size_t size() const { return x.size(); }
};

struct LossGrads {
    double loss = 0.0;
    ModelParams grads;
};

/// Loss and analytic gradients over a batch by reverse-mode accumulation.
/// The loss is the mean over samples and output dimensions; the subgradient
/// of |.| at 0 is taken as 0. Samples are reduced in order, so results are
/// independent of any upstream parallelism.
inline LossGrads loss_and_grads(const ModelParams& params, const TrainData& batch,
                                Loss loss_kind = Loss::mae) {
    if (batch.size() == 0) throw std::invalid_argument("loss_and_grads: empty batch");
    if (batch.y.size() != batch.x.size())
        throw std::invalid_argument("loss_and_grads: x/y size mismatch");
    const std::size_t n_layers = params.layers.size();
    const int out_dim = params.layers.back().out_dim;
    const double denom = static_cast<double>(batch.size()) * out_dim;

    LossGrads result;
    result.grads = ModelParams::zeros_like(params);

    std::vector<std::vector<double>> acts(n_layers + 1);  // acts[0] = input
    std::vector<std::vector<double>> pre(n_layers);

    for (std::size_t s = 0; s < batch.size(); ++s) {
        const auto& x = batch.x[s];
        const auto& y = batch.y[s];
        if (static_cast<int>(y.size()) != out_dim)
            throw std::invalid_argument("loss_and_grads: target width mismatch");
        for (double v : x)
            if (!std::isfinite(v)) throw std::invalid_argument("loss_and_grads: non-finite input");

        // forward, keeping pre-activations
        acts[0].assign(x.begin(), x.end());
        for (std::size_t li = 0; li < n_layers; ++li) {
            const auto& l = params.layers[li];
            if (static_cast<int>(acts[li].size()) != l.in_dim)
                throw std::invalid_argument("loss_and_grads: shape mismatch");
            pre[li].assign(l.out_dim, 0.0);
            for (int o = 0; o < l.out_dim; ++o) {
                double acc = l.b[o];
                const double* row = &l.w[static_cast<std::size_t>(o) * l.in_dim];
                for (int i = 0; i < l.in_dim; ++i) acc += row[i] * acts[li][i];
                pre[li][o] = acc;
            }
            if (li + 1 < n_layers) {
                acts[li + 1].resize(l.out_dim);
                for (int o = 0; o < l.out_dim; ++o)
                    acts[li + 1][o] = apply_activation(pre[li][o], Activation::relu);
            } else {
                acts[li + 1] = pre[li];  // linear output layer
            }
        }

        // loss and output delta
        std::vector<double> delta(out_dim);
        for (int o = 0; o < out_dim; ++o) {
            const double err = acts[n_layers][o] - y[o];
            if (loss_kind == Loss::mae) {
                result.loss += std::fabs(err) / denom;
                delta[o] = static_cast<double>(sign_of(err)) / denom;
            } else {
                result.loss += err * err / denom;
                delta[o] = 2.0 * err / denom;
            }
        }

        // backward
        for (std::size_t li = n_layers; li-- > 0;) {
            const auto& l = params.layers[li];
            auto& g = result.grads.layers[li];
            for (int o = 0; o < l.out_dim; ++o) {
                const double d = delta[o];
                if (d == 0.0) continue;
                g.b[o] += d;
                double* grow = &g.w[static_cast<std::size_t>(o) * l.in_dim];
                const double* a = acts[li].data();
                for (int i = 0; i < l.in_dim; ++i) grow[i] += d * a[i];
            }
            if (li == 0) break;
            std::vector<double> prev_delta(l.in_dim, 0.0);
            for (int o = 0; o < l.out_dim; ++o) {
                const double d = delta[o];
                if (d == 0.0) continue;
                const double* row = &l.w[static_cast<std::size_t>(o) * l.in_dim];
                for (int i = 0; i < l.in_dim; ++i) prev_delta[i] += row[i] * d;
            }
            for (int i = 0; i < l.in_dim; ++i)
                prev_delta[i] *= activation_grad(pre[li - 1][i], Activation::relu);
            delta = std::move(prev_delta);
        }
    }
    return result;
}

inline double evaluate_loss(const ModelParams& params, const TrainData& data,
                            Loss loss_kind = Loss::mae) {
    if (data.size() == 0) throw std::invalid_argument("evaluate_loss: empty set");
    const int out_dim = params.layers.back().out_dim;
    double acc = 0.0;
    for (std::size_t s = 0; s < data.size(); ++s) {
        const auto y_hat = forward(params, data.x[s]);
        for (int o = 0; o < out_dim; ++o) {
            const double err = y_hat[o] - data.y[s][o];
            acc += loss_kind == Loss::mae ? std::fabs(err) : err * err;
        }
    }
    return acc / (static_cast<double>(data.size()) * out_dim);
}

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    AdamConfig cfg;
    long step = 0;
    ModelParams m;
    ModelParams v;

    static AdamState init(const ModelParams& params, AdamConfig cfg = {}) {
        AdamState s;
        s.cfg = cfg;
        s.m = ModelParams::zeros_like(params);
        s.v = ModelParams::zeros_like(params);
        return s;
    }
};

/// One Adam update with bias correction.
inline void adam_step(AdamState& state, ModelParams& params, const ModelParams& grads) {
    if (!params.same_shape(grads) || !params.same_shape(state.m))
        throw std::invalid_argument("adam_step: shape mismatch");
    state.step += 1;
    const double b1 = state.cfg.beta1, b2 = state.cfg.beta2;
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
    for (std::size_t li = 0; li < params.layers.size(); ++li) {
        auto update = [&](std::vector<double>& p, std::vector<double>& m, std::vector<double>& v,
                          const std::vector<double>& g) {
            for (std::size_t i = 0; i < p.size(); ++i) {
                m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                const double m_hat = m[i] / bc1;
                const double v_hat = v[i] / bc2;
                p[i] -= state.cfg.lr * m_hat / (std::sqrt(v_hat) + state.cfg.eps);
            }
        };
        update(params.layers[li].w, state.m.layers[li].w, state.v.layers[li].w,
               grads.layers[li].w);
        update(params.layers[li].b, state.m.layers[li].b, state.v.layers[li].b,
               grads.layers[li].b);
    }
}

struct TrainConfig {
    int batch_size = 32;
    int epochs = 200;
    AdamConfig adam;
    bool early_stopping = true;
    int patience = 20;       // consecutive non-improving epochs tolerated
    double min_delta = 1e-4; // improvement below this does not reset patience
    double validation_fraction = 0.2;  // used by callers that split a corpus
    // MAE training of the funnel architecture can park one output at its
    // median (a flat subgradient basin); pre-training runs this many seeded
    // restarts and keeps the best-validation model
    int restarts = 3;
    Loss loss = Loss::mae;
    std::uint64_t seed = 0;

    void validate() const {
        if (batch_size < 1) throw std::invalid_argument("training: batch_size must be >= 1");
        if (epochs < 1) throw std::invalid_argument("training: epochs must be >= 1");
        if (patience < 0) throw std::invalid_argument("training: patience must be >= 0");
        if (min_delta < 0.0) throw std::invalid_argument("training: min_delta must be >= 0");
        if (validation_fraction <= 0.0 || validation_fraction >= 1.0)
            throw std::invalid_argument("training: validation_fraction must be in (0,1)");
        if (restarts < 1) throw std::invalid_argument("training: restarts must be >= 1");
    }
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    double val_loss = 0.0;
    double val_sign_acc_pct = 0.0;
};

struct History {
    std::vector<EpochStats> epochs;
    int best_epoch = 0;
    double best_val_loss = 0.0;
};

struct TrainResult {
    ModelParams params;
    History history;
};

/// Mini-batch training with seeded shuffling and early stopping on the
/// validation loss. With early stopping on, returns the parameters from the
/// best validation epoch; with it off (federated local epochs), runs exactly
/// cfg.epochs and returns the final parameters. Fully deterministic in
/// (initial params, data, config).
inline TrainResult train(const ModelParams& initial, const TrainData& train_set,
                         const TrainData& val_set, const TrainConfig& cfg) {
    cfg.validate();
    if (train_set.size() == 0) throw std::invalid_argument("train: empty training set");
    if (val_set.size() == 0) throw std::invalid_argument("train: empty validation set");

    ModelParams params = initial;
    AdamState opt = AdamState::init(params, cfg.adam);
    Rng rng(cfg.seed);

    const int out_dim = params.layers.back().out_dim;
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    auto val_stats = [&](const ModelParams& p, EpochStats& stats) {
        std::vector<double> y, y_hat;
        y.reserve(val_set.size() * out_dim);
        y_hat.reserve(val_set.size() * out_dim);
        for (std::size_t s = 0; s < val_set.size(); ++s) {
            const auto pred = forward(p, val_set.x[s]);
            for (int o = 0; o < out_dim; ++o) {
                y.push_back(val_set.y[s][o]);
                y_hat.push_back(pred[o]);
            }
        }
        stats.val_loss = evaluate_loss(p, val_set, cfg.loss);
        stats.val_sign_acc_pct = 100.0 * sign_accuracy(y, y_hat);
    };

    TrainResult result;
    result.history.best_val_loss = std::numeric_limits<double>::infinity();
    ModelParams best_params = params;
    int epochs_since_improve = 0;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle(order, rng);
        double epoch_abs = 0.0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
            TrainData batch;
            batch.x.reserve(end - start);
            batch.y.reserve(end - start);
            for (std::size_t i = start; i < end; ++i) {
                batch.x.push_back(train_set.x[order[i]]);
                batch.y.push_back(train_set.y[order[i]]);
            }
            auto lg = loss_and_grads(params, batch, cfg.loss);
            epoch_abs += lg.loss * static_cast<double>(end - start);
            adam_step(opt, params, lg.grads);
        }

        EpochStats stats;
        stats.epoch = epoch;
        stats.train_loss = epoch_abs / static_cast<double>(train_set.size());
        val_stats(params, stats);
        result.history.epochs.push_back(stats);

        if (result.history.best_val_loss - stats.val_loss > cfg.min_delta) {
            result.history.best_val_loss = stats.val_loss;
            result.history.best_epoch = epoch;
            best_params = params;
            epochs_since_improve = 0;
        } else {
            ++epochs_since_improve;
        }
        if (cfg.early_stopping && epochs_since_improve >= cfg.patience) break;
    }

    result.params = cfg.early_stopping ? best_params : params;
    return result;
}

}  // namespace wellsim
