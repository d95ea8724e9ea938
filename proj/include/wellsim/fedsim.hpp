#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wellsim/checkpoint.hpp"
#include "wellsim/features.hpp"
#include "wellsim/metrics.hpp"
#include "wellsim/mlp.hpp"
#include "wellsim/synthgen.hpp"

namespace wellsim {

enum class Strategy { fedavg, fedper };

inline const char* strategy_name(Strategy s) {
    return s == Strategy::fedavg ? "fedavg" : "fedper";
}

struct FedConfig {
    Strategy strategy = Strategy::fedavg;
    int n_clients = 10;
    int rounds = 2;
    int local_epochs = 5;
    int finetune_epochs = 10;  // must equal rounds * local_epochs
    // local fine-tuning rate; eight-sample clients need a much larger step
    // than pre-training for the ten-epoch budget to move the model at all
    double local_lr = 0.1;
    double client_fraction = 1.0;
    int train_days = 8;  // fine-tune on the first 8 days
    int eval_days = 7;   // evaluate on the next 7
    double heterogeneity = 0.3;  // fraction of clients made mostly-ideal
    double p_ideal = 0.95;       // per-record chance an ideal client's value is in range

    void validate() const {
        if (n_clients < 1) throw std::invalid_argument("federated.clients must be >= 1");
        if (rounds < 0) throw std::invalid_argument("federated.rounds must be >= 0");
        if (local_epochs < 0) throw std::invalid_argument("federated.local_epochs must be >= 0");
        if (rounds * local_epochs != finetune_epochs)
            throw std::invalid_argument(
                "federated.finetune_epochs must equal rounds * local_epochs");
        if (local_lr <= 0.0)
            throw std::invalid_argument("federated.local_learning_rate must be positive");
        if (client_fraction <= 0.0 || client_fraction > 1.0)
            throw std::invalid_argument("federated.client_fraction must be in (0,1]");
        if (train_days < 1 || eval_days < 1)
            throw std::invalid_argument("federated.train/eval days must be >= 1");
        if (heterogeneity < 0.0 || heterogeneity > 1.0)
            throw std::invalid_argument("federated.heterogeneity must be in [0,1]");
        if (p_ideal < 0.0 || p_ideal > 1.0)
            throw std::invalid_argument("federated.p_ideal must be in [0,1]");
    }
};

/// A simulated participant. Only ClientUpdate values ever leave a client, so
/// one client's records are structurally invisible to the others and to the
/// server.
struct ClientState {
    int client_id = 0;
    std::vector<DailyRecord> train_days;
    std::vector<DailyRecord> eval_days;
    ModelParams local;               // last locally fine-tuned model
    std::vector<DenseLayer> head;    // persistent personal head (FedPer)
    int n_samples = 0;
};

struct ClientUpdate {
    int client_id = 0;
    std::vector<DenseLayer> layers;  // all layers (FedAvg) or shared root only (FedPer)
    int n_samples = 0;
    bool root_only = false;
};

// seed-stream tags (see child_seed); fixed so runs are reproducible and
// clients are independent of iteration order
namespace fedseed {
inline constexpr std::uint64_t kCohort = 1;
inline constexpr std::uint64_t kPartition = 2;
inline std::uint64_t ideal_client(int client_id) { return 0x1000 + client_id; }
inline std::uint64_t finetune(int round, int client_id) {
    return 0x100000 + static_cast<std::uint64_t>(round) * 4096 + client_id;
}
inline std::uint64_t sampling(int round) { return 0x2000 + static_cast<std::uint64_t>(round); }
}  // namespace fedseed

/// Splits a generated cohort into clients: client k takes the first
/// train+eval consecutive days of user k. A seeded subset of clients is then
/// rewritten "mostly-ideal": with probability p_ideal each sleep/distance
/// value is redrawn uniformly inside its ideal range, which makes their
/// deficit labels dominated by exact zeros.
inline std::vector<ClientState> partition_clients(const std::vector<UserDays>& dataset,
                                                  const FedConfig& fed,
                                                  const IdealRanges& ranges,
                                                  std::uint64_t seed) {
    fed.validate();
    ranges.validate();
    const int days_needed = fed.train_days + fed.eval_days;
    if (static_cast<int>(dataset.size()) < fed.n_clients)
        throw std::invalid_argument("partition_clients: not enough users for the client count");
    for (int k = 0; k < fed.n_clients; ++k) {
        if (static_cast<int>(dataset[k].days.size()) < days_needed)
            throw std::invalid_argument("partition_clients: a client has fewer days than needed");
    }

    std::vector<ClientState> clients(fed.n_clients);
    for (int k = 0; k < fed.n_clients; ++k) {
        auto& c = clients[k];
        c.client_id = k;
        const auto& days = dataset[k].days;
        c.train_days.assign(days.begin(), days.begin() + fed.train_days);
        c.eval_days.assign(days.begin() + fed.train_days, days.begin() + days_needed);
        c.n_samples = fed.train_days;
    }

    const int n_ideal = static_cast<int>(
        std::llround(fed.heterogeneity * static_cast<double>(fed.n_clients)));
    if (n_ideal > 0) {
        std::vector<int> ids(fed.n_clients);
        for (int k = 0; k < fed.n_clients; ++k) ids[k] = k;
        Rng pick(child_seed(seed, fedseed::kPartition));
        shuffle(ids, pick);
        for (int j = 0; j < n_ideal; ++j) {
            auto& c = clients[ids[j]];
            Rng rng(child_seed(seed, fedseed::ideal_client(c.client_id)));
            auto rewrite = [&](std::vector<DailyRecord>& recs) {
                for (auto& r : recs) {
                    if (rng.bernoulli(fed.p_ideal))
                        r.sleep_hrs = rng.uniform(ranges.sleep_hrs.min, ranges.sleep_hrs.max);
                    if (rng.bernoulli(fed.p_ideal))
                        r.distance_km =
                            rng.uniform(ranges.distance_km.min, ranges.distance_km.max);
                }
            };
            rewrite(c.train_days);
            rewrite(c.eval_days);
        }
    }
    return clients;
}

inline TrainData records_to_train_data(const std::vector<DailyRecord>& records,
                                       const ScalerStats& scaler, const IdealRanges& ranges) {
    TrainData data;
    data.x.reserve(records.size());
    data.y.reserve(records.size());
    for (const auto& r : records) {
        const auto x = transform(scaler, engineer(r));
        data.x.emplace_back(x.begin(), x.end());
        const auto y = deficit_labels(r, ranges).to_array();
        data.y.emplace_back(y.begin(), y.end());
    }
    return data;
}

inline std::vector<DenseLayer> root_of(const ModelParams& params, int split_index) {
    if (split_index < 1 || split_index >= static_cast<int>(params.layers.size()))
        throw std::invalid_argument("split_index out of range");
    return {params.layers.begin(), params.layers.begin() + split_index};
}

inline std::vector<DenseLayer> head_of(const ModelParams& params, int split_index) {
    if (split_index < 1 || split_index >= static_cast<int>(params.layers.size()))
        throw std::invalid_argument("split_index out of range");
    return {params.layers.begin() + split_index, params.layers.end()};
}

/// Local fine-tuning. FedAvg clients start from the full broadcast model and
/// return all layers; FedPer clients splice the broadcast root onto their
/// persistent head, train, keep the head locally, and return only the root.
/// train_cfg.epochs/early_stopping are overridden by the federated settings.
inline ClientUpdate local_finetune(ClientState& client,
                                   const std::vector<DenseLayer>& broadcast,
                                   const Architecture& arch, const FedConfig& fed,
                                   const ScalerStats& scaler, const IdealRanges& ranges,
                                   TrainConfig train_cfg, std::uint64_t seed) {
    if (client.train_days.empty())
        throw std::invalid_argument("local_finetune: client has no training data");

    ModelParams local;
    if (fed.strategy == Strategy::fedavg) {
        if (static_cast<int>(broadcast.size()) != arch.layer_count())
            throw std::invalid_argument("local_finetune: broadcast/architecture mismatch");
        local.layers = broadcast;
    } else {
        if (static_cast<int>(broadcast.size()) != arch.split_index)
            throw std::invalid_argument("local_finetune: broadcast root width mismatch");
        if (static_cast<int>(client.head.size()) != arch.layer_count() - arch.split_index)
            throw std::invalid_argument("local_finetune: client head shape mismatch");
        local.layers = broadcast;
        local.layers.insert(local.layers.end(), client.head.begin(), client.head.end());
    }
    const auto dims = arch.layer_dims();
    for (std::size_t i = 0; i < local.layers.size(); ++i) {
        if (local.layers[i].out_dim != dims[i].first || local.layers[i].in_dim != dims[i].second)
            throw std::invalid_argument("local_finetune: layer shape mismatch with architecture");
    }

    if (fed.local_epochs > 0) {
        const TrainData data = records_to_train_data(client.train_days, scaler, ranges);
        train_cfg.epochs = fed.local_epochs;
        train_cfg.early_stopping = false;
        train_cfg.adam.lr = fed.local_lr;
        train_cfg.seed = seed;
        local = train(local, data, data, train_cfg).params;
    }

    client.local = local;
    ClientUpdate update;
    update.client_id = client.client_id;
    update.n_samples = client.n_samples;
    if (fed.strategy == Strategy::fedper) {
        client.head = head_of(local, arch.split_index);
        update.layers = root_of(local, arch.split_index);
        update.root_only = true;
    } else {
        update.layers = local.layers;
        update.root_only = false;
    }
    return update;
}

namespace detail {

/// Sample-count-weighted elementwise mean, accumulated in ascending
/// client-id order so the result is independent of completion order.
inline std::vector<DenseLayer> weighted_mean_layers(std::vector<const ClientUpdate*> updates) {
    if (updates.empty()) throw std::invalid_argument("aggregate: no updates");
    std::sort(updates.begin(), updates.end(),
              [](const ClientUpdate* a, const ClientUpdate* b) {
                  return a->client_id < b->client_id;
              });
    double total = 0.0;
    for (const auto* u : updates) {
        if (u->n_samples <= 0) throw std::invalid_argument("aggregate: non-positive n_samples");
        total += static_cast<double>(u->n_samples);
    }
    const auto& first = updates.front()->layers;
    std::vector<DenseLayer> acc;
    for (const auto& l : first) {
        acc.push_back(DenseLayer{l.out_dim, l.in_dim, std::vector<double>(l.w.size(), 0.0),
                                 std::vector<double>(l.b.size(), 0.0)});
    }
    for (const auto* u : updates) {
        if (u->layers.size() != acc.size())
            throw std::invalid_argument("aggregate: update layer count mismatch");
        const double weight = static_cast<double>(u->n_samples) / total;
        for (std::size_t li = 0; li < acc.size(); ++li) {
            const auto& l = u->layers[li];
            if (l.out_dim != acc[li].out_dim || l.in_dim != acc[li].in_dim)
                throw std::invalid_argument("aggregate: update layer shape mismatch");
            for (std::size_t i = 0; i < l.w.size(); ++i) acc[li].w[i] += weight * l.w[i];
            for (std::size_t i = 0; i < l.b.size(); ++i) acc[li].b[i] += weight * l.b[i];
        }
    }
    return acc;
}

}  // namespace detail

/// FedAvg: every parameter of the new global model is the sample-count
/// weighted mean of the client updates.
inline ModelParams fedavg_aggregate(const std::vector<ClientUpdate>& updates) {
    std::vector<const ClientUpdate*> ptrs;
    for (const auto& u : updates) {
        if (u.root_only)
            throw std::invalid_argument("fedavg_aggregate: expected full-model updates");
        ptrs.push_back(&u);
    }
    ModelParams out;
    out.layers = detail::weighted_mean_layers(std::move(ptrs));
    return out;
}

/// FedPer: weighted mean over shared-root layers only. Updates carrying head
/// layers are a protocol violation; client heads never reach the server.
inline std::vector<DenseLayer> fedper_aggregate(const std::vector<ClientUpdate>& updates,
                                                int split_index) {
    std::vector<const ClientUpdate*> ptrs;
    for (const auto& u : updates) {
        if (!u.root_only || static_cast<int>(u.layers.size()) != split_index)
            throw std::invalid_argument(
                "fedper_aggregate: update must contain exactly the shared-root layers");
        ptrs.push_back(&u);
    }
    return detail::weighted_mean_layers(std::move(ptrs));
}

inline double layers_l2_norm(const std::vector<DenseLayer>& layers) {
    double acc = 0.0;
    for (const auto& l : layers) {
        for (double v : l.w) acc += v * v;
        for (double v : l.b) acc += v * v;
    }
    return std::sqrt(acc);
}

struct ExperimentInputs {
    Checkpoint pretrained;
    GeneratorConfig generator;
    IdealRanges ranges;
    FedConfig fed;
    TrainConfig finetune;  // batch size, optimizer, loss; epochs/seed overridden per client
    double eps_zero = 0.0;
    bool per_output = false;
    std::uint64_t seed = 42;
    std::string config_digest;
};

inline ClientMetrics evaluate_client(const ClientState& client, const ModelParams& model,
                                     const ScalerStats& scaler, const IdealRanges& ranges,
                                     double eps_zero, bool per_output) {
    const int out_dim = model.layers.back().out_dim;
    std::vector<std::vector<double>> y(out_dim), y_hat(out_dim);
    for (const auto& r : client.eval_days) {
        const auto x = transform(scaler, engineer(r));
        const auto pred = forward(model, x);
        const auto truth = deficit_labels(r, ranges).to_array();
        for (int o = 0; o < out_dim; ++o) {
            y[o].push_back(truth[o]);
            y_hat[o].push_back(pred[o]);
        }
    }
    ClientMetrics m;
    m.client_id = client.client_id;
    m.n_values = static_cast<int>(client.eval_days.size()) * out_dim;
    if (per_output) {
        double acc = 0.0, mae = 0.0;
        for (int o = 0; o < out_dim; ++o) {
            acc += sign_accuracy(y[o], y_hat[o], eps_zero);
            mae += mean_absolute_error(y[o], y_hat[o]);
        }
        m.sign_accuracy_pct = 100.0 * acc / out_dim;
        m.mae = mae / out_dim;
    } else {
        std::vector<double> y_all, y_hat_all;
        for (int o = 0; o < out_dim; ++o) {
            y_all.insert(y_all.end(), y[o].begin(), y[o].end());
            y_hat_all.insert(y_hat_all.end(), y_hat[o].begin(), y_hat[o].end());
        }
        m.sign_accuracy_pct = 100.0 * sign_accuracy(y_all, y_hat_all, eps_zero);
        m.mae = mean_absolute_error(y_all, y_hat_all);
    }
    return m;
}

/// Full federated run: generate the client cohort, partition, iterate
/// {broadcast, local fine-tune, aggregate}, then evaluate every client on its
/// held-out days. Deterministic in (checkpoint, config, seed).
inline MetricsReport run_experiment(const ExperimentInputs& in) {
    in.fed.validate();
    in.ranges.validate();
    const Architecture& arch = in.pretrained.arch;
    arch.validate();

    Generator gen(in.generator);
    const auto cohort = gen.generate_dataset(in.fed.n_clients,
                                             in.fed.train_days + in.fed.eval_days,
                                             child_seed(in.seed, fedseed::kCohort));
    auto clients = partition_clients(cohort, in.fed, in.ranges, in.seed);

    // broadcast state: full model for FedAvg, shared root for FedPer
    ModelParams global = in.pretrained.params;
    std::vector<DenseLayer> shared_root = root_of(global, arch.split_index);
    for (auto& c : clients) c.head = head_of(in.pretrained.params, arch.split_index);

    std::vector<RoundTelemetry> telemetry;
    for (int round = 1; round <= in.fed.rounds; ++round) {
        std::vector<int> participants;
        for (const auto& c : clients) participants.push_back(c.client_id);
        if (in.fed.client_fraction < 1.0) {
            Rng pick(child_seed(in.seed, fedseed::sampling(round)));
            shuffle(participants, pick);
            const auto keep = static_cast<std::size_t>(std::max(
                1.0, std::ceil(in.fed.client_fraction * static_cast<double>(clients.size()))));
            participants.resize(keep);
            std::sort(participants.begin(), participants.end());
        }

        RoundTelemetry rt;
        rt.round = round;
        std::vector<ClientUpdate> updates;
        for (int id : participants) {
            auto& client = clients[id];
            const auto& broadcast =
                in.fed.strategy == Strategy::fedavg ? global.layers : shared_root;
            auto update = local_finetune(client, broadcast, arch, in.fed, in.pretrained.scaler,
                                         in.ranges, in.finetune,
                                         child_seed(in.seed, fedseed::finetune(round, id)));
            const TrainData data =
                records_to_train_data(client.train_days, in.pretrained.scaler, in.ranges);
            rt.client_train_loss.push_back(evaluate_loss(client.local, data, in.finetune.loss));
            updates.push_back(std::move(update));
        }

        if (in.fed.strategy == Strategy::fedavg) {
            global = fedavg_aggregate(updates);
            rt.aggregate_norm = global.l2_norm();
        } else {
            shared_root = fedper_aggregate(updates, arch.split_index);
            rt.aggregate_norm = layers_l2_norm(shared_root);
        }
        telemetry.push_back(std::move(rt));
    }

    std::vector<ClientMetrics> rows;
    for (const auto& c : clients) {
        ModelParams final_model;
        if (in.fed.strategy == Strategy::fedavg) {
            final_model = global;
        } else {
            final_model.layers = shared_root;
            final_model.layers.insert(final_model.layers.end(), c.head.begin(), c.head.end());
        }
        rows.push_back(evaluate_client(c, final_model, in.pretrained.scaler, in.ranges,
                                       in.eps_zero, in.per_output));
    }

    MetricsReport report = aggregate_report(std::move(rows));
    report.strategy = strategy_name(in.fed.strategy);
    report.seed = in.seed;
    report.config_digest = in.config_digest;
    report.rounds = std::move(telemetry);
    return report;
}

}  // namespace wellsim
