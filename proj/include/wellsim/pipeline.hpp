#pragma once

#include <cstdint>
#include <vector>

#include "wellsim/checkpoint.hpp"
#include "wellsim/config.hpp"
#include "wellsim/features.hpp"
#include "wellsim/fedsim.hpp"
#include "wellsim/mlp.hpp"
#include "wellsim/synthgen.hpp"

namespace wellsim {

namespace pipeseed {
inline constexpr std::uint64_t kCorpus = 11;
inline constexpr std::uint64_t kSplit = 12;
inline constexpr std::uint64_t kInit = 13;
inline constexpr std::uint64_t kTrain = 14;
}  // namespace pipeseed

struct PretrainResult {
    Checkpoint checkpoint;
    History history;
    // held-out split predictions, pooled over both outputs
    std::vector<double> holdout_y;
    std::vector<double> holdout_y_hat;
    double holdout_mae = 0.0;
};

/// Pre-training pipeline: engineer features, fit the scaler on the training
/// split, train with early stopping, and bundle scaler + architecture +
/// parameters into a checkpoint.
inline PretrainResult pretrain_on(const std::vector<DailyRecord>& records,
                                  const ExperimentConfig& cfg) {
    cfg.validate();
    if (records.empty()) throw std::invalid_argument("pretrain: empty corpus");

    // seeded train/validation split
    std::vector<std::size_t> order(records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng split_rng(child_seed(cfg.seed, pipeseed::kSplit));
    shuffle(order, split_rng);
    auto n_val = static_cast<std::size_t>(
        cfg.training.validation_fraction * static_cast<double>(records.size()));
    if (n_val == 0) n_val = 1;
    if (n_val >= records.size()) n_val = records.size() - 1;

    std::vector<const DailyRecord*> val_records, train_records;
    for (std::size_t i = 0; i < order.size(); ++i) {
        (i < n_val ? val_records : train_records).push_back(&records[order[i]]);
    }

    std::vector<FeatureVector> train_features;
    train_features.reserve(train_records.size());
    for (const auto* r : train_records) train_features.push_back(engineer(*r));
    const ScalerStats scaler = fit_scaler(train_features);

    const IdealRanges& ranges = cfg.recommender.ranges;
    auto build = [&](const std::vector<const DailyRecord*>& recs) {
        TrainData data;
        data.x.reserve(recs.size());
        data.y.reserve(recs.size());
        for (const auto* r : recs) {
            const auto x = transform(scaler, engineer(*r));
            data.x.emplace_back(x.begin(), x.end());
            const auto y = deficit_labels(*r, ranges).to_array();
            data.y.emplace_back(y.begin(), y.end());
        }
        return data;
    };
    const TrainData train_set = build(train_records);
    const TrainData val_set = build(val_records);

    TrainResult best;
    double best_val = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < cfg.training.restarts; ++restart) {
        const std::uint64_t tag = 1000ULL * static_cast<std::uint64_t>(restart);
        ModelParams params = init_model(cfg.model, child_seed(cfg.seed, pipeseed::kInit + tag));
        TrainConfig tcfg = cfg.training;
        tcfg.seed = child_seed(cfg.seed, pipeseed::kTrain + tag);
        TrainResult trained = train(params, train_set, val_set, tcfg);
        const double val = evaluate_loss(trained.params, val_set, cfg.training.loss);
        if (val < best_val) {
            best_val = val;
            best = std::move(trained);
        }
    }

    PretrainResult result;
    result.checkpoint = Checkpoint{cfg.model, scaler, best.params};
    result.history = std::move(best.history);
    const int out_dim = cfg.model.output;
    for (std::size_t s = 0; s < val_set.size(); ++s) {
        const auto pred = forward(result.checkpoint.params, val_set.x[s]);
        for (int o = 0; o < out_dim; ++o) {
            result.holdout_y.push_back(val_set.y[s][o]);
            result.holdout_y_hat.push_back(pred[o]);
        }
    }
    result.holdout_mae = mean_absolute_error(result.holdout_y, result.holdout_y_hat);
    return result;
}

/// Generates the corpus described by [generator] and pre-trains on it.
inline PretrainResult pretrain(const ExperimentConfig& cfg) {
    cfg.validate();
    Generator gen(cfg.generator);
    const auto dataset = gen.generate_dataset(cfg.corpus_users, cfg.corpus_days,
                                              child_seed(cfg.seed, pipeseed::kCorpus));
    return pretrain_on(flatten(dataset), cfg);
}

/// Assembles federated experiment inputs from a config and a checkpoint.
inline ExperimentInputs experiment_inputs(const ExperimentConfig& cfg, Checkpoint ckpt) {
    cfg.validate();
    ExperimentInputs in;
    in.pretrained = std::move(ckpt);
    in.generator = cfg.generator;
    in.ranges = cfg.recommender.ranges;
    in.fed = cfg.federated;
    in.finetune = cfg.training;
    in.eps_zero = cfg.metrics.eps_zero;
    in.per_output = cfg.metrics.per_output;
    in.seed = cfg.seed;
    in.config_digest = config_digest(cfg);
    return in;
}

}  // namespace wellsim
