#include "wellsim/config.hpp"

#include <gtest/gtest.h>

namespace {

using namespace wellsim;

TEST(Config, DefaultsMatchStudyHyperparameters) {
    const ExperimentConfig cfg;
    cfg.validate();
    EXPECT_EQ(cfg.training.batch_size, 32);
    EXPECT_DOUBLE_EQ(cfg.training.adam.lr, 1e-3);
    EXPECT_EQ(cfg.training.epochs, 200);
    EXPECT_EQ(cfg.model.hidden, (std::vector<int>{64, 32, 16, 8, 4}));
    EXPECT_DOUBLE_EQ(cfg.recommender.ranges.sleep_hrs.min, 7.0);
    EXPECT_DOUBLE_EQ(cfg.recommender.ranges.sleep_hrs.max, 9.0);
    EXPECT_DOUBLE_EQ(cfg.recommender.ranges.distance_km.min, 5.0);
    EXPECT_DOUBLE_EQ(cfg.recommender.ranges.distance_km.max, 8.0);
    EXPECT_DOUBLE_EQ(cfg.recommender.w_sleep, 1.0);
    EXPECT_DOUBLE_EQ(cfg.recommender.w_distance, 0.8);
    EXPECT_DOUBLE_EQ(cfg.recommender.w_bmi, 1.0);
    EXPECT_DOUBLE_EQ(cfg.recommender.w_meal, 1.0);
    EXPECT_DOUBLE_EQ(cfg.recommender.r_high, 3.0);
    EXPECT_DOUBLE_EQ(cfg.recommender.theta, 0.5);
    EXPECT_EQ(cfg.recommender.top_n, 2);
    EXPECT_EQ(cfg.federated.finetune_epochs, 10);
    EXPECT_EQ(cfg.federated.n_clients, 10);
    EXPECT_DOUBLE_EQ(cfg.sensors.step_threshold, 1.8);
    EXPECT_DOUBLE_EQ(cfg.sensors.stride_m, 0.5);
    EXPECT_EQ(cfg.sensors.sleep_window_start_hour, 22);
    EXPECT_EQ(cfg.sensors.sleep_window_end_hour, 10);
}

TEST(Config, SerializationRoundTrips) {
    ExperimentConfig cfg;
    cfg.seed = 77;
    cfg.federated.strategy = Strategy::fedper;
    cfg.federated.rounds = 2;
    cfg.federated.local_epochs = 5;
    cfg.generator.p_breakfast = 0.6;
    const std::string ini = config_to_ini(cfg);
    const auto back = config_from_ini(ini);
    EXPECT_EQ(config_to_ini(back), ini);
    EXPECT_EQ(back.seed, 77u);
    EXPECT_EQ(back.federated.strategy, Strategy::fedper);
    EXPECT_DOUBLE_EQ(back.generator.p_breakfast, 0.6);
}

TEST(Config, DefaultIniContainsEveryStudyValue) {
    const std::string ini = config_to_ini(ExperimentConfig{});
    for (const char* needle :
         {"batch_size = 32", "learning_rate = 0.001", "pretrain_epochs = 200",
          "hidden_widths = 64,32,16,8,4", "ideal_sleep_min = 7", "ideal_sleep_max = 9",
          "ideal_distance_min = 5", "ideal_distance_max = 8", "w_sleep = 1", "w_distance = 0.8",
          "w_bmi = 1", "w_meal = 1", "r_high = 3", "theta = 0.5", "top_n = 2",
          "finetune_epochs = 10", "clients = 10", "step_threshold = 1.8", "stride_m = 0.5",
          "sleep_window_start_hour = 22", "sleep_window_end_hour = 10"}) {
        EXPECT_NE(ini.find(needle), std::string::npos) << "missing: " << needle << "\n" << ini;
    }
}

TEST(Config, UnknownKeyRejectedByName) {
    try {
        config_from_ini("[generator]\nnot_a_key = 1\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("generator.not_a_key"), std::string::npos);
    }
}

TEST(Config, UnknownSectionRejected) {
    EXPECT_THROW(config_from_ini("[nosuch]\nx = 1\n"), ConfigError);
}

TEST(Config, MalformedValueNamesKey) {
    try {
        config_from_ini("[training]\nbatch_size = thirty\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("training.batch_size"), std::string::npos);
    }
}

TEST(Config, CommentsAndBlankLinesIgnored) {
    const auto cfg = config_from_ini(
        "# leading comment\n\nseed = 5\n[training]\nbatch_size = 16  # trailing\n");
    EXPECT_EQ(cfg.seed, 5u);
    EXPECT_EQ(cfg.training.batch_size, 16);
}

TEST(Config, CrossFieldValidation) {
    ExperimentConfig cfg;
    cfg.federated.rounds = 3;  // 3 * 2 != 10
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg.federated.finetune_epochs = 6;
    EXPECT_NO_THROW(cfg.validate());
}

TEST(Config, DigestTracksValues) {
    ExperimentConfig a, b;
    EXPECT_EQ(config_digest(a), config_digest(b));
    b.generator.steps_mean = 6000;
    EXPECT_NE(config_digest(a), config_digest(b));
    EXPECT_EQ(config_digest(a).size(), 16u);
}

TEST(Config, CatalogOverrides) {
    const std::string path = testing::TempDir() + "wellsim_catalog.txt";
    write_text_file(path, "sleep.below = Sleep earlier tonight\nfallback = All good!\n");
    const auto catalog = load_catalog(path);
    EXPECT_EQ(catalog.sleep_below, "Sleep earlier tonight");
    EXPECT_EQ(catalog.fallback, "All good!");
    EXPECT_EQ(catalog.distance_below, MessageCatalog{}.distance_below);

    write_text_file(path, "wrong.key = x\n");
    EXPECT_THROW(load_catalog(path), ConfigError);
}

}  // namespace
