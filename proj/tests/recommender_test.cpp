#include "wellsim/recommender.hpp"

#include <gtest/gtest.h>

#include "wellsim/rng.hpp"

namespace {

using namespace wellsim;

FeatureVector ideal_features() {
    FeatureVector f;
    f.distance_km = 6.0;
    f.sleep_hrs = 8.0;
    f.bmi = 22.0;
    f.age = 22.0;
    f.breakfast = 1.0;
    f.meal = 2.0;
    f.gender = 0.0;
    return f;
}

TEST(ParamRisks, SleepDeficitRisk) {
    const RecommenderConfig cfg;
    const auto items = param_risks(DeficitPair{2.0, 0.0}, cfg);
    ASSERT_EQ(items.size(), 1u);
    EXPECT_EQ(items[0].source, RiskSource::sleep);
    EXPECT_DOUBLE_EQ(items[0].risk, 2.0);
    EXPECT_EQ(items[0].message, "Try to get more sleep");
}

TEST(ParamRisks, ZeroDeficitsEmpty) {
    EXPECT_TRUE(param_risks(DeficitPair{0.0, 0.0}, RecommenderConfig{}).empty());
}

TEST(ParamRisks, BelowThresholdIgnored) {
    EXPECT_TRUE(param_risks(DeficitPair{0.4, -0.5}, RecommenderConfig{}).empty());
}

TEST(ParamRisks, NegativeDistanceDeficitUsesAboveMessage) {
    const RecommenderConfig cfg;
    const auto items = param_risks(DeficitPair{0.0, -2.0}, cfg);
    ASSERT_EQ(items.size(), 1u);
    EXPECT_DOUBLE_EQ(items[0].risk, 1.6);
    EXPECT_EQ(items[0].message, cfg.catalog.distance_above);
}

TEST(RuleRisks, AllRulesInactiveOnIdealInput) {
    EXPECT_TRUE(rule_risks(ideal_features(), DeficitPair{}, RecommenderConfig{}).empty());
}

TEST(RuleRisks, BmiAboveRangeCapped) {
    auto f = ideal_features();
    f.bmi = 27.9;
    const auto items = rule_risks(f, DeficitPair{}, RecommenderConfig{});
    ASSERT_EQ(items.size(), 1u);
    EXPECT_EQ(items[0].source, RiskSource::bmi);
    EXPECT_DOUBLE_EQ(items[0].risk, 3.0);  // min(27.9 - 24.9, cap 3)

    f.bmi = 40.0;
    const auto capped = rule_risks(f, DeficitPair{}, RecommenderConfig{});
    EXPECT_DOUBLE_EQ(capped[0].risk, 3.0);
}

TEST(RuleRisks, SkippedBreakfastWithSleepDeficit) {
    auto f = ideal_features();
    f.breakfast = 0.0;
    const auto items = rule_risks(f, DeficitPair{2.0, 0.0}, RecommenderConfig{});
    ASSERT_EQ(items.size(), 2u);
    EXPECT_EQ(items[0].source, RiskSource::meal);
    EXPECT_DOUBLE_EQ(items[0].risk, 1.0);  // w_meal * (1 - 0) + w_meal * (2 - 2) / 2
    EXPECT_EQ(items[1].source, RiskSource::interaction_sleep_breakfast);
    EXPECT_DOUBLE_EQ(items[1].risk, 0.5);
}

TEST(RuleRisks, DistanceDeficitWithMissedMeal) {
    auto f = ideal_features();
    f.meal = 1.0;
    const auto items = rule_risks(f, DeficitPair{0.0, 1.5}, RecommenderConfig{});
    ASSERT_EQ(items.size(), 2u);
    EXPECT_EQ(items[0].source, RiskSource::meal);
    EXPECT_DOUBLE_EQ(items[0].risk, 0.5);  // (2 - 1) / 2
    EXPECT_EQ(items[1].source, RiskSource::interaction_distance_meal);
    EXPECT_DOUBLE_EQ(items[1].risk, 0.4);  // 0.5 * w_distance
}

TEST(Composite, SumsRisks) {
    std::vector<RiskItem> items{{RiskSource::sleep, 2.0, "a"}, {RiskSource::distance, 1.6, "b"}};
    EXPECT_DOUBLE_EQ(composite(items), 3.6);
    EXPECT_DOUBLE_EQ(composite({}), 0.0);
    EXPECT_DOUBLE_EQ(composite({{RiskSource::bmi, 0.7, "c"}}), 0.7);
}

TEST(Select, WorkedExample) {
    const RecommenderConfig cfg;
    std::vector<RiskItem> items{{RiskSource::sleep, 2.0, "sleep msg"},
                                {RiskSource::distance, 1.6, "distance msg"},
                                {RiskSource::meal, 0.4, "meal msg"}};
    const auto set = select(items, composite(items), cfg);
    ASSERT_EQ(set.messages.size(), 2u);
    EXPECT_EQ(set.messages[0].message, "sleep msg");
    EXPECT_EQ(set.messages[1].message, "distance msg");
    EXPECT_DOUBLE_EQ(set.composite_risk, 4.0);
    EXPECT_TRUE(set.high_priority);
    EXPECT_FALSE(set.is_fallback);
}

TEST(Select, FallbackWhenNothingSurvives) {
    const RecommenderConfig cfg;
    std::vector<RiskItem> items{{RiskSource::meal, 0.3, "m"}, {RiskSource::bmi, 0.2, "b"}};
    const auto set = select(items, composite(items), cfg);
    ASSERT_EQ(set.messages.size(), 1u);
    EXPECT_EQ(set.messages[0].message,
              "Your lifestyle parameters are close to ideal. Keep it up!");
    EXPECT_FALSE(set.high_priority);
    EXPECT_TRUE(set.is_fallback);
}

TEST(Select, SingleSurvivorNoPriorityTag) {
    const RecommenderConfig cfg;
    std::vector<RiskItem> items{{RiskSource::distance, 0.6, "d"}};
    const auto set = select(items, composite(items), cfg);
    ASSERT_EQ(set.messages.size(), 1u);
    EXPECT_EQ(set.messages[0].message, "d");
    EXPECT_FALSE(set.high_priority);
}

TEST(Select, TieBrokenBySourcePrecedence) {
    const RecommenderConfig cfg;
    std::vector<RiskItem> items{{RiskSource::meal, 1.0, "meal"},
                                {RiskSource::sleep, 1.0, "sleep"},
                                {RiskSource::distance, 1.0, "distance"}};
    const auto set = select(items, composite(items), cfg);
    ASSERT_EQ(set.messages.size(), 2u);
    EXPECT_EQ(set.messages[0].message, "sleep");
    EXPECT_EQ(set.messages[1].message, "distance");
}

TEST(Recommend, ThetaFilterDropsOnlySmallRisks) {
    RecommenderConfig cfg;
    auto f = ideal_features();
    f.sleep_hrs = 6.0;  // sleep deficit 1.0 -> risk 1.0
    const auto set = recommend(f, DeficitPair{1.0, 0.0}, cfg);
    ASSERT_EQ(set.messages.size(), 1u);
    EXPECT_EQ(set.messages[0].source, RiskSource::sleep);
}

TEST(Recommend, MonotoneInSleepDeficit) {
    const RecommenderConfig cfg;
    const auto f = ideal_features();
    double prev_risk = -1.0;
    for (double d = 0.6; d <= 5.0; d += 0.2) {
        const auto set = recommend(f, DeficitPair{d, 0.0}, cfg);
        ASSERT_FALSE(set.is_fallback);
        ASSERT_EQ(set.messages[0].source, RiskSource::sleep);
        ASSERT_GE(set.messages[0].risk, prev_risk);
        prev_risk = set.messages[0].risk;
    }
}

TEST(Recommend, AlwaysBetweenOneAndTopNMessages) {
    const RecommenderConfig cfg;
    Rng rng(31);
    for (int trial = 0; trial < 2000; ++trial) {
        FeatureVector f;
        f.distance_km = rng.uniform(0.0, 15.0);
        f.sleep_hrs = rng.uniform(0.0, 14.0);
        f.bmi = rng.uniform(14.0, 40.0);
        f.age = rng.uniform(17.0, 30.0);
        f.breakfast = rng.bernoulli(0.5) ? 1.0 : 0.0;
        f.meal = static_cast<double>(rng.uniform_index(3));
        f.gender = rng.bernoulli(0.5) ? 1.0 : 0.0;
        DeficitPair d{deficit(f.sleep_hrs, cfg.ranges.sleep_hrs),
                      deficit(f.distance_km, cfg.ranges.distance_km)};
        const auto set = recommend(f, d, cfg);
        ASSERT_GE(set.messages.size(), 1u);
        ASSERT_LE(set.messages.size(), static_cast<std::size_t>(cfg.top_n));
        for (std::size_t i = 1; i < set.messages.size(); ++i)
            ASSERT_GE(set.messages[i - 1].risk, set.messages[i].risk);
        for (const auto& m : set.messages) ASSERT_FALSE(m.message.empty());
    }
}

TEST(RecommenderConfig, ValidationCatchesBadValues) {
    RecommenderConfig cfg;
    cfg.top_n = 0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    RecommenderConfig cfg2;
    cfg2.w_sleep = -1.0;
    EXPECT_THROW(cfg2.validate(), std::invalid_argument);
}

}  // namespace
