#include "wellsim/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "wellsim/report.hpp"
#include "wellsim/rng.hpp"

namespace {

using namespace wellsim;

TEST(SignAccuracy, AllSignsMatch) {
    const std::vector<double> y{1, 0, -1}, y_hat{2, 0, -3};
    EXPECT_DOUBLE_EQ(sign_accuracy(y, y_hat), 1.0);
}

TEST(SignAccuracy, HalfMatch) {
    const std::vector<double> y{1, -1}, y_hat{-2, -1};
    EXPECT_DOUBLE_EQ(sign_accuracy(y, y_hat), 0.5);
}

TEST(SignAccuracy, StrictZeroNeverMatchesNonzero) {
    const std::vector<double> y{0}, y_hat{0.1};
    EXPECT_DOUBLE_EQ(sign_accuracy(y, y_hat), 0.0);
}

TEST(SignAccuracy, ZeroBandAbsorbsSmallPredictions) {
    const std::vector<double> y{0, 0.5}, y_hat{0.1, 0.4};
    EXPECT_DOUBLE_EQ(sign_accuracy(y, y_hat, 0.15), 1.0);
}

TEST(SignAccuracy, LengthMismatchThrows) {
    EXPECT_THROW(sign_accuracy(std::vector<double>{1}, std::vector<double>{1, 2}),
                 std::invalid_argument);
    EXPECT_THROW(sign_accuracy(std::vector<double>{}, std::vector<double>{}),
                 std::invalid_argument);
}

TEST(Mae, PerfectPredictionZero) {
    const std::vector<double> y{1, 2, 3};
    EXPECT_DOUBLE_EQ(mean_absolute_error(y, y), 0.0);
}

TEST(Mae, HandArithmetic) {
    const std::vector<double> y{1, 2}, y_hat{2, 4};
    EXPECT_DOUBLE_EQ(mean_absolute_error(y, y_hat), 1.5);
}

TEST(Mae, PermutationInvariant) {
    const std::vector<double> y{1, 2, 3}, y_hat{4, 0, 5};
    const std::vector<double> yp{3, 1, 2}, y_hatp{5, 4, 0};
    EXPECT_DOUBLE_EQ(mean_absolute_error(y, y_hat), mean_absolute_error(yp, y_hatp));
}

TEST(Mae, MatchesBruteForceOnRandomFixtures) {
    Rng rng(77);
    for (int fixture = 0; fixture < 50; ++fixture) {
        const std::size_t n = 1 + rng.uniform_index(40);
        std::vector<double> y(n), y_hat(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.uniform(-5.0, 5.0);
            y_hat[i] = rng.uniform(-5.0, 5.0);
        }
        double want_abs = 0.0;
        int want_hits = 0;
        for (std::size_t i = 0; i < n; ++i) {
            want_abs += std::fabs(y[i] - y_hat[i]);
            const int sy = y[i] > 0 ? 1 : (y[i] < 0 ? -1 : 0);
            const int sp = y_hat[i] > 0 ? 1 : (y_hat[i] < 0 ? -1 : 0);
            if (sy == sp) ++want_hits;
        }
        ASSERT_LT(std::fabs(mean_absolute_error(y, y_hat) - want_abs / n), 1e-12);
        ASSERT_LT(std::fabs(sign_accuracy(y, y_hat) - static_cast<double>(want_hits) / n), 1e-12);
    }
}

std::vector<ClientMetrics> table_rows(const std::vector<double>& acc,
                                      const std::vector<double>& mae) {
    std::vector<ClientMetrics> rows;
    for (std::size_t i = 0; i < acc.size(); ++i)
        rows.push_back({static_cast<int>(i), acc[i], mae[i], 14});
    return rows;
}

// the published FedAvg table
const std::vector<double> kFedAvgAcc{81.42, 67.14, 34.63, 65.67, 25.18,
                                     74.28, 74.28, 38.57, 69.28, 76.67};
const std::vector<double> kFedAvgMae{0.82, 0.79, 0.81, 0.62, 0.90, 0.87, 0.41, 1.91, 1.32, 0.69};
// the published FedPer table
const std::vector<double> kFedPerAcc{63.57, 47.32, 31.33, 60.72, 25.71,
                                     25.91, 60.83, 46.67, 47.14, 54.16};
const std::vector<double> kFedPerMae{1.26, 2.48, 0.12, 1.52, 0.29, 1.46, 0.97, 1.14, 1.24, 1.47};

TEST(AggregateReport, FedAvgTableAverages) {
    const auto report = aggregate_report(table_rows(kFedAvgAcc, kFedAvgMae));
    EXPECT_NEAR(report.avg_sign_accuracy_pct, 60.71, 0.005);
    EXPECT_NEAR(report.avg_mae, 0.91, 0.005);
}

TEST(AggregateReport, FedPerTableAverages) {
    const auto report = aggregate_report(table_rows(kFedPerAcc, kFedPerMae));
    EXPECT_NEAR(report.avg_sign_accuracy_pct, 46.34, 0.005);
    EXPECT_NEAR(report.avg_mae, 1.19, 0.005);
}

TEST(AggregateReport, SingleClientIdentity) {
    const auto report = aggregate_report({{3, 52.5, 0.75, 14}});
    EXPECT_DOUBLE_EQ(report.avg_sign_accuracy_pct, 52.5);
    EXPECT_DOUBLE_EQ(report.avg_mae, 0.75);
}

TEST(AggregateReport, EmptyRowsRejected) {
    EXPECT_THROW(aggregate_report({}), std::invalid_argument);
}

TEST(RenderReport, TwoDecimalDisplayMatchesPublishedAverages) {
    auto report = aggregate_report(table_rows(kFedAvgAcc, kFedAvgMae));
    report.strategy = "fedavg";
    const auto table = render_report_table(report);
    EXPECT_NE(table.find("60.71"), std::string::npos);
    EXPECT_NE(table.find("0.91"), std::string::npos);
    EXPECT_NE(table.find("Client 0"), std::string::npos);

    auto report2 = aggregate_report(table_rows(kFedPerAcc, kFedPerMae));
    const auto table2 = render_report_table(report2);
    EXPECT_NE(table2.find("46.34"), std::string::npos);
    EXPECT_NE(table2.find("1.19"), std::string::npos);
}

TEST(ReportJson, RoundTripPreservesFullPrecision) {
    auto report = aggregate_report(table_rows(kFedAvgAcc, kFedAvgMae));
    report.strategy = "fedavg";
    report.seed = 42;
    report.config_digest = "abc123";
    RoundTelemetry rt;
    rt.round = 1;
    rt.client_train_loss = {0.5, 0.25};
    rt.aggregate_norm = 1.75;
    report.rounds.push_back(rt);

    const auto j = report_to_json(report);
    const auto back = report_from_json(j);
    EXPECT_EQ(back.strategy, "fedavg");
    EXPECT_EQ(back.seed, 42u);
    EXPECT_EQ(back.config_digest, "abc123");
    EXPECT_EQ(back.avg_sign_accuracy_pct, report.avg_sign_accuracy_pct);
    EXPECT_EQ(back.avg_mae, report.avg_mae);
    ASSERT_EQ(back.rounds.size(), 1u);
    EXPECT_EQ(back.rounds[0].client_train_loss, rt.client_train_loss);

    // averages are recomputed from rows, not trusted from the file
    auto j2 = j;
    j2["average"]["mae"] = 99.0;
    EXPECT_EQ(report_from_json(j2).avg_mae, report.avg_mae);
}

TEST(ReportJson, RejectsMissingClients) {
    EXPECT_THROW(report_from_json(nlohmann::json::object()), std::runtime_error);
}

}  // namespace
