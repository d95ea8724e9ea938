#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wellsim {

/// Signum with an optional zero band: |v| <= eps_zero counts as zero.
/// The strict default (eps_zero = 0) matches only exact zeros.
inline int sign_of(double v, double eps_zero = 0.0) {
    if (std::fabs(v) <= eps_zero) return 0;
    return v > 0.0 ? 1 : -1;
}

/// Fraction of entries whose predicted sign (+/0/-) matches the true sign.
inline double sign_accuracy(std::span<const double> y, std::span<const double> y_hat,
                            double eps_zero = 0.0) {
    if (y.size() != y_hat.size())
        throw std::invalid_argument("sign_accuracy: length mismatch");
    if (y.empty()) throw std::invalid_argument("sign_accuracy: empty input");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (sign_of(y[i], eps_zero) == sign_of(y_hat[i], eps_zero)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(y.size());
}

inline double mean_absolute_error(std::span<const double> y, std::span<const double> y_hat) {
    if (y.size() != y_hat.size())
        throw std::invalid_argument("mean_absolute_error: length mismatch");
    if (y.empty()) throw std::invalid_argument("mean_absolute_error: empty input");
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) acc += std::fabs(y[i] - y_hat[i]);
    return acc / static_cast<double>(y.size());
}

struct ClientMetrics {
    int client_id = 0;
    double sign_accuracy_pct = 0.0;
    double mae = 0.0;
    int n_values = 0;  // pooled predictions behind the two scores
};

struct RoundTelemetry {
    int round = 0;
    std::vector<double> client_train_loss;  // ordered by client id
    double aggregate_norm = 0.0;            // L2 norm of the aggregated parameters
};

/// Per-client scores plus their unweighted averages. Averages keep full
/// precision; rendering rounds to two decimals for display only.
struct MetricsReport {
    std::string strategy;
    std::uint64_t seed = 0;
    std::string config_digest;
    std::vector<ClientMetrics> clients;
    double avg_sign_accuracy_pct = 0.0;
    double avg_mae = 0.0;
    std::vector<RoundTelemetry> rounds;
};

/// Kahan compensated sum; keeps short-row averages at the exact decimal mean
/// so two-decimal display matches hand arithmetic.
inline double compensated_mean(std::span<const double> values) {
    double sum = 0.0, carry = 0.0;
    for (double v : values) {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum / static_cast<double>(values.size());
}

inline MetricsReport aggregate_report(std::vector<ClientMetrics> rows) {
    if (rows.empty()) throw std::invalid_argument("aggregate_report: no client rows");
    MetricsReport report;
    std::vector<double> acc, mae;
    acc.reserve(rows.size());
    mae.reserve(rows.size());
    for (const auto& row : rows) {
        acc.push_back(row.sign_accuracy_pct);
        mae.push_back(row.mae);
    }
    report.clients = std::move(rows);
    report.avg_sign_accuracy_pct = compensated_mean(acc);
    report.avg_mae = compensated_mean(mae);
    return report;
}

}  // namespace wellsim
