#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "wellsim/metrics.hpp"
#include "wellsim/mlp.hpp"

namespace wellsim {

/// Machine-readable report. Full-precision values only; display rounding is
/// applied in render_report_table and never feeds back into computation.
inline nlohmann::json report_to_json(const MetricsReport& report) {
    nlohmann::json j;
    j["strategy"] = report.strategy;
    j["seed"] = report.seed;
    j["config_digest"] = report.config_digest;
    j["clients"] = nlohmann::json::array();
    for (const auto& c : report.clients) {
        j["clients"].push_back({{"client_id", c.client_id},
                                {"sign_accuracy_pct", c.sign_accuracy_pct},
                                {"mae", c.mae},
                                {"n_values", c.n_values}});
    }
    j["average"] = {{"sign_accuracy_pct", report.avg_sign_accuracy_pct},
                    {"mae", report.avg_mae}};
    j["rounds"] = nlohmann::json::array();
    for (const auto& r : report.rounds) {
        j["rounds"].push_back({{"round", r.round},
                               {"client_train_loss", r.client_train_loss},
                               {"aggregate_norm", r.aggregate_norm}});
    }
    return j;
}

inline std::string report_to_json_string(const MetricsReport& report) {
    return report_to_json(report).dump(2) + "\n";
}

/// Rebuilds a report from JSON. Averages are recomputed from the client rows,
/// so a hand-written fixture needs only `clients`.
inline MetricsReport report_from_json(const nlohmann::json& j) {
    if (!j.contains("clients") || !j["clients"].is_array() || j["clients"].empty())
        throw std::runtime_error("report JSON must contain a non-empty 'clients' array");
    std::vector<ClientMetrics> rows;
    for (const auto& c : j["clients"]) {
        ClientMetrics m;
        m.client_id = c.at("client_id").get<int>();
        m.sign_accuracy_pct = c.at("sign_accuracy_pct").get<double>();
        m.mae = c.at("mae").get<double>();
        m.n_values = c.value("n_values", 0);
        rows.push_back(m);
    }
    MetricsReport report = aggregate_report(std::move(rows));
    report.strategy = j.value("strategy", "");
    report.seed = j.value("seed", std::uint64_t{0});
    report.config_digest = j.value("config_digest", "");
    if (j.contains("rounds")) {
        for (const auto& r : j["rounds"]) {
            RoundTelemetry rt;
            rt.round = r.at("round").get<int>();
            rt.aggregate_norm = r.value("aggregate_norm", 0.0);
            if (r.contains("client_train_loss"))
                rt.client_train_loss = r["client_train_loss"].get<std::vector<double>>();
            report.rounds.push_back(std::move(rt));
        }
    }
    return report;
}

inline MetricsReport load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open report: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed report JSON in " + path + ": " + e.what());
    }
    return report_from_json(j);
}

/// Client-wise accuracy and MAE table with two-decimal display rounding.
inline std::string render_report_table(const MetricsReport& report) {
    std::ostringstream out;
    if (!report.strategy.empty()) {
        out << "Strategy: " << report.strategy << "  (seed " << report.seed;
        if (!report.config_digest.empty()) out << ", config " << report.config_digest;
        out << ")\n";
    }
    char line[96];
    std::snprintf(line, sizeof(line), "%-12s %14s %22s\n", "Client ID", "Accuracy (%)",
                  "Mean Absolute Error");
    out << line;
    for (const auto& c : report.clients) {
        const std::string label = "Client " + std::to_string(c.client_id);
        std::snprintf(line, sizeof(line), "%-12s %14.2f %22.2f\n", label.c_str(),
                      c.sign_accuracy_pct, c.mae);
        out << line;
    }
    std::snprintf(line, sizeof(line), "%-12s %14.2f %22.2f\n", "Average",
                  report.avg_sign_accuracy_pct, report.avg_mae);
    out << line;
    return out.str();
}

inline std::string history_to_csv(const History& history) {
    std::string out = "epoch,train_loss,val_loss,val_sign_acc_pct\n";
    char buf[96];
    for (const auto& e : history.epochs) {
        std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.4f\n", e.epoch, e.train_loss, e.val_loss,
                      e.val_sign_acc_pct);
        out += buf;
    }
    return out;
}

}  // namespace wellsim
