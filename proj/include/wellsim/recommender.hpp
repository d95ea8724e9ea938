#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "wellsim/features.hpp"

namespace wellsim {

/// Risk sources in tie-break precedence order (earlier wins at equal risk).
enum class RiskSource {
    sleep,
    distance,
    bmi,
    meal,
    interaction_sleep_breakfast,
    interaction_distance_meal,
};

inline const char* risk_source_name(RiskSource s) {
    switch (s) {
        case RiskSource::sleep: return "sleep";
        case RiskSource::distance: return "distance";
        case RiskSource::bmi: return "bmi";
        case RiskSource::meal: return "meal";
        case RiskSource::interaction_sleep_breakfast: return "interaction:sleep_breakfast";
        case RiskSource::interaction_distance_meal: return "interaction:distance_meal";
    }
    return "?";
}

struct RiskItem {
    RiskSource source = RiskSource::sleep;
    double risk = 0.0;
    std::string message;
};

/// Message texts keyed by (source, direction). The fallback string is shown
/// verbatim when nothing survives filtering.
struct MessageCatalog {
    std::string sleep_below = "Try to get more sleep";
    std::string sleep_above = "You may be oversleeping; aim for a steadier schedule";
    std::string distance_below = "Try to walk more during the day";
    std::string distance_above = "You are covering a lot of distance; remember to rest";
    std::string bmi_below = "Your BMI is below the healthy range; consider a nutrition check";
    std::string bmi_above = "Your BMI is above the healthy range; consider more activity";
    std::string meal = "Skipped meals drain your energy; try not to miss them";
    std::string interaction_sleep_breakfast =
        "Short sleep plus a skipped breakfast compounds fatigue";
    std::string interaction_distance_meal =
        "Low activity with missed meals can lower your energy";
    std::string fallback = "Your lifestyle parameters are close to ideal. Keep it up!";
};

struct RecommenderConfig {
    double w_sleep = 1.0;
    double w_distance = 0.8;
    double w_bmi = 1.0;
    double w_meal = 1.0;
    double tau_sleep = 0.5;     // deficit magnitude below this is ignored
    double tau_distance = 0.5;
    double theta = 0.5;         // per-item filter threshold
    double r_high = 3.0;        // composite risk above this is high priority
    int top_n = 2;
    IdealRanges ranges;
    Range bmi_range{18.5, 24.9};
    double bmi_risk_cap = 3.0;  // keeps a single rule below r_high on its own
    double interaction_factor = 0.5;
    MessageCatalog catalog;

    void validate() const {
        if (w_sleep < 0 || w_distance < 0 || w_bmi < 0 || w_meal < 0)
            throw std::invalid_argument("recommender weights must be >= 0");
        if (tau_sleep < 0 || tau_distance < 0)
            throw std::invalid_argument("recommender.tau thresholds must be >= 0");
        if (theta < 0) throw std::invalid_argument("recommender.theta must be >= 0");
        if (top_n < 1) throw std::invalid_argument("recommender.top_n must be >= 1");
        if (bmi_risk_cap <= 0) throw std::invalid_argument("recommender.bmi_risk_cap must be > 0");
        ranges.validate();
        bmi_range.validate("bmi");
    }
};

/// Per-parameter risks r_j = w_j * |d_j| for deficits that clear their
/// thresholds, paired with the direction-appropriate message.
inline std::vector<RiskItem> param_risks(const DeficitPair& d, const RecommenderConfig& cfg) {
    std::vector<RiskItem> items;
    if (std::fabs(d.d_sleep) > cfg.tau_sleep) {
        items.push_back({RiskSource::sleep, cfg.w_sleep * std::fabs(d.d_sleep),
                         d.d_sleep > 0 ? cfg.catalog.sleep_below : cfg.catalog.sleep_above});
    }
    if (std::fabs(d.d_distance) > cfg.tau_distance) {
        items.push_back({RiskSource::distance, cfg.w_distance * std::fabs(d.d_distance),
                         d.d_distance > 0 ? cfg.catalog.distance_below
                                          : cfg.catalog.distance_above});
    }
    return items;
}

/// Rule-based risks: meal skipping (breakfast weighted full, the aggregated
/// meal count half), out-of-range BMI (distance to the nearest bound, capped),
/// and two deficit/behavior interactions.
inline std::vector<RiskItem> rule_risks(const FeatureVector& f, const DeficitPair& d,
                                        const RecommenderConfig& cfg) {
    std::vector<RiskItem> items;

    const double meal_risk =
        cfg.w_meal * (1.0 - f.breakfast) + cfg.w_meal * (2.0 - f.meal) / 2.0;
    if (meal_risk > 0.0) items.push_back({RiskSource::meal, meal_risk, cfg.catalog.meal});

    if (f.bmi < cfg.bmi_range.min || f.bmi > cfg.bmi_range.max) {
        const bool below = f.bmi < cfg.bmi_range.min;
        const double gap = below ? cfg.bmi_range.min - f.bmi : f.bmi - cfg.bmi_range.max;
        items.push_back({RiskSource::bmi, cfg.w_bmi * std::min(gap, cfg.bmi_risk_cap),
                         below ? cfg.catalog.bmi_below : cfg.catalog.bmi_above});
    }

    if (std::fabs(d.d_sleep) > cfg.tau_sleep && f.breakfast == 0.0) {
        items.push_back({RiskSource::interaction_sleep_breakfast,
                         cfg.interaction_factor * cfg.w_sleep,
                         cfg.catalog.interaction_sleep_breakfast});
    }
    if (std::fabs(d.d_distance) > cfg.tau_distance && f.meal < 2.0) {
        items.push_back({RiskSource::interaction_distance_meal,
                         cfg.interaction_factor * cfg.w_distance,
                         cfg.catalog.interaction_distance_meal});
    }
    return items;
}

/// Composite risk R: plain sum over all items, taken before theta-filtering.
inline double composite(const std::vector<RiskItem>& items) {
    double r = 0.0;
    for (const auto& item : items) r += item.risk;
    return r;
}

struct RecommendationSet {
    std::vector<RiskItem> messages;  // descending risk, at most top_n
    bool high_priority = false;
    double composite_risk = 0.0;
    bool is_fallback = false;
};

/// Filtering and selection: drop items below theta, sort by descending risk
/// (ties by source precedence), keep the top N, flag high priority when the
/// composite risk exceeds r_high. An empty survivor set yields the fallback
/// message and never carries the priority flag.
inline RecommendationSet select(std::vector<RiskItem> items, double composite_risk,
                                const RecommenderConfig& cfg) {
    RecommendationSet out;
    out.composite_risk = composite_risk;
    std::erase_if(items, [&](const RiskItem& it) { return it.risk < cfg.theta; });
    if (items.empty()) {
        out.messages.push_back({RiskSource::sleep, 0.0, cfg.catalog.fallback});
        out.is_fallback = true;
        return out;
    }
    std::sort(items.begin(), items.end(), [](const RiskItem& a, const RiskItem& b) {
        if (a.risk != b.risk) return a.risk > b.risk;
        return static_cast<int>(a.source) < static_cast<int>(b.source);
    });
    if (static_cast<int>(items.size()) > cfg.top_n) items.resize(cfg.top_n);
    out.messages = std::move(items);
    out.high_priority = composite_risk > cfg.r_high;
    return out;
}

/// Full pipeline over one engineered record and its (predicted or true)
/// deficits.
inline RecommendationSet recommend(const FeatureVector& f, const DeficitPair& d,
                                   const RecommenderConfig& cfg) {
    cfg.validate();
    auto items = param_risks(d, cfg);
    auto rules = rule_risks(f, d, cfg);
    items.insert(items.end(), rules.begin(), rules.end());
    return select(items, composite(items), cfg);
}

}  // namespace wellsim
