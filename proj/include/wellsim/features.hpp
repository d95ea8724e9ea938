#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "wellsim/synthgen.hpp"

namespace wellsim {

inline constexpr int kFeatureCount = 7;

/// Model input in canonical order [distance, sleep, bmi, age, breakfast,
/// meal, gender]. Steps are dropped (collinear with distance); height and
/// weight are folded into BMI; lunch and dinner are folded into a meal count.
struct FeatureVector {
    double distance_km = 0.0;
    double sleep_hrs = 0.0;
    double bmi = 0.0;
    double age = 0.0;
    double breakfast = 0.0;
    double meal = 0.0;  // lunch + dinner, in {0,1,2}
    double gender = 0.0;

    std::array<double, kFeatureCount> to_array() const {
        return {distance_km, sleep_hrs, bmi, age, breakfast, meal, gender};
    }
};

inline FeatureVector engineer(const DailyRecord& r) {
    if (r.height_cm <= 0.0)
        throw std::invalid_argument("engineer: record height must be positive");
    const double height_m = r.height_cm / 100.0;
    FeatureVector f;
    f.distance_km = r.distance_km;
    f.sleep_hrs = r.sleep_hrs;
    f.bmi = r.weight_kg / (height_m * height_m);
    f.age = static_cast<double>(r.age);
    f.breakfast = static_cast<double>(r.breakfast);
    f.meal = static_cast<double>(r.lunch + r.dinner);
    f.gender = static_cast<double>(r.gender);
    return f;
}

/// Per-feature standardization statistics, fitted once on the pre-training
/// corpus and shipped inside the model checkpoint.
struct ScalerStats {
    std::array<double, kFeatureCount> mean{};
    std::array<double, kFeatureCount> std{};
    std::size_t fitted_on = 0;
};

/// Population (1/n) standard deviation; near-zero variances are replaced by 1
/// so constant features map to 0.
inline ScalerStats fit_scaler(const std::vector<FeatureVector>& rows) {
    if (rows.empty()) throw std::invalid_argument("fit_scaler: empty feature set");
    ScalerStats stats;
    stats.fitted_on = rows.size();
    const double n = static_cast<double>(rows.size());
    for (const auto& row : rows) {
        const auto x = row.to_array();
        for (int i = 0; i < kFeatureCount; ++i) stats.mean[i] += x[i];
    }
    for (int i = 0; i < kFeatureCount; ++i) stats.mean[i] /= n;
    for (const auto& row : rows) {
        const auto x = row.to_array();
        for (int i = 0; i < kFeatureCount; ++i) {
            const double d = x[i] - stats.mean[i];
            stats.std[i] += d * d;
        }
    }
    for (int i = 0; i < kFeatureCount; ++i) {
        stats.std[i] = std::sqrt(stats.std[i] / n);
        if (stats.std[i] < 1e-8) stats.std[i] = 1.0;
    }
    return stats;
}

inline std::array<double, kFeatureCount> transform(const ScalerStats& stats,
                                                   const FeatureVector& x) {
    const auto raw = x.to_array();
    std::array<double, kFeatureCount> out{};
    for (int i = 0; i < kFeatureCount; ++i) out[i] = (raw[i] - stats.mean[i]) / stats.std[i];
    return out;
}

/// Signed distance from an ideal range: positive below the minimum, negative
/// above the maximum, zero inside.
struct DeficitPair {
    double d_sleep = 0.0;
    double d_distance = 0.0;

    std::array<double, 2> to_array() const { return {d_sleep, d_distance}; }
};

struct Range {
    double min = 0.0;
    double max = 0.0;

    void validate(const char* name) const {
        if (!(min < max))
            throw std::invalid_argument(std::string(name) + " range must have min < max");
    }
};

struct IdealRanges {
    Range sleep_hrs{7.0, 9.0};
    Range distance_km{5.0, 8.0};

    void validate() const {
        sleep_hrs.validate("ideal sleep");
        distance_km.validate("ideal distance");
    }
};

inline double deficit(double value, const Range& ideal) {
    if (value < ideal.min) return ideal.min - value;
    if (value > ideal.max) return -(value - ideal.max);
    return 0.0;
}

inline DeficitPair deficit_labels(const DailyRecord& r, const IdealRanges& ranges) {
    return DeficitPair{deficit(r.sleep_hrs, ranges.sleep_hrs),
                       deficit(r.distance_km, ranges.distance_km)};
}

}  // namespace wellsim
