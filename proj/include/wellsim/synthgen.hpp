#pragma once

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "wellsim/csv.hpp"
#include "wellsim/dates.hpp"
#include "wellsim/rng.hpp"

namespace wellsim {

/// Per-feature distribution parameters for the synthetic cohort. All values
/// are configuration; the defaults describe a plausible student cohort.
struct GeneratorConfig {
    // steps: negative binomial (variance = mean + mean^2 / dispersion)
    double steps_mean = 7000.0;
    double steps_dispersion = 4.0;
    // stride in km/step, drawn once per user, truncated positive;
    // distance is steps * stride so the steps<->distance correlation is near 1
    double stride_mean_km = 0.0007;
    double stride_sd_km = 0.00005;
    // sleep: truncated normal
    double sleep_mean_hrs = 7.0;
    double sleep_sd_hrs = 1.1;
    double sleep_min_hrs = 3.0;
    double sleep_max_hrs = 12.0;
    // meals: independent Bernoulli flags
    double p_breakfast = 0.75;
    double p_lunch = 0.90;
    double p_dinner = 0.90;
    // height: normal, conditioned on gender (1 = male, 0 = female)
    double height_mean_male_cm = 175.0;
    double height_sd_male_cm = 7.0;
    double height_mean_female_cm = 162.0;
    double height_sd_female_cm = 6.0;
    // weight: log-normal by median, conditioned on gender
    double weight_median_male_kg = 70.0;
    double weight_median_female_kg = 60.0;
    double weight_log_sd = 0.15;
    // age: truncated normal, rounded to whole years
    double age_mean = 21.0;
    double age_sd = 2.0;
    double age_min = 17.0;
    double age_max = 30.0;
    // gender: Bernoulli(p_male)
    double p_male = 0.5;
    // first calendar day of every user's series
    CivilDate start_date = CivilDate::from_ymd(2025, 1, 1);

    void validate() const {
        auto prob = [](double p, const char* name) {
            if (p < 0.0 || p > 1.0)
                throw std::invalid_argument(std::string("generator.") + name +
                                            " must be in [0,1]");
        };
        prob(p_breakfast, "p_breakfast");
        prob(p_lunch, "p_lunch");
        prob(p_dinner, "p_dinner");
        prob(p_male, "p_male");
        auto positive = [](double v, const char* name) {
            if (v <= 0.0)
                throw std::invalid_argument(std::string("generator.") + name +
                                            " must be positive");
        };
        positive(steps_mean, "steps_mean");
        positive(steps_dispersion, "steps_dispersion");
        positive(stride_mean_km, "stride_mean_km");
        positive(stride_sd_km, "stride_sd_km");
        positive(sleep_sd_hrs, "sleep_sd_hrs");
        positive(height_sd_male_cm, "height_sd_male_cm");
        positive(height_sd_female_cm, "height_sd_female_cm");
        positive(weight_median_male_kg, "weight_median_male_kg");
        positive(weight_median_female_kg, "weight_median_female_kg");
        positive(weight_log_sd, "weight_log_sd");
        positive(age_sd, "age_sd");
        if (!(sleep_min_hrs < sleep_max_hrs))
            throw std::invalid_argument("generator.sleep bounds must be ordered");
        if (sleep_min_hrs < 0.0 || sleep_max_hrs > 24.0)
            throw std::invalid_argument("generator.sleep bounds must lie in [0,24]");
        if (!(age_min < age_max))
            throw std::invalid_argument("generator.age bounds must be ordered");
    }
};

struct UserProfile {
    int user_id = 0;
    int age = 0;
    int gender = 0;  // 1 = male, 0 = female
    double height_cm = 0.0;
    double weight_kg = 0.0;
    double stride_km = 0.0;  // drawn once per user; couples steps to distance
};

/// One user-day of raw lifestyle measurements.
struct DailyRecord {
    CivilDate date;
    long steps = 0;
    double distance_km = 0.0;
    double sleep_hrs = 0.0;
    int breakfast = 0;
    int lunch = 0;
    int dinner = 0;
    int age = 0;
    double height_cm = 0.0;
    double weight_kg = 0.0;
    int gender = 0;
    int user_id = 0;
};

struct UserDays {
    UserProfile profile;
    std::vector<DailyRecord> days;
};

class Generator {
public:
    explicit Generator(GeneratorConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

    const GeneratorConfig& config() const { return cfg_; }

    /// Draw order is fixed (gender, age, height, weight, stride) and is part
    /// of the reproducibility contract.
    UserProfile sample_profile(Rng& rng, int user_id = 0) const {
        UserProfile p;
        p.user_id = user_id;
        p.gender = rng.bernoulli(cfg_.p_male) ? 1 : 0;
        p.age = static_cast<int>(
            std::llround(rng.truncated_normal(cfg_.age_mean, cfg_.age_sd, cfg_.age_min,
                                              cfg_.age_max)));
        const double h_mean = p.gender == 1 ? cfg_.height_mean_male_cm : cfg_.height_mean_female_cm;
        const double h_sd = p.gender == 1 ? cfg_.height_sd_male_cm : cfg_.height_sd_female_cm;
        do {
            p.height_cm = rng.normal(h_mean, h_sd);
        } while (p.height_cm <= 0.0);
        const double w_median =
            p.gender == 1 ? cfg_.weight_median_male_kg : cfg_.weight_median_female_kg;
        p.weight_kg = rng.lognormal_median(w_median, cfg_.weight_log_sd);
        do {
            p.stride_km = rng.normal(cfg_.stride_mean_km, cfg_.stride_sd_km);
        } while (p.stride_km <= 0.0);
        return p;
    }

    DailyRecord sample_day(const UserProfile& profile, CivilDate date, Rng& rng) const {
        DailyRecord r;
        r.date = date;
        r.steps = rng.negative_binomial(cfg_.steps_mean, cfg_.steps_dispersion);
        r.distance_km = static_cast<double>(r.steps) * profile.stride_km;
        r.sleep_hrs = rng.truncated_normal(cfg_.sleep_mean_hrs, cfg_.sleep_sd_hrs,
                                           cfg_.sleep_min_hrs, cfg_.sleep_max_hrs);
        r.breakfast = rng.bernoulli(cfg_.p_breakfast) ? 1 : 0;
        r.lunch = rng.bernoulli(cfg_.p_lunch) ? 1 : 0;
        r.dinner = rng.bernoulli(cfg_.p_dinner) ? 1 : 0;
        r.age = profile.age;
        r.height_cm = profile.height_cm;
        r.weight_kg = profile.weight_kg;
        r.gender = profile.gender;
        r.user_id = profile.user_id;
        return r;
    }

    /// Each user gets an independent child stream of `seed`, so the output is
    /// fully determined by (seed, config) and unaffected by iteration order.
    std::vector<UserDays> generate_dataset(int n_users, int days_per_user,
                                           std::uint64_t seed) const {
        if (n_users < 1) throw std::invalid_argument("generate_dataset: n_users must be >= 1");
        if (days_per_user < 1)
            throw std::invalid_argument("generate_dataset: days_per_user must be >= 1");
        std::vector<UserDays> out;
        out.reserve(n_users);
        for (int u = 0; u < n_users; ++u) {
            Rng rng(child_seed(seed, static_cast<std::uint64_t>(u)));
            UserDays ud;
            ud.profile = sample_profile(rng, u);
            ud.days.reserve(days_per_user);
            for (int d = 0; d < days_per_user; ++d) {
                ud.days.push_back(sample_day(ud.profile, cfg_.start_date.plus_days(d), rng));
            }
            out.push_back(std::move(ud));
        }
        return out;
    }

private:
    GeneratorConfig cfg_;
};

inline std::vector<DailyRecord> flatten(const std::vector<UserDays>& dataset) {
    std::vector<DailyRecord> out;
    for (const auto& ud : dataset)
        for (const auto& r : ud.days) out.push_back(r);
    return out;
}

inline constexpr const char* kDatasetCsvHeader =
    "date,steps,distance_km,sleep_hrs,breakfast,lunch,dinner,age,height_cm,weight_kg,gender,"
    "user_id";

inline std::string record_to_csv_row(const DailyRecord& r) {
    char buf[192];
    std::snprintf(buf, sizeof(buf), "%s,%ld,%.3f,%.2f,%d,%d,%d,%d,%.1f,%.1f,%d,%d",
                  r.date.to_iso().c_str(), r.steps, r.distance_km, r.sleep_hrs, r.breakfast,
                  r.lunch, r.dinner, r.age, r.height_cm, r.weight_kg, r.gender, r.user_id);
    return buf;
}

inline std::string dataset_to_csv(const std::vector<UserDays>& dataset) {
    std::string out = kDatasetCsvHeader;
    out += '\n';
    for (const auto& ud : dataset) {
        for (const auto& r : ud.days) {
            out += record_to_csv_row(r);
            out += '\n';
        }
    }
    return out;
}

inline std::vector<DailyRecord> records_from_csv(const CsvTable& table) {
    if (table.header != split_csv_line(kDatasetCsvHeader))
        throw std::runtime_error("dataset CSV header mismatch");
    std::vector<DailyRecord> out;
    out.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        DailyRecord r;
        r.date = CivilDate::parse_iso(row[0]);
        r.steps = std::stol(row[1]);
        r.distance_km = std::stod(row[2]);
        r.sleep_hrs = std::stod(row[3]);
        r.breakfast = std::stoi(row[4]);
        r.lunch = std::stoi(row[5]);
        r.dinner = std::stoi(row[6]);
        r.age = std::stoi(row[7]);
        r.height_cm = std::stod(row[8]);
        r.weight_kg = std::stod(row[9]);
        r.gender = std::stoi(row[10]);
        r.user_id = std::stoi(row[11]);
        out.push_back(r);
    }
    return out;
}

}  // namespace wellsim
