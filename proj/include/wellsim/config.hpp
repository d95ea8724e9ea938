#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wellsim/checkpoint.hpp"
#include "wellsim/fedsim.hpp"
#include "wellsim/mlp.hpp"
#include "wellsim/recommender.hpp"
#include "wellsim/sensorsim.hpp"
#include "wellsim/synthgen.hpp"

namespace wellsim {

/// Raised for malformed or invalid configuration; the CLI maps it to exit
/// code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MetricsConfig {
    double eps_zero = 0.0;  // strict sign matching by default
    bool per_output = false;

    void validate() const {
        if (eps_zero < 0.0) throw std::invalid_argument("metrics.eps_zero must be >= 0");
    }
};

/// Every experiment knob in one place. Defaults reproduce the study settings
/// (batch 32, lr 1e-3, 200 pre-training epochs, hidden [64,32,16,8,4],
/// ideal sleep [7,9] h, ideal distance [5,8] km, weights 1/0.8/1/1,
/// r_high 3, theta 0.5, top_n 2, 10 fine-tuning epochs, 10 clients,
/// step threshold 1.8, stride 0.5 m, sleep window 22-10).
struct ExperimentConfig {
    std::uint64_t seed = 42;
    int corpus_users = 1000;     // pre-training corpus framing
    int corpus_days = 10;
    GeneratorConfig generator;
    SensorConfig sensors;
    Architecture model;
    TrainConfig training;        // training.epochs = pre-training epochs
    FedConfig federated;
    RecommenderConfig recommender;
    std::string catalog_path;    // optional message catalog override file
    MetricsConfig metrics;

    void validate() const {
        try {
            if (corpus_users < 1) throw std::invalid_argument("generator.users must be >= 1");
            if (corpus_days < 1)
                throw std::invalid_argument("generator.days_per_user must be >= 1");
            generator.validate();
            sensors.validate();
            model.validate();
            training.validate();
            federated.validate();
            recommender.validate();
            metrics.validate();
            if (model.input != kFeatureCount)
                throw std::invalid_argument("model.input_width must match the feature count (7)");
            if (model.output != 2)
                throw std::invalid_argument("model.output_width must be 2 (sleep, distance)");
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
};

namespace configdetail {

inline std::string fmt_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // trim to the shortest representation that round-trips
    for (int prec = 1; prec < 17; ++prec) {
        char shorter[48];
        std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
        if (std::stod(shorter) == v) return shorter;
    }
    return buf;
}

inline double parse_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + s + "'");
    }
}

inline long parse_int(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("config key '" + key + "': expected an integer, got '" + s + "'");
    }
}

inline std::uint64_t parse_u64(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("config key '" + key + "': expected an unsigned integer, got '" + s +
                          "'");
    }
}

inline bool parse_bool(const std::string& s, const std::string& key) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ConfigError("config key '" + key + "': expected true/false, got '" + s + "'");
}

inline std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

struct KeyBinding {
    const char* section;
    const char* key;
    std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

inline const std::vector<KeyBinding>& schema() {
    static const std::vector<KeyBinding> bindings = [] {
        std::vector<KeyBinding> b;

        auto add = [&b](const char* section, const char* key, auto setter, auto getter) {
            b.push_back(KeyBinding{section, key, setter, getter});
        };

#define WELLSIM_BIND_DOUBLE(SECTION, KEY, FIELD)                                        \
    add(SECTION, KEY,                                                                   \
        [](ExperimentConfig& c, const std::string& v, const std::string& k) {           \
            c.FIELD = parse_double(v, k);                                               \
        },                                                                              \
        [](const ExperimentConfig& c) { return fmt_double(c.FIELD); })
#define WELLSIM_BIND_INT(SECTION, KEY, FIELD)                                           \
    add(SECTION, KEY,                                                                   \
        [](ExperimentConfig& c, const std::string& v, const std::string& k) {           \
            c.FIELD = static_cast<int>(parse_int(v, k));                                \
        },                                                                              \
        [](const ExperimentConfig& c) { return std::to_string(c.FIELD); })
#define WELLSIM_BIND_I64(SECTION, KEY, FIELD)                                           \
    add(SECTION, KEY,                                                                   \
        [](ExperimentConfig& c, const std::string& v, const std::string& k) {           \
            c.FIELD = parse_int(v, k);                                                  \
        },                                                                              \
        [](const ExperimentConfig& c) { return std::to_string(c.FIELD); })
#define WELLSIM_BIND_BOOL(SECTION, KEY, FIELD)                                          \
    add(SECTION, KEY,                                                                   \
        [](ExperimentConfig& c, const std::string& v, const std::string& k) {           \
            c.FIELD = parse_bool(v, k);                                                 \
        },                                                                              \
        [](const ExperimentConfig& c) { return std::string(c.FIELD ? "true" : "false"); })
#define WELLSIM_BIND_STRING(SECTION, KEY, FIELD)                                        \
    add(SECTION, KEY,                                                                   \
        [](ExperimentConfig& c, const std::string& v, const std::string&) {             \
            c.FIELD = v;                                                                \
        },                                                                              \
        [](const ExperimentConfig& c) { return c.FIELD; })

        add("", "seed",
            [](ExperimentConfig& c, const std::string& v, const std::string& k) {
                c.seed = parse_u64(v, k);
            },
            [](const ExperimentConfig& c) { return std::to_string(c.seed); });

        WELLSIM_BIND_INT("generator", "users", corpus_users);
        WELLSIM_BIND_INT("generator", "days_per_user", corpus_days);
        add("generator", "start_date",
            [](ExperimentConfig& c, const std::string& v, const std::string& k) {
                try {
                    c.generator.start_date = CivilDate::parse_iso(v);
                } catch (const std::invalid_argument&) {
                    throw ConfigError("config key '" + k + "': expected YYYY-MM-DD, got '" + v +
                                      "'");
                }
            },
            [](const ExperimentConfig& c) { return c.generator.start_date.to_iso(); });
        WELLSIM_BIND_DOUBLE("generator", "steps_mean", generator.steps_mean);
        WELLSIM_BIND_DOUBLE("generator", "steps_dispersion", generator.steps_dispersion);
        WELLSIM_BIND_DOUBLE("generator", "stride_mean_km", generator.stride_mean_km);
        WELLSIM_BIND_DOUBLE("generator", "stride_sd_km", generator.stride_sd_km);
        WELLSIM_BIND_DOUBLE("generator", "sleep_mean_hrs", generator.sleep_mean_hrs);
        WELLSIM_BIND_DOUBLE("generator", "sleep_sd_hrs", generator.sleep_sd_hrs);
        WELLSIM_BIND_DOUBLE("generator", "sleep_min_hrs", generator.sleep_min_hrs);
        WELLSIM_BIND_DOUBLE("generator", "sleep_max_hrs", generator.sleep_max_hrs);
        WELLSIM_BIND_DOUBLE("generator", "p_breakfast", generator.p_breakfast);
        WELLSIM_BIND_DOUBLE("generator", "p_lunch", generator.p_lunch);
        WELLSIM_BIND_DOUBLE("generator", "p_dinner", generator.p_dinner);
        WELLSIM_BIND_DOUBLE("generator", "height_mean_male_cm", generator.height_mean_male_cm);
        WELLSIM_BIND_DOUBLE("generator", "height_sd_male_cm", generator.height_sd_male_cm);
        WELLSIM_BIND_DOUBLE("generator", "height_mean_female_cm", generator.height_mean_female_cm);
        WELLSIM_BIND_DOUBLE("generator", "height_sd_female_cm", generator.height_sd_female_cm);
        WELLSIM_BIND_DOUBLE("generator", "weight_median_male_kg", generator.weight_median_male_kg);
        WELLSIM_BIND_DOUBLE("generator", "weight_median_female_kg",
                            generator.weight_median_female_kg);
        WELLSIM_BIND_DOUBLE("generator", "weight_log_sd", generator.weight_log_sd);
        WELLSIM_BIND_DOUBLE("generator", "age_mean", generator.age_mean);
        WELLSIM_BIND_DOUBLE("generator", "age_sd", generator.age_sd);
        WELLSIM_BIND_DOUBLE("generator", "age_min", generator.age_min);
        WELLSIM_BIND_DOUBLE("generator", "age_max", generator.age_max);
        WELLSIM_BIND_DOUBLE("generator", "p_male", generator.p_male);

        WELLSIM_BIND_DOUBLE("sensors", "step_threshold", sensors.step_threshold);
        WELLSIM_BIND_DOUBLE("sensors", "stride_m", sensors.stride_m);
        WELLSIM_BIND_I64("sensors", "debounce_ms", sensors.debounce_ms);
        WELLSIM_BIND_INT("sensors", "sleep_window_start_hour", sensors.sleep_window_start_hour);
        WELLSIM_BIND_INT("sensors", "sleep_window_end_hour", sensors.sleep_window_end_hour);
        WELLSIM_BIND_DOUBLE("sensors", "inactivity_threshold_min",
                            sensors.inactivity_threshold_min);
        WELLSIM_BIND_DOUBLE("sensors", "compensation_hrs", sensors.compensation_hrs);
        WELLSIM_BIND_INT("sensors", "tick_period_min", sensors.tick_period_min);

        WELLSIM_BIND_INT("model", "input_width", model.input);
        add("model", "hidden_widths",
            [](ExperimentConfig& c, const std::string& v, const std::string& k) {
                std::vector<int> widths;
                std::stringstream ss(v);
                std::string part;
                while (std::getline(ss, part, ',')) {
                    widths.push_back(static_cast<int>(parse_int(trim(part), k)));
                }
                if (widths.empty())
                    throw ConfigError("config key '" + k + "': expected a width list");
                c.model.hidden = std::move(widths);
            },
            [](const ExperimentConfig& c) {
                std::string out;
                for (std::size_t i = 0; i < c.model.hidden.size(); ++i) {
                    if (i) out += ',';
                    out += std::to_string(c.model.hidden[i]);
                }
                return out;
            });
        WELLSIM_BIND_INT("model", "output_width", model.output);
        add("model", "activation",
            [](ExperimentConfig& c, const std::string& v, const std::string& k) {
                if (v != "relu")
                    throw ConfigError("config key '" + k + "': unsupported activation '" + v +
                                      "'");
                c.model.activation = Activation::relu;
            },
            [](const ExperimentConfig&) { return std::string("relu"); });
        WELLSIM_BIND_INT("model", "split_index", model.split_index);

        WELLSIM_BIND_INT("training", "batch_size", training.batch_size);
        WELLSIM_BIND_DOUBLE("training", "learning_rate", training.adam.lr);
        WELLSIM_BIND_INT("training", "pretrain_epochs", training.epochs);
        WELLSIM_BIND_DOUBLE("training", "adam_beta1", training.adam.beta1);
        WELLSIM_BIND_DOUBLE("training", "adam_beta2", training.adam.beta2);
        WELLSIM_BIND_DOUBLE("training", "adam_epsilon", training.adam.eps);
        WELLSIM_BIND_INT("training", "early_stopping_patience", training.patience);
        WELLSIM_BIND_DOUBLE("training", "early_stopping_min_delta", training.min_delta);
        WELLSIM_BIND_DOUBLE("training", "validation_fraction", training.validation_fraction);
        WELLSIM_BIND_INT("training", "restarts", training.restarts);
        add("training", "loss",
            [](ExperimentConfig& c, const std::string& v, const std::string& k) {
                if (v == "mae")
                    c.training.loss = Loss::mae;
                else if (v == "mse")
                    c.training.loss = Loss::mse;
                else
                    throw ConfigError("config key '" + k + "': expected mae or mse, got '" + v +
                                      "'");
            },
            [](const ExperimentConfig& c) {
                return std::string(c.training.loss == Loss::mae ? "mae" : "mse");
            });

        add("federated", "strategy",
            [](ExperimentConfig& c, const std::string& v, const std::string& k) {
                if (v == "fedavg")
                    c.federated.strategy = Strategy::fedavg;
                else if (v == "fedper")
                    c.federated.strategy = Strategy::fedper;
                else
                    throw ConfigError("config key '" + k +
                                      "': expected fedavg or fedper, got '" + v + "'");
            },
            [](const ExperimentConfig& c) {
                return std::string(strategy_name(c.federated.strategy));
            });
        WELLSIM_BIND_INT("federated", "clients", federated.n_clients);
        WELLSIM_BIND_INT("federated", "rounds", federated.rounds);
        WELLSIM_BIND_INT("federated", "local_epochs", federated.local_epochs);
        WELLSIM_BIND_INT("federated", "finetune_epochs", federated.finetune_epochs);
        WELLSIM_BIND_DOUBLE("federated", "local_learning_rate", federated.local_lr);
        WELLSIM_BIND_DOUBLE("federated", "client_fraction", federated.client_fraction);
        WELLSIM_BIND_INT("federated", "train_days", federated.train_days);
        WELLSIM_BIND_INT("federated", "eval_days", federated.eval_days);
        WELLSIM_BIND_DOUBLE("federated", "heterogeneity", federated.heterogeneity);
        WELLSIM_BIND_DOUBLE("federated", "p_ideal", federated.p_ideal);

        WELLSIM_BIND_DOUBLE("recommender", "w_sleep", recommender.w_sleep);
        WELLSIM_BIND_DOUBLE("recommender", "w_distance", recommender.w_distance);
        WELLSIM_BIND_DOUBLE("recommender", "w_bmi", recommender.w_bmi);
        WELLSIM_BIND_DOUBLE("recommender", "w_meal", recommender.w_meal);
        WELLSIM_BIND_DOUBLE("recommender", "tau_sleep", recommender.tau_sleep);
        WELLSIM_BIND_DOUBLE("recommender", "tau_distance", recommender.tau_distance);
        WELLSIM_BIND_DOUBLE("recommender", "theta", recommender.theta);
        WELLSIM_BIND_DOUBLE("recommender", "r_high", recommender.r_high);
        WELLSIM_BIND_INT("recommender", "top_n", recommender.top_n);
        WELLSIM_BIND_DOUBLE("recommender", "ideal_sleep_min", recommender.ranges.sleep_hrs.min);
        WELLSIM_BIND_DOUBLE("recommender", "ideal_sleep_max", recommender.ranges.sleep_hrs.max);
        WELLSIM_BIND_DOUBLE("recommender", "ideal_distance_min",
                            recommender.ranges.distance_km.min);
        WELLSIM_BIND_DOUBLE("recommender", "ideal_distance_max",
                            recommender.ranges.distance_km.max);
        WELLSIM_BIND_DOUBLE("recommender", "bmi_min", recommender.bmi_range.min);
        WELLSIM_BIND_DOUBLE("recommender", "bmi_max", recommender.bmi_range.max);
        WELLSIM_BIND_DOUBLE("recommender", "bmi_risk_cap", recommender.bmi_risk_cap);
        WELLSIM_BIND_DOUBLE("recommender", "interaction_factor", recommender.interaction_factor);
        WELLSIM_BIND_STRING("recommender", "catalog", catalog_path);

        WELLSIM_BIND_DOUBLE("metrics", "eps_zero", metrics.eps_zero);
        WELLSIM_BIND_BOOL("metrics", "per_output", metrics.per_output);

#undef WELLSIM_BIND_DOUBLE
#undef WELLSIM_BIND_INT
#undef WELLSIM_BIND_I64
#undef WELLSIM_BIND_BOOL
#undef WELLSIM_BIND_STRING
        return b;
    }();
    return bindings;
}

}  // namespace configdetail

/// Parses the sectioned key=value config format. Every key has a default;
/// unknown sections or keys are rejected by name.
inline ExperimentConfig config_from_ini(const std::string& text) {
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    std::string section;
    int line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = configdetail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": malformed section header");
            section = line.substr(1, line.size() - 2);
            bool known = false;
            for (const auto& binding : configdetail::schema()) {
                if (section == binding.section) {
                    known = true;
                    break;
                }
            }
            if (!known) throw ConfigError("unknown config section '[" + section + "]'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = configdetail::trim(line.substr(0, eq));
        const std::string value = configdetail::trim(line.substr(eq + 1));
        const std::string qualified = section.empty() ? key : section + "." + key;
        bool handled = false;
        for (const auto& binding : configdetail::schema()) {
            if (section == binding.section && key == binding.key) {
                binding.set(cfg, value, qualified);
                handled = true;
                break;
            }
        }
        if (!handled) throw ConfigError("unknown config key '" + qualified + "'");
    }
    return cfg;
}

/// Canonical serialization: fixed section and key order, shortest
/// round-tripping number format. Also the input to the config digest.
inline std::string config_to_ini(const ExperimentConfig& cfg) {
    std::string out;
    std::string section = "\x01";  // force the first header comparison to differ
    for (const auto& binding : configdetail::schema()) {
        if (section != binding.section) {
            section = binding.section;
            if (!section.empty()) {
                if (!out.empty()) out += '\n';
                out += '[';
                out += section;
                out += "]\n";
            }
        }
        out += binding.key;
        out += " = ";
        out += binding.get(cfg);
        out += '\n';
    }
    return out;
}

inline std::string config_digest(const ExperimentConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(config_to_ini(cfg))));
    return buf;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    ExperimentConfig cfg = config_from_ini(ss.str());
    return cfg;
}

/// Message catalog file: `key = text` lines with the keys below. Missing keys
/// keep their defaults; unknown keys are rejected.
inline MessageCatalog load_catalog(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open message catalog: " + path);
    MessageCatalog catalog;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = configdetail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("catalog line " + std::to_string(line_no) +
                              ": expected key = message");
        const std::string key = configdetail::trim(line.substr(0, eq));
        const std::string value = configdetail::trim(line.substr(eq + 1));
        if (value.empty())
            throw ConfigError("catalog key '" + key + "': message must be non-empty");
        if (key == "sleep.below") catalog.sleep_below = value;
        else if (key == "sleep.above") catalog.sleep_above = value;
        else if (key == "distance.below") catalog.distance_below = value;
        else if (key == "distance.above") catalog.distance_above = value;
        else if (key == "bmi.below") catalog.bmi_below = value;
        else if (key == "bmi.above") catalog.bmi_above = value;
        else if (key == "meal") catalog.meal = value;
        else if (key == "interaction.sleep_breakfast") catalog.interaction_sleep_breakfast = value;
        else if (key == "interaction.distance_meal") catalog.interaction_distance_meal = value;
        else if (key == "fallback") catalog.fallback = value;
        else throw ConfigError("unknown catalog key '" + key + "'");
    }
    return catalog;
}

}  // namespace wellsim
