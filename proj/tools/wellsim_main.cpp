// wellsim: deterministic lifestyle-data simulator, on-device tracking replay,
// deficit-model training, federated fine-tuning experiments, and a rule-based
// recommendation engine.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wellsim/config.hpp"
#include "wellsim/csv.hpp"
#include "wellsim/features.hpp"
#include "wellsim/fedsim.hpp"
#include "wellsim/pipeline.hpp"
#include "wellsim/recommender.hpp"
#include "wellsim/report.hpp"
#include "wellsim/sensorsim.hpp"
#include "wellsim/synthgen.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOpts {
    std::string config_path;
    std::optional<std::uint64_t> seed;
};

wellsim::ExperimentConfig resolve_config(const CommonOpts& opts) {
    wellsim::ExperimentConfig cfg;
    if (!opts.config_path.empty()) cfg = wellsim::load_config(opts.config_path);
    if (opts.seed) cfg.seed = *opts.seed;
    if (!cfg.catalog_path.empty())
        cfg.recommender.catalog = wellsim::load_catalog(cfg.catalog_path);
    cfg.validate();
    return cfg;
}

wellsim::Segment parse_segment(const std::string& text) {
    // kind:start_min:duration_min[:cadence_spm]
    std::vector<std::string> parts;
    std::string part;
    std::stringstream ss(text);
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() < 3)
        throw wellsim::ConfigError("segment '" + text +
                                   "': expected kind:start_min:duration_min[:cadence]");
    wellsim::Segment seg;
    if (parts[0] == "walk")
        seg.kind = wellsim::SegmentKind::walk;
    else if (parts[0] == "idle")
        seg.kind = wellsim::SegmentKind::idle;
    else
        throw wellsim::ConfigError("segment '" + text + "': kind must be walk or idle");
    try {
        seg.start_min = std::stod(parts[1]);
        seg.duration_min = std::stod(parts[2]);
        if (parts.size() > 3) seg.cadence_spm = std::stod(parts[3]);
    } catch (const std::exception&) {
        throw wellsim::ConfigError("segment '" + text + "': malformed number");
    }
    if (seg.kind == wellsim::SegmentKind::walk && parts.size() < 4)
        throw wellsim::ConfigError("segment '" + text + "': walk segments need a cadence");
    return seg;
}

int run(int argc, char** argv) {
    CLI::App app{"Deterministic wellness-lifestyle simulator and federated-learning test bench"};
    app.require_subcommand(1);

    CommonOpts common;

    // --- generate ---
    auto* generate = app.add_subcommand("generate", "Generate a synthetic lifestyle dataset CSV");
    std::string gen_out;
    std::optional<int> gen_users, gen_days;
    generate->add_option("--config", common.config_path, "Experiment config file");
    generate->add_option("--seed", common.seed, "Master seed override");
    generate->add_option("--users", gen_users, "Number of users");
    generate->add_option("--days", gen_days, "Days per user");
    generate->add_option("--out", gen_out, "Output CSV path")->required();
    generate->callback([&] {
        auto cfg = resolve_config(common);
        if (gen_users) cfg.corpus_users = *gen_users;
        if (gen_days) cfg.corpus_days = *gen_days;
        cfg.validate();
        wellsim::Generator gen(cfg.generator);
        const auto dataset = gen.generate_dataset(
            cfg.corpus_users, cfg.corpus_days,
            wellsim::child_seed(cfg.seed, wellsim::pipeseed::kCorpus));
        wellsim::write_text_file(gen_out, wellsim::dataset_to_csv(dataset));
        std::cout << "wrote " << cfg.corpus_users * cfg.corpus_days << " records to " << gen_out
                  << "\n";
    });

    // --- trace ---
    auto* trace = app.add_subcommand("trace", "Synthesize or replay accelerometer traces");
    trace->require_subcommand(1);

    auto* synth = trace->add_subcommand("synth", "Build a trace from a walk/idle schedule");
    std::vector<std::string> synth_segments;
    double synth_start_hour = 8.0;
    std::string synth_out;
    synth->add_option("--config", common.config_path, "Experiment config file");
    synth->add_option("--seed", common.seed, "Master seed override");
    synth->add_option("--segment", synth_segments,
                      "Segment kind:start_min:duration_min[:cadence_spm] (repeatable)")
        ->required();
    synth->add_option("--start-hour", synth_start_hour, "Trace start, hours since midnight");
    synth->add_option("--out", synth_out, "Output trace CSV")->required();
    synth->callback([&] {
        const auto cfg = resolve_config(common);
        wellsim::TraceSchedule schedule;
        schedule.base_ms = static_cast<std::int64_t>(synth_start_hour * 3600.0 * 1000.0);
        for (const auto& s : synth_segments) schedule.segments.push_back(parse_segment(s));
        wellsim::Rng rng(wellsim::child_seed(cfg.seed, 31));
        const auto samples = wellsim::synth_trace(schedule, cfg.sensors, rng);
        wellsim::write_text_file(synth_out, wellsim::trace_to_csv(samples));
        std::cout << "wrote " << samples.size() << " samples to " << synth_out << "\n";
    });

    auto* replay = trace->add_subcommand("replay", "Replay a trace into a day summary");
    std::string replay_in, replay_out, replay_date = "2025-01-01";
    int replay_breakfast = 0, replay_lunch = 0, replay_dinner = 0;
    int replay_age = 0, replay_gender = 0, replay_user = 0;
    double replay_height = 0.0, replay_weight = 0.0;
    replay->add_option("--config", common.config_path, "Experiment config file");
    replay->add_option("--in", replay_in, "Trace CSV to replay")->required();
    replay->add_option("--out", replay_out, "Write the summary as a dataset-schema CSV row");
    replay->add_option("--date", replay_date, "Record date for --out");
    replay->add_option("--breakfast", replay_breakfast, "Meal flag for --out");
    replay->add_option("--lunch", replay_lunch, "Meal flag for --out");
    replay->add_option("--dinner", replay_dinner, "Meal flag for --out");
    replay->add_option("--age", replay_age, "Profile field for --out");
    replay->add_option("--height-cm", replay_height, "Profile field for --out");
    replay->add_option("--weight-kg", replay_weight, "Profile field for --out");
    replay->add_option("--gender", replay_gender, "Profile field for --out");
    replay->add_option("--user-id", replay_user, "Profile field for --out");
    replay->callback([&] {
        const auto cfg = resolve_config(common);
        const auto samples = wellsim::trace_from_csv(wellsim::read_csv(replay_in));
        const auto summary = wellsim::process_trace(samples, cfg.sensors);
        char line[128];
        std::snprintf(line, sizeof(line), "steps=%ld distance_km=%.3f sleep_hrs=%.3f\n",
                      summary.steps, summary.distance_km, summary.sleep_hrs);
        std::cout << line;
        if (!replay_out.empty()) {
            wellsim::DailyRecord r;
            r.date = wellsim::CivilDate::parse_iso(replay_date);
            r.steps = summary.steps;
            r.distance_km = summary.distance_km;
            r.sleep_hrs = summary.sleep_hrs;
            r.breakfast = replay_breakfast;
            r.lunch = replay_lunch;
            r.dinner = replay_dinner;
            r.age = replay_age;
            r.height_cm = replay_height;
            r.weight_kg = replay_weight;
            r.gender = replay_gender;
            r.user_id = replay_user;
            wellsim::write_text_file(replay_out, std::string(wellsim::kDatasetCsvHeader) + "\n" +
                                                     wellsim::record_to_csv_row(r) + "\n");
        }
    });

    // --- pretrain ---
    auto* pretrain_cmd =
        app.add_subcommand("pretrain", "Train the deficit model on a synthetic corpus");
    std::string pretrain_data, pretrain_out, pretrain_history;
    pretrain_cmd->add_option("--config", common.config_path, "Experiment config file");
    pretrain_cmd->add_option("--seed", common.seed, "Master seed override");
    pretrain_cmd->add_option("--data", pretrain_data,
                             "Train on an existing dataset CSV instead of generating one");
    pretrain_cmd->add_option("--out", pretrain_out, "Checkpoint output path")->required();
    pretrain_cmd->add_option("--history", pretrain_history, "Write per-epoch history CSV here");
    pretrain_cmd->callback([&] {
        const auto cfg = resolve_config(common);
        wellsim::PretrainResult result;
        if (pretrain_data.empty()) {
            result = wellsim::pretrain(cfg);
        } else {
            const auto records = wellsim::records_from_csv(wellsim::read_csv(pretrain_data));
            result = wellsim::pretrain_on(records, cfg);
        }
        wellsim::save_checkpoint(result.checkpoint, pretrain_out);
        if (!pretrain_history.empty())
            wellsim::write_text_file(pretrain_history, wellsim::history_to_csv(result.history));
        const auto& last = result.history.epochs.back();
        std::cout << "trained " << result.history.epochs.size() << " epochs (best epoch "
                  << result.history.best_epoch << ")\n"
                  << "holdout MAE " << result.holdout_mae << ", final val sign accuracy "
                  << last.val_sign_acc_pct << "%\n"
                  << "checkpoint written to " << pretrain_out << "\n";
    });

    // --- fed ---
    auto* fed = app.add_subcommand("fed", "Run a federated fine-tuning experiment");
    std::string fed_ckpt, fed_out, fed_strategy;
    bool fed_quiet = false;
    fed->add_option("--config", common.config_path, "Experiment config file");
    fed->add_option("--seed", common.seed, "Master seed override");
    fed->add_option("--checkpoint", fed_ckpt, "Pre-trained checkpoint")->required();
    fed->add_option("--strategy", fed_strategy, "fedavg or fedper (overrides config)");
    fed->add_option("--out", fed_out, "Write the machine-readable report JSON here");
    fed->add_flag("--quiet", fed_quiet, "Suppress the table on stdout");
    fed->callback([&] {
        auto cfg = resolve_config(common);
        if (!fed_strategy.empty()) {
            if (fed_strategy == "fedavg")
                cfg.federated.strategy = wellsim::Strategy::fedavg;
            else if (fed_strategy == "fedper")
                cfg.federated.strategy = wellsim::Strategy::fedper;
            else
                throw wellsim::ConfigError("--strategy must be fedavg or fedper");
        }
        cfg.validate();
        auto ckpt = wellsim::load_checkpoint(fed_ckpt, cfg.model);
        const auto report =
            wellsim::run_experiment(wellsim::experiment_inputs(cfg, std::move(ckpt)));
        if (!fed_out.empty())
            wellsim::write_text_file(fed_out, wellsim::report_to_json_string(report));
        if (!fed_quiet) std::cout << wellsim::render_report_table(report);
    });

    // --- recommend ---
    auto* rec = app.add_subcommand("recommend", "Recommendations for a single day record");
    double rec_sleep = 0.0, rec_distance = 0.0, rec_height = 0.0, rec_weight = 0.0;
    int rec_age = 0, rec_gender = 0, rec_breakfast = 0, rec_lunch = 0, rec_dinner = 0;
    std::string rec_ckpt;
    bool rec_json = false;
    rec->add_option("--config", common.config_path, "Experiment config file");
    rec->add_option("--sleep", rec_sleep, "Sleep hours")->required();
    rec->add_option("--distance", rec_distance, "Distance in km")->required();
    rec->add_option("--height-cm", rec_height, "Height in cm")->required();
    rec->add_option("--weight-kg", rec_weight, "Weight in kg")->required();
    rec->add_option("--age", rec_age, "Age in years")->required();
    rec->add_option("--gender", rec_gender, "Gender flag (0 or 1)");
    rec->add_option("--breakfast", rec_breakfast, "Breakfast taken (0 or 1)");
    rec->add_option("--lunch", rec_lunch, "Lunch taken (0 or 1)");
    rec->add_option("--dinner", rec_dinner, "Dinner taken (0 or 1)");
    rec->add_option("--checkpoint", rec_ckpt,
                    "Predict deficits with this model instead of computing them from the ranges");
    rec->add_flag("--json", rec_json, "Emit JSON instead of text");
    rec->callback([&] {
        const auto cfg = resolve_config(common);
        wellsim::DailyRecord r;
        r.sleep_hrs = rec_sleep;
        r.distance_km = rec_distance;
        r.height_cm = rec_height;
        r.weight_kg = rec_weight;
        r.age = rec_age;
        r.gender = rec_gender;
        r.breakfast = rec_breakfast;
        r.lunch = rec_lunch;
        r.dinner = rec_dinner;
        const auto features = wellsim::engineer(r);

        wellsim::DeficitPair deficits;
        if (rec_ckpt.empty()) {
            deficits = wellsim::deficit_labels(r, cfg.recommender.ranges);
        } else {
            const auto ckpt = wellsim::load_checkpoint(rec_ckpt, cfg.model);
            const auto x = wellsim::transform(ckpt.scaler, features);
            const auto d = wellsim::forward(ckpt.params, x);
            deficits = wellsim::DeficitPair{d[0], d[1]};
        }
        const auto set = wellsim::recommend(features, deficits, cfg.recommender);

        if (rec_json) {
            nlohmann::json j;
            j["deficits"] = {{"sleep", deficits.d_sleep}, {"distance", deficits.d_distance}};
            j["composite_risk"] = set.composite_risk;
            j["high_priority"] = set.high_priority;
            j["fallback"] = set.is_fallback;
            j["messages"] = nlohmann::json::array();
            for (const auto& m : set.messages)
                j["messages"].push_back({{"source", wellsim::risk_source_name(m.source)},
                                         {"risk", m.risk},
                                         {"message", m.message}});
            std::cout << j.dump(2) << "\n";
        } else {
            char line[96];
            std::snprintf(line, sizeof(line),
                          "deficits: sleep=%+.2f h, distance=%+.2f km (composite risk %.2f)\n",
                          deficits.d_sleep, deficits.d_distance, set.composite_risk);
            std::cout << line;
            if (set.high_priority) std::cout << "[HIGH PRIORITY]\n";
            for (const auto& m : set.messages) {
                if (set.is_fallback)
                    std::cout << "- " << m.message << "\n";
                else {
                    std::snprintf(line, sizeof(line), "- (%.2f) %s\n", m.risk,
                                  m.message.c_str());
                    std::cout << line;
                }
            }
        }
    });

    // --- report ---
    auto* report_cmd = app.add_subcommand("report", "Render a saved experiment report");
    std::string report_in, report_json_out;
    report_cmd->add_option("--in", report_in, "Report JSON file")->required();
    report_cmd->add_option("--out", report_json_out, "Rewrite the normalized report JSON here");
    report_cmd->callback([&] {
        const auto report = wellsim::load_report(report_in);
        std::cout << wellsim::render_report_table(report);
        if (!report_json_out.empty())
            wellsim::write_text_file(report_json_out, wellsim::report_to_json_string(report));
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const wellsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
