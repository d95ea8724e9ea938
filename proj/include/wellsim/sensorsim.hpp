#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "wellsim/csv.hpp"
#include "wellsim/rng.hpp"

namespace wellsim {

/// One accelerometer reading. Timestamps are milliseconds since an epoch that
/// is aligned to local midnight, so hour-of-day is t_ms modulo 24 h.
struct AccelSample {
    std::int64_t t_ms = 0;
    double x = 0.0, y = 0.0, z = 0.0;

    double magnitude() const { return std::sqrt(x * x + y * y + z * z); }
};

struct SensorConfig {
    double step_threshold = 1.8;        // minimum |magnitude delta| for a step
    double stride_m = 0.5;              // distance credited per step
    std::int64_t debounce_ms = 300;     // minimum interval between steps
    int sleep_window_start_hour = 22;   // inclusive
    int sleep_window_end_hour = 10;     // exclusive
    double inactivity_threshold_min = 120.0;
    double compensation_hrs = 2.0;      // credited when sleep ends before the window does
    int tick_period_min = 1;

    void validate() const {
        if (step_threshold <= 0.0)
            throw std::invalid_argument("sensors.step_threshold must be positive");
        if (stride_m <= 0.0) throw std::invalid_argument("sensors.stride_m must be positive");
        if (debounce_ms <= 0) throw std::invalid_argument("sensors.debounce_ms must be positive");
        if (sleep_window_start_hour < 0 || sleep_window_start_hour > 23 ||
            sleep_window_end_hour < 0 || sleep_window_end_hour > 23 ||
            sleep_window_start_hour == sleep_window_end_hour)
            throw std::invalid_argument("sensors.sleep window hours invalid");
        if (inactivity_threshold_min <= 0.0)
            throw std::invalid_argument("sensors.inactivity_threshold_min must be positive");
        if (compensation_hrs < 0.0)
            throw std::invalid_argument("sensors.compensation_hrs must be >= 0");
        if (tick_period_min < 1)
            throw std::invalid_argument("sensors.tick_period_min must be >= 1");
    }

    bool in_sleep_window(int hour) const {
        if (sleep_window_start_hour > sleep_window_end_hour)
            return hour >= sleep_window_start_hour || hour < sleep_window_end_hour;
        return hour >= sleep_window_start_hour && hour < sleep_window_end_hour;
    }
};

inline int hour_of(std::int64_t t_ms) {
    const std::int64_t h = t_ms / 3600000;
    return static_cast<int>(((h % 24) + 24) % 24);
}

/// Streaming state shared by the step counter and the sleep tracker.
/// last_step_time starts at 0 (epoch), so with realistic timestamps the first
/// qualifying reading always passes the debounce check.
struct TrackerState {
    double last_magnitude = 0.0;
    std::int64_t last_step_time = 0;
    long step_count = 0;
    double distance_m = 0.0;
    std::int64_t last_activity_time = 0;
    bool is_sleeping = false;
    double sleep_hours = 0.0;
    std::int64_t last_sample_time = std::numeric_limits<std::int64_t>::min();
};

/// Step counter with debounce. A step is recorded when the magnitude change
/// exceeds the threshold and the debounce interval has elapsed; the last
/// magnitude is updated on every reading.
inline void step_update(TrackerState& state, const AccelSample& sample,
                        const SensorConfig& cfg) {
    if (sample.t_ms < state.last_sample_time)
        throw std::invalid_argument("step_update: sample timestamps must be non-decreasing");
    state.last_sample_time = sample.t_ms;
    const double magnitude = sample.magnitude();
    if (std::fabs(magnitude - state.last_magnitude) > cfg.step_threshold &&
        (sample.t_ms - state.last_step_time) > cfg.debounce_ms) {
        state.last_step_time = sample.t_ms;
        state.step_count += 1;
        state.distance_m = static_cast<double>(state.step_count) * cfg.stride_m;
        state.last_activity_time = sample.t_ms;
    }
    state.last_magnitude = magnitude;
}

/// Sleep tracking tick. Inside the sleep window, sustained inactivity accrues
/// sleep one tick at a time; when movement resumes before the window's
/// morning end, the compensation credit is added once and the sleeping flag
/// clears.
inline void sleep_tick(TrackerState& state, std::int64_t now_ms, const SensorConfig& cfg) {
    const int hour = hour_of(now_ms);
    if (!cfg.in_sleep_window(hour)) return;
    const double inactive_min =
        static_cast<double>(now_ms - state.last_activity_time) / 60000.0;
    if (inactive_min > cfg.inactivity_threshold_min) {
        state.is_sleeping = true;
        state.sleep_hours += static_cast<double>(cfg.tick_period_min) / 60.0;
    } else if (state.is_sleeping && hour >= 0 && hour < cfg.sleep_window_end_hour) {
        state.sleep_hours += cfg.compensation_hrs;
        state.is_sleeping = false;
    }
}

struct DaySummary {
    long steps = 0;
    double distance_km = 0.0;
    double sleep_hrs = 0.0;
};

/// Incremental replay: feeds accelerometer samples through the step counter
/// while firing sleep ticks on a simulated clock interleaved by timestamp.
/// Ticks at the same instant as a sample run after it, so a tick always sees
/// the freshest activity time. Accumulated sleep resets when the clock enters
/// the sleep window (once per day at the window start).
class TraceReplayer {
public:
    TraceReplayer(const SensorConfig& cfg, std::int64_t start_ms) : cfg_(cfg) {
        cfg_.validate();
        state_.last_activity_time = start_ms;  // inactivity is measured from replay start
        state_.last_sample_time = start_ms;
        const std::int64_t tick_ms = tick_period_ms();
        next_tick_ms_ = ((start_ms + tick_ms - 1) / tick_ms) * tick_ms;
    }

    void feed(const AccelSample& sample) {
        if (sample.t_ms < state_.last_sample_time)
            throw std::invalid_argument("trace not time-ordered");
        while (next_tick_ms_ < sample.t_ms) run_tick();
        step_update(state_, sample, cfg_);
        while (next_tick_ms_ <= sample.t_ms) run_tick();
    }

    const TrackerState& state() const { return state_; }

    DaySummary summary() const {
        return DaySummary{state_.step_count, state_.distance_m / 1000.0, state_.sleep_hours};
    }

private:
    std::int64_t tick_period_ms() const {
        return static_cast<std::int64_t>(cfg_.tick_period_min) * 60000;
    }

    void run_tick() {
        const bool in_window = cfg_.in_sleep_window(hour_of(next_tick_ms_));
        if (in_window && !was_in_window_) state_.sleep_hours = 0.0;  // daily reset
        was_in_window_ = in_window;
        sleep_tick(state_, next_tick_ms_, cfg_);
        next_tick_ms_ += tick_period_ms();
    }

    SensorConfig cfg_;
    TrackerState state_;
    std::int64_t next_tick_ms_ = 0;
    bool was_in_window_ = false;
};

inline constexpr std::int64_t kMaxTraceSpanMs = 36LL * 3600 * 1000;

inline DaySummary process_trace(const std::vector<AccelSample>& trace, const SensorConfig& cfg) {
    if (trace.empty()) return DaySummary{};
    if (trace.back().t_ms - trace.front().t_ms > kMaxTraceSpanMs)
        throw std::invalid_argument("trace spans more than 36 hours");
    TraceReplayer replayer(cfg, trace.front().t_ms);
    for (const auto& s : trace) replayer.feed(s);
    return replayer.summary();
}

// --- synthetic trace generation -------------------------------------------

enum class SegmentKind { idle, walk };

struct Segment {
    SegmentKind kind = SegmentKind::idle;
    double start_min = 0.0;     // offset from the schedule base
    double duration_min = 0.0;
    double cadence_spm = 0.0;   // steps per minute, walk segments only
};

struct TraceSchedule {
    std::int64_t base_ms = 8 * 3600 * 1000;  // default start: 08:00
    std::vector<Segment> segments;

    void validate() const {
        double prev_end = -1.0;
        for (const auto& seg : segments) {
            if (seg.duration_min <= 0.0)
                throw std::invalid_argument("schedule segment duration must be positive");
            if (seg.kind == SegmentKind::walk && seg.cadence_spm <= 0.0)
                throw std::invalid_argument("walk segment cadence must be positive");
            if (seg.start_min < prev_end)
                throw std::invalid_argument("schedule segments overlap");
            prev_end = seg.start_min + seg.duration_min;
        }
    }
};

/// Builds an accelerometer trace matching a walk/idle schedule. Walk segments
/// emit one supra-threshold spike per step followed by two sub-threshold
/// decay samples, so the step counter sees exactly cadence * duration steps.
/// Idle segments emit sub-threshold jitter once per second.
inline std::vector<AccelSample> synth_trace(const TraceSchedule& schedule,
                                            const SensorConfig& cfg, Rng& rng) {
    schedule.validate();
    const double spike = 1.5 * cfg.step_threshold;
    std::vector<AccelSample> trace;
    for (const auto& seg : schedule.segments) {
        const std::int64_t seg_start =
            schedule.base_ms + static_cast<std::int64_t>(seg.start_min * 60000.0);
        const std::int64_t seg_len = static_cast<std::int64_t>(seg.duration_min * 60000.0);
        if (seg.kind == SegmentKind::walk) {
            const std::int64_t period = static_cast<std::int64_t>(60000.0 / seg.cadence_spm);
            for (std::int64_t t = 0; t + period <= seg_len; t += period) {
                trace.push_back({seg_start + t, spike, 0.0, 0.0});
                trace.push_back({seg_start + t + period / 3, spike / 2.0, 0.0, 0.0});
                trace.push_back({seg_start + t + 2 * period / 3, 0.0, 0.0, 0.0});
            }
        } else {
            for (std::int64_t t = 0; t < seg_len; t += 1000) {
                trace.push_back({seg_start + t, rng.uniform(0.0, 0.3 * cfg.step_threshold),
                                 0.0, 0.0});
            }
        }
    }
    std::sort(trace.begin(), trace.end(),
              [](const AccelSample& a, const AccelSample& b) { return a.t_ms < b.t_ms; });
    return trace;
}

// --- trace file format ------------------------------------------------------

inline constexpr const char* kTraceCsvHeader = "t_ms,x,y,z";

inline std::string trace_to_csv(const std::vector<AccelSample>& trace) {
    std::string out = kTraceCsvHeader;
    out += '\n';
    char buf[128];
    for (const auto& s : trace) {
        std::snprintf(buf, sizeof(buf), "%lld,%.6f,%.6f,%.6f",
                      static_cast<long long>(s.t_ms), s.x, s.y, s.z);
        out += buf;
        out += '\n';
    }
    return out;
}

inline std::vector<AccelSample> trace_from_csv(const CsvTable& table) {
    if (table.header != split_csv_line(kTraceCsvHeader))
        throw std::runtime_error("trace CSV header mismatch");
    std::vector<AccelSample> out;
    out.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        out.push_back({static_cast<std::int64_t>(std::stoll(row[0])), std::stod(row[1]),
                       std::stod(row[2]), std::stod(row[3])});
    }
    return out;
}

}  // namespace wellsim
