#include "adacomm/channel_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>
#include <utility>

#include "adacomm/errors.hpp"

namespace adacomm {

std::int64_t ChannelScenario::duration_us() const {
    std::int64_t total = 0;
    for (const auto& seg : segments) total += seg.duration_ms * 1000;
    return total;
}

TruthKind truth_for_window(WindowKind kind) {
    switch (kind) {
        case WindowKind::Idle: return TruthKind::Idle;
        case WindowKind::Sym0: return TruthKind::Sym0;
        case WindowKind::Sym1: return TruthKind::Sym1;
        case WindowKind::ChipOn:
        case WindowKind::ChipOff: return TruthKind::Preamble;
    }
    return TruthKind::Idle;
}

int sample_count_for_window(double rate_hz, std::int64_t window_us, Rng& rng) {
    if (rate_hz <= 0.0 || window_us <= 0) {
        throw ConfigError("sample_count_for_window: rate and window must be positive");
    }
    const double lambda = rate_hz * static_cast<double>(window_us) / 1e6;
    const int n = rng.poisson(lambda);
    return std::max(1, n);
}

ChannelGenerator::ChannelGenerator(ChannelScenario scenario, ModulationConfig mod)
    : scenario_(std::move(scenario)), mod_(mod), rng_(scenario_.seed) {
    if (scenario_.segments.empty()) throw ConfigError("scenario has no segments");
    if (scenario_.subcarriers == 0) throw ConfigError("scenario needs >=1 subcarrier");
    if (scenario_.sample_rate_hz <= 0.0) throw ConfigError("sample rate must be positive");

    baseline_.resize(scenario_.subcarriers);
    for (auto& b : baseline_) {
        b = scenario_.base_amplitude + scenario_.subcarrier_spread * rng_.uniform(-1.0, 1.0);
    }
    std::int64_t t = 0;
    for (const auto& seg : scenario_.segments) {
        if (seg.duration_ms <= 0) throw ConfigError("segment duration must be positive");
        t += seg.duration_ms * 1000;
        seg_end_us_.push_back(t);
        motion_phase_.push_back(rng_.uniform(0.0, 2.0 * std::numbers::pi));
    }
    end_us_ = t;

    if (const auto& jump = scenario_.segments.front().jump) {
        for (std::size_t d = 0; d < baseline_.size(); ++d) {
            baseline_[d] += jump->baseline_delta[jump->baseline_delta.size() == 1 ? 0 : d];
        }
    }
}

void ChannelGenerator::advance_segment_to(std::int64_t t_us) {
    while (seg_index_ + 1 < scenario_.segments.size() && t_us >= seg_end_us_[seg_index_]) {
        ++seg_index_;
        if (const auto& jump = scenario_.segments[seg_index_].jump) {
            if (jump->baseline_delta.size() != 1 &&
                jump->baseline_delta.size() != baseline_.size()) {
                throw ConfigError("jump delta must have 1 or D entries");
            }
            for (std::size_t d = 0; d < baseline_.size(); ++d) {
                baseline_[d] += jump->baseline_delta[jump->baseline_delta.size() == 1 ? 0 : d];
            }
        }
    }
}

double ChannelGenerator::motion_value(std::int64_t t_us) const {
    const auto& seg = scenario_.segments[seg_index_];
    if (!seg.motion) return 0.0;
    const std::int64_t seg_start = seg_index_ == 0 ? 0 : seg_end_us_[seg_index_ - 1];
    const double tau = static_cast<double>(t_us - seg_start) / 1e6;
    return seg.motion->amplitude *
           std::sin(2.0 * std::numbers::pi * seg.motion->freq_hz * tau + motion_phase_[seg_index_]);
}

ChannelGenerator::Window ChannelGenerator::emit_window(WindowKind kind,
                                                       std::int64_t duration_us) {
    if (duration_us <= 0) throw ConfigError("window duration must be positive");
    if (now_us_ + duration_us > end_us_) {
        throw ScheduleOutOfRangeError("window [" + std::to_string(now_us_) + ", " +
                                      std::to_string(now_us_ + duration_us) +
                                      ") exceeds scenario end " + std::to_string(end_us_));
    }

    Window out;
    out.t_start_us = now_us_;
    out.duration_us = duration_us;
    out.truth = truth_for_window(kind);

    std::size_t n = static_cast<std::size_t>(
        sample_count_for_window(scenario_.sample_rate_hz, duration_us, rng_));
    n = std::max(n, scenario_.min_samples_per_window);
    n = std::min(n, static_cast<std::size_t>(duration_us));  // distinct integer offsets

    // Floyd's algorithm: n distinct offsets uniform in [0, duration_us).
    std::vector<std::int64_t> offsets;
    offsets.reserve(n);
    std::unordered_set<std::int64_t> seen;
    for (std::int64_t j = duration_us - static_cast<std::int64_t>(n); j < duration_us; ++j) {
        const auto r = static_cast<std::int64_t>(rng_.uniform_index(static_cast<std::size_t>(j) + 1));
        if (seen.insert(r).second) {
            offsets.push_back(r);
        } else {
            seen.insert(j);
            offsets.push_back(j);
        }
    }
    std::sort(offsets.begin(), offsets.end());

    const bool impacts = window_impacts_channel(kind);
    const std::size_t dims = scenario_.subcarriers;
    out.samples.reserve(n);
    for (const std::int64_t off : offsets) {
        const std::int64_t t = now_us_ + off;
        advance_segment_to(t);
        const auto& seg = scenario_.segments[seg_index_];

        if (seg.baseline_drift_rate > 0.0 && last_sample_us_ >= 0) {
            const double dt_s = static_cast<double>(t - last_sample_us_) / 1e6;
            if (dt_s > 0.0) walk_ += rng_.normal(0.0, seg.baseline_drift_rate * std::sqrt(dt_s));
        }
        last_sample_us_ = t;

        const double motion = motion_value(t);
        double impact_delta = 0.0;
        if (impacts && rng_.bernoulli(mod_.impact_prob)) {
            impact_delta = rng_.sign() * mod_.impact_magnitude * rng_.uniform(0.5, 1.5);
        }

        SampleVector sv;
        sv.t_us = t;
        sv.values.resize(dims);
        for (std::size_t d = 0; d < dims; ++d) {
            double v = baseline_[d] + walk_ + motion + impact_delta;
            if (seg.awgn_sigma > 0.0) v += rng_.normal(0.0, seg.awgn_sigma);
            sv.values[d] = std::max(0.0, v);
        }
        out.samples.push_back(std::move(sv));
    }

    now_us_ += duration_us;
    return out;
}

Trace generate_trace(const ChannelScenario& scenario, const ModulationConfig& mod,
                     std::span<const ScheduleEntry> schedule) {
    std::vector<ScheduleEntry> entries(schedule.begin(), schedule.end());
    std::sort(entries.begin(), entries.end(),
              [](const ScheduleEntry& a, const ScheduleEntry& b) {
                  return a.t_start_us < b.t_start_us;
              });

    ChannelGenerator gen(scenario, mod);
    const std::int64_t end = gen.end_us();

    Trace trace;
    auto emit = [&](WindowKind kind, std::int64_t duration) {
        auto win = gen.emit_window(kind, duration);
        trace.truth.push_back({win.t_start_us, win.truth});
        for (auto& s : win.samples) trace.samples.push_back(std::move(s));
    };
    auto fill_idle_until = [&](std::int64_t t_target) {
        while (gen.now_us() < t_target) {
            emit(WindowKind::Idle, std::min(mod.ts_us, t_target - gen.now_us()));
        }
    };

    for (const auto& entry : entries) {
        if (entry.duration_us <= 0) throw ConfigError("schedule entry duration must be positive");
        if (entry.t_start_us < gen.now_us()) {
            throw ConfigError("schedule entries overlap at t=" + std::to_string(entry.t_start_us));
        }
        if (entry.t_start_us + entry.duration_us > end) {
            throw ScheduleOutOfRangeError("schedule entry ending at " +
                                          std::to_string(entry.t_start_us + entry.duration_us) +
                                          " exceeds scenario end " + std::to_string(end));
        }
        fill_idle_until(entry.t_start_us);
        emit(entry.kind, entry.duration_us);
    }
    fill_idle_until(end);
    return trace;
}

}  // namespace adacomm
