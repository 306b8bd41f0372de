#include "adacomm/presets.hpp"

#include <cmath>

#include "adacomm/errors.hpp"

namespace adacomm {

namespace {

std::int64_t phase_ms(double duration_s, int phases) {
    return static_cast<std::int64_t>(std::llround(duration_s * 1000.0 / phases));
}

// Alternating-sign per-subcarrier step. A common-mode (broadcast) step barely
// affects a trained decoder -- its filters settle into contrast patterns with
// near-zero weight sums -- so scripted "abrupt change" reshapes the
// cross-subcarrier profile instead, which is what breaks a stale model.
std::vector<double> alternating_step(double magnitude, std::size_t subcarriers) {
    std::vector<double> delta(subcarriers);
    for (std::size_t d = 0; d < subcarriers; ++d)
        delta[d] = (d % 2 == 0) ? magnitude : -magnitude;
    return delta;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"static",    "walking",         "moving_rx",   "abrupt",      "four_phase",
            "confusion", "drift_staircase", "static_rssi", "walking_rssi"};
}

ScenarioSpec make_scenario(const std::string& preset, double duration_s, std::uint64_t seed) {
    if (duration_s <= 0.0) throw ConfigError("duration must be positive");

    ScenarioSpec spec;
    spec.name = preset;
    spec.scenario.seed = seed;
    spec.scenario.subcarriers = 12;
    spec.scenario.sample_rate_hz = 2000.0;
    spec.mod = ModulationConfig{};  // T_s=4 ms, impact 0.3 @ p=0.75

    const std::int64_t full_ms = static_cast<std::int64_t>(std::llround(duration_s * 1000.0));
    const double awgn = 0.04;
    const MotionNoise walking_motion{0.2, 1.2};
    const double drift_rate = 0.03;
    const double jump_delta = 0.8;

    if (preset == "static") {
        spec.scenario.segments = {{full_ms, 0.0, std::nullopt, awgn, std::nullopt}};
    } else if (preset == "walking") {
        spec.scenario.segments = {{full_ms, 0.0, walking_motion, awgn, std::nullopt}};
    } else if (preset == "moving_rx") {
        spec.scenario.segments = {{full_ms, drift_rate, std::nullopt, awgn, std::nullopt}};
    } else if (preset == "abrupt") {
        const std::int64_t half = phase_ms(duration_s, 2);
        const auto step = alternating_step(jump_delta, spec.scenario.subcarriers);
        spec.scenario.segments = {
            {half, 0.0, std::nullopt, awgn, std::nullopt},
            {full_ms - half, 0.0, std::nullopt, awgn, AbruptJump{step}},
        };
    } else if (preset == "four_phase") {
        const std::int64_t ph = phase_ms(duration_s, 4);
        spec.scenario.segments = {
            {ph, 0.0, std::nullopt, awgn, std::nullopt},
            {ph, 0.0, walking_motion, awgn, std::nullopt},
            {ph, drift_rate, std::nullopt, awgn, std::nullopt},
            {full_ms - 3 * ph, 0.0, std::nullopt, awgn,
             AbruptJump{alternating_step(jump_delta, spec.scenario.subcarriers)}},
        };
    } else if (preset == "confusion") {
        spec.scenario.segments = {{full_ms, 0.0, MotionNoise{0.4, 3.0}, 0.015, std::nullopt}};
        spec.mod.impact_prob = 0.3;
        spec.mod.impact_magnitude = 0.05;
    } else if (preset == "drift_staircase") {
        const int steps = 12;
        const std::int64_t step_ms = phase_ms(duration_s, steps);
        for (int i = 0; i < steps; ++i) {
            DynamicsSegment seg;
            seg.duration_ms = (i == steps - 1) ? full_ms - step_ms * (steps - 1) : step_ms;
            seg.awgn_sigma = awgn;
            if (i > 0)
                seg.jump = AbruptJump{alternating_step(0.07, spec.scenario.subcarriers)};
            spec.scenario.segments.push_back(seg);
        }
    } else if (preset == "static_rssi" || preset == "walking_rssi") {
        spec.scenario.subcarriers = 1;
        spec.scenario.sample_rate_hz = 1000.0;
        spec.mod.ts_us = 8000;
        std::optional<MotionNoise> motion;
        if (preset == "walking_rssi") motion = walking_motion;
        spec.scenario.segments = {{full_ms, 0.0, motion, awgn, std::nullopt}};
    } else {
        throw ConfigError("unknown scenario preset: " + preset);
    }
    return spec;
}

}  // namespace adacomm
