#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "adacomm/rng.hpp"
#include "adacomm/trace_io.hpp"
#include "adacomm/types.hpp"

namespace adacomm {

// Low-frequency sinusoidal amplitude noise (human motion stand-in).
struct MotionNoise {
    double amplitude = 0.0;      // amplitude units
    double freq_hz = 1.0;        // [0.3, 3.0]
};

// Step change applied to the per-subcarrier baseline at segment start.
// A single delta is broadcast to all subcarriers.
struct AbruptJump {
    std::vector<double> baseline_delta;
};

struct DynamicsSegment {
    std::int64_t duration_ms = 0;
    double baseline_drift_rate = 0.0;  // random-walk scale, amp units over 1 s
    std::optional<MotionNoise> motion;
    double awgn_sigma = 0.0;
    std::optional<AbruptJump> jump;
};

struct ChannelScenario {
    std::vector<DynamicsSegment> segments;
    std::size_t subcarriers = 12;  // D; 1 for RSSI
    double sample_rate_hz = 2000.0;
    std::uint64_t seed = 1;

    // Per-window sample floor. Poisson(rate*T_s) at the default rate puts
    // ~10% of windows below the widest filter; the floor keeps every frame
    // decodable. Set to 1 for raw Poisson behavior.
    std::size_t min_samples_per_window = 5;

    // Amplitude scale is calibrated jointly with ModulationConfig and the
    // SGD step sizes: O(1) amplitudes keep pooled features small enough for
    // stable training at the default alpha.
    double base_amplitude = 1.0;      // nominal subcarrier amplitude
    double subcarrier_spread = 0.1;   // fixed per-subcarrier offset range

    std::int64_t duration_us() const;
};

// How a CTC sender's transmissions perturb the observed channel.
struct ModulationConfig {
    std::int64_t ts_us = 4000;      // symbol window T_s
    double impact_prob = 0.75;      // P(sample impacted | symbol-1 window)
    double impact_magnitude = 0.3;  // mean per-sample perturbation, random sign
};

enum class WindowKind : std::uint8_t { Idle, Sym0, Sym1, ChipOn, ChipOff };

// Presence/absence of the modulating transmission during the window.
inline bool window_impacts_channel(WindowKind kind) {
    return kind == WindowKind::Sym1 || kind == WindowKind::ChipOn;
}

TruthKind truth_for_window(WindowKind kind);

struct ScheduleEntry {
    std::int64_t t_start_us = 0;
    std::int64_t duration_us = 0;
    WindowKind kind = WindowKind::Idle;
};

// Poisson(rate_hz * window length) clamped to >= 1.
int sample_count_for_window(double rate_hz, std::int64_t window_us, Rng& rng);

// Stateful per-window sample generator. Window-by-window operation lets the
// harness drive a live session where the sender schedule reacts to the
// receiver (training-sequence requests).
class ChannelGenerator {
  public:
    ChannelGenerator(ChannelScenario scenario, ModulationConfig mod);

    struct Window {
        std::int64_t t_start_us = 0;
        std::int64_t duration_us = 0;
        TruthKind truth = TruthKind::Idle;
        std::vector<SampleVector> samples;
    };

    // Emits the next window of `duration_us` with the given kind and
    // advances simulated time. Throws ScheduleOutOfRangeError past the end.
    Window emit_window(WindowKind kind, std::int64_t duration_us);

    std::int64_t now_us() const { return now_us_; }
    std::int64_t end_us() const { return end_us_; }
    bool exhausted() const { return now_us_ >= end_us_; }
    std::size_t subcarriers() const { return scenario_.subcarriers; }

  private:
    void advance_segment_to(std::int64_t t_us);
    double motion_value(std::int64_t t_us) const;

    ChannelScenario scenario_;
    ModulationConfig mod_;
    Rng rng_;
    std::vector<double> baseline_;        // per-subcarrier, jumps applied here
    double walk_ = 0.0;                   // common drift random walk
    std::vector<double> motion_phase_;    // one per segment
    std::vector<std::int64_t> seg_end_us_;
    std::size_t seg_index_ = 0;
    std::int64_t now_us_ = 0;
    std::int64_t end_us_ = 0;
    std::int64_t last_sample_us_ = -1;
};

// One-shot trace generation from a fixed schedule. Gaps between entries and
// the tail of the scenario are filled with idle windows of T_s. Throws
// ScheduleOutOfRangeError if any entry exceeds the scenario duration.
Trace generate_trace(const ChannelScenario& scenario, const ModulationConfig& mod,
                     std::span<const ScheduleEntry> schedule);

}  // namespace adacomm
