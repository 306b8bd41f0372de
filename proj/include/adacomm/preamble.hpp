#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "adacomm/channel_sim.hpp"
#include "adacomm/types.hpp"

namespace adacomm {

// Length-11 Barker code; the unique (up to symmetry) +/-1 sequence with
// ideal aperiodic autocorrelation: peak 11, off-peak |c| <= 1.
struct BarkerCode {
    std::array<int, 11> chips = {+1, +1, +1, -1, -1, -1, +1, -1, -1, +1, -1};
};

// Exhaustive shift check of the Barker property.
bool is_valid_barker(const BarkerCode& code);

struct ThresholdStrategy {
    enum class Kind : std::uint8_t { Fixed, RollingMedian };
    Kind kind = Kind::RollingMedian;
    double fixed_value = 0.0;   // used when kind == Fixed
    double multiplier = 3.0;    // Th = m * median(recent window variances)
    std::size_t history = 31;   // rolling window length in T_p windows
};

struct PreambleConfig {
    std::int64_t tp_us = 8000;  // chip window T_p = 2 * T_s by default
    ThresholdStrategy th{};
    int corr_threshold = 9;     // tolerates one corrupted chip
    BarkerCode code{};
};

// Training sequence: head preamble, T_g of symbol 1, T_g of symbol 0, tail
// preamble. The tail is a consistency check only.
struct TrainingSequenceSpec {
    std::int64_t tg_us = 80000;
    std::int64_t ts_us = 4000;
    std::int64_t tp_us = 8000;
    BarkerCode code{};

    std::size_t frames_per_block() const { return static_cast<std::size_t>(tg_us / ts_us); }
    std::int64_t total_duration_us() const { return 22 * tp_us + 2 * tg_us; }
};

// Variance of scalar per-sample energy within one window.
double window_energy_variance(std::span<const SampleVector> samples);

// Median-of-recent-variances threshold: robust to baseline drift, which is
// exactly when preamble detection must still work.
class RollingMedianThreshold {
  public:
    RollingMedianThreshold(double multiplier, std::size_t history)
        : multiplier_(multiplier), history_(history) {}

    void push(double variance);
    // +inf until the first variance arrives: no sample, no +1 chips.
    double current() const;
    bool warm() const { return recent_.size() >= history_; }

  private:
    double multiplier_;
    std::size_t history_;
    std::deque<double> recent_;
};

// Chip decisions for every full T_p window in the stream: +1 if the window's
// energy variance exceeds Th, else -1. Th is either fixed or the rolling
// median of the variances of the preceding windows.
// Throws InsufficientSamplesError if the stream spans fewer than 11 full
// windows or any window holds < 2 samples.
std::vector<int> binarize(std::span<const SampleVector> samples, std::int64_t tp_us,
                          const ThresholdStrategy& th);

// Aperiodic correlation sum over 11 chips; in [-11, 11].
int correlate(std::span<const int> seq, const BarkerCode& code);

struct PreambleDetection {
    std::size_t start_index = 0;   // first sample after the last chip window
    int score = 0;                 // correlation at the hit
    std::int64_t grid_t_us = 0;    // end time of the last chip window
    double threshold = 0.0;        // Th in effect at the hit, for freezing
};

// Slides the binarized 11-chip vector one window per step and reports the
// first position whose correlation reaches corr_threshold. Absence is a
// normal outcome (nullopt), including when no sample exists after the hit.
std::optional<PreambleDetection> detect_preamble(std::span<const SampleVector> samples,
                                                 const PreambleConfig& cfg);

// Channel-sim schedule for one full training sequence starting at t_start_us.
std::vector<ScheduleEntry> build_training_schedule(const TrainingSequenceSpec& spec,
                                                   std::int64_t t_start_us);

// Segments 2*T_g/T_s frames starting at the sample start_index and labels
// them from the fixed structure (first block symbol 1, second symbol 0).
// Throws TruncatedSequenceError if the stream ends before 2*T_g of payload.
LabeledDataset extract_active_dataset(std::span<const SampleVector> samples,
                                      const TrainingSequenceSpec& spec,
                                      std::size_t start_index);

// Consistency check on the tail preamble using the Th frozen at head
// detection; false signals a bad head lock (e.g. off-by-one-window starts).
// payload_start_us is the grid time where the symbol payload began
// (PreambleDetection::grid_t_us); the tail occupies the 11 T_p windows from
// payload_start_us + 2*T_g.
bool verify_tail_preamble(std::span<const SampleVector> samples,
                          const TrainingSequenceSpec& spec, const PreambleConfig& cfg,
                          double frozen_th, std::int64_t payload_start_us);

}  // namespace adacomm
