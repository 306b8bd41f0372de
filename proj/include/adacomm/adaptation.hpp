#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <vector>

#include "adacomm/model.hpp"
#include "adacomm/preamble.hpp"
#include "adacomm/rng.hpp"
#include "adacomm/types.hpp"

namespace adacomm {

// Sliding-window packet-error-rate monitor with hysteresis: the full-training
// trigger fires only when PER exceeds the threshold on M consecutive
// evaluations, so a single lost packet never forces a retrain. Evaluations
// begin once the window holds `window_size` outcomes.
class PerMonitor {
  public:
    explicit PerMonitor(std::size_t window_size = 20, double trigger_threshold = 0.4,
                        int consecutive_required = 2);

    // Slides the window and returns true iff the trigger fired on this update.
    bool update_per(bool crc_pass);

    double per() const;
    std::size_t window_size() const { return window_size_; }
    double trigger_threshold() const { return trigger_threshold_; }
    bool full() const { return outcomes_.size() >= window_size_; }

    // Forgets all history; used after a recovery so the monitor evaluates
    // only the newly published model.
    void reset();

  private:
    std::size_t window_size_;
    double trigger_threshold_;
    int consecutive_required_;
    std::deque<bool> outcomes_;
    std::size_t failures_ = 0;
    int consecutive_exceedances_ = 0;
};

enum class AdaptationMode : std::uint8_t { Normal, FineTuning, FullTraining };

// Service-interruption accumulators, all in simulated milliseconds.
// t_train uses a deterministic per-batch cost model so reports are
// reproducible; the real wall-clock bound is checked separately.
struct InterruptClock {
    std::int64_t t_collect_ms = 0;
    std::int64_t t_train_ms = 0;
    std::int64_t t_failure_ms = 0;

    std::int64_t total_ms() const { return t_collect_ms + t_train_ms + t_failure_ms; }
};

struct AdaptationState {
    AdaptationMode mode = AdaptationMode::Normal;
    InterruptClock clock;
};

struct FineTuneConfig {
    double alpha = 0.005;       // fine-tuning step size
    std::size_t batch_size = 32;
    std::size_t steps = 4;      // SGD steps per harvested packet
};

struct FineTuneResult {
    enum class Skip : std::uint8_t { None, TooFewExamples, SingleClass };
    bool applied = false;
    std::size_t steps = 0;
    Skip skipped = Skip::None;
};

// Runs cfg.steps uniform mini-batch SGD steps over the passive dataset.
// Gated, not throwing: too few examples or a single represented class leave
// the parameters untouched and report why.
FineTuneResult fine_tune(nn::ModelParams& params, const LabeledDataset& passive,
                         const FineTuneConfig& cfg, Rng& rng);

struct AugmentConfig {
    std::size_t multiplier = 20;  // permutations emitted per seed frame
    bool dedupe = true;
    std::uint64_t rng_seed = 1;
};

// Expands an active dataset by whole-sample permutation: each emitted frame
// reorders the seed's sample vectors (never values within a sample) and keeps
// the original timestamp for each slot, so order-independent statistics are
// preserved exactly. With dedupe, emissions are distinct from the seed and
// from each other; the count is capped by the number of distinct reorderings.
// Output order is each seed immediately followed by its emissions, so a
// contiguous slice of the output never splits a seed's near-duplicates across
// a boundary (train()'s leading-slice holdout relies on this). Throws
// ConfigError on an empty input or zero multiplier.
LabeledDataset augment(const LabeledDataset& active, const AugmentConfig& cfg);

// Streaming interface the full-training controller pulls from. `request`
// issues one training-sequence request on the control channel (a no-op when
// replaying a recorded session, where the grant is already in the stream).
// `next` appends the next contiguous chunk of channel samples and returns
// false once the stream is exhausted. `now_us` is the simulated clock after
// the latest chunk.
struct TrainingStream {
    std::function<void()> request;
    std::function<bool(std::vector<SampleVector>&)> next;
    std::function<std::int64_t()> now_us;
};

struct FullTrainConfig {
    TrainingSequenceSpec sequence{};
    PreambleConfig preamble{};
    AugmentConfig augment{};
    nn::TrainConfig train{};      // alpha here is the full-training step size
    nn::ModelConfig model{};
    std::uint64_t init_seed = 1;  // fresh-parameter seed (training from scratch)
    std::int64_t scan_budget_us = 0;  // per attempt; 0 derives from the sequence
    int max_attempts = 3;
    std::int64_t train_ms_per_batch = 3;  // deterministic interrupt cost model
};

struct FullTrainOutcome {
    bool success = false;
    nn::ModelParams params;           // new snapshot, or stale copy on failure
    int attempts = 0;
    std::size_t active_frames = 0;
    std::size_t augmented_frames = 0;
    std::size_t batches_used = 0;
    double final_accuracy = 0.0;
    std::int64_t t_collect_ms = 0;       // successful attempt: request -> extracted
    std::int64_t t_train_ms = 0;         // batches_used * train_ms_per_batch
    std::int64_t t_failure_extra_ms = 0; // simulated time burned by failed attempts
    int preamble_hits = 0;               // detections across all attempts
    int preamble_verify_failures = 0;    // detections the tail check rejected
};

struct CollectOutcome {
    bool success = false;
    LabeledDataset active{DatasetKind::Active, 1};  // block order: all 1s, then all 0s
    int attempts = 0;
    std::int64_t t_collect_ms = 0;       // successful attempt: request -> verified
    std::int64_t t_failure_extra_ms = 0; // simulated time burned by failed attempts
    int preamble_hits = 0;               // detections across all attempts
    int preamble_verify_failures = 0;    // detections the tail check rejected
};

// Collection half of full_train: request a training sequence, detect its
// preamble, extract the labeled dataset, and verify the tail preamble,
// retrying per cfg.max_attempts. Used on its own to calibrate non-learning
// decoders (a variance threshold needs the labeled frames but no training).
// Only the sequence/preamble/scan_budget_us/max_attempts fields of cfg apply.
CollectOutcome collect_active(TrainingStream& stream, const FullTrainConfig& cfg);

// Recovery path for abrupt channel change: request a training sequence,
// detect its preamble, extract and verify the labeled dataset, augment it,
// and train a fresh model from scratch. A failed attempt (no preamble within
// the scan budget, truncated payload, or tail-verification mismatch) is
// retried with a new request up to max_attempts times; after that the stale
// parameters are returned with success=false.
FullTrainOutcome full_train(TrainingStream& stream, const nn::ModelParams& stale,
                            const FullTrainConfig& cfg);

}  // namespace adacomm
