#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string_view>
#include <vector>

#include "adacomm/adaptation.hpp"
#include "adacomm/channel_sim.hpp"
#include "adacomm/pipeline.hpp"
#include "adacomm/preamble.hpp"
#include "adacomm/presets.hpp"
#include "adacomm/rng.hpp"
#include "adacomm/trace_io.hpp"
#include "adacomm/types.hpp"

namespace adacomm {

// Receiver variants: the adaptive pipeline (fine-tuning plus triggered full
// training), the same model trained once at session start and then frozen,
// and a per-window variance threshold calibrated once at session start.
enum class DecoderMode : std::uint8_t { Adaptive, FrozenModel, VarianceThreshold };

std::string_view decoder_mode_name(DecoderMode mode);
std::optional<DecoderMode> decoder_mode_from_name(std::string_view name);

// Scheduling model of the transmitter: continuous packet traffic on the
// symbol grid, interrupted by granted training sequences.
struct SenderConfig {
    std::int64_t grant_latency_us = 50'000;  // control-channel latency
    // Idle guard before the head preamble, in T_p windows; long enough for
    // the receiver's rolling-median threshold (history 31) to re-warm on
    // quiet channel after packet traffic.
    int guard_chip_windows = 32;
    std::int64_t idle_windows_between_packets = 2;  // in T_s windows
    TrainingSequenceSpec sequence{};
    // Payload stream seed; 0 derives one from the session seed.
    std::uint64_t payload_seed = 0;
};

// Ground truth for one transmitted packet.
struct LedgerPacket {
    std::int64_t t_start_us = 0;
    Packet packet;
};

// Pull-driven transmitter: every call to next_window() emits exactly one
// channel window. All emissions start on multiples of T_s, so a receiver
// cutting frames on the absolute symbol grid sees whole emitted windows.
// request_training() arms a grant that takes effect at the next packet
// boundary no earlier than grant_latency_us after the request.
class SenderModel {
  public:
    SenderModel(const ScenarioSpec& spec, const SenderConfig& cfg);

    // Emits the next scheduled window; false once the scenario is exhausted.
    bool next_window(ChannelGenerator::Window& out);

    void request_training();

    const std::vector<LedgerPacket>& ledger() const { return ledger_; }
    std::size_t sequences_granted() const { return sequences_granted_; }
    std::int64_t now_us() const { return gen_.now_us(); }
    std::int64_t end_us() const { return gen_.end_us(); }

  private:
    struct Planned {
        WindowKind kind = WindowKind::Idle;
        std::int64_t duration_us = 0;
    };

    void plan();
    void plan_packet();
    void plan_sequence();
    void push_idle(std::int64_t count_ts);

    ChannelGenerator gen_;
    SenderConfig cfg_;
    std::int64_t ts_us_;
    Rng payload_rng_;
    std::deque<Planned> queue_;
    std::optional<std::int64_t> grant_due_us_;
    std::vector<LedgerPacket> ledger_;
    std::size_t sequences_granted_ = 0;
};

struct SessionConfig {
    DecoderMode mode = DecoderMode::Adaptive;
    // Master seed: model initialization, training shuffles, augmentation
    // permutations, and fine-tuning batch draws are all derived from it
    // (rotated per full-training invocation), independent of the channel seed.
    std::uint64_t seed = 1;

    TrainingSequenceSpec sequence{.tg_us = 320'000};
    PreambleConfig preamble{};
    AugmentConfig augment{};
    nn::TrainConfig train{.target_accuracy = 1.0, .holdout_fraction = 0.2};
    FineTuneConfig fine_tune{};
    nn::ModelConfig model{};

    std::size_t passive_capacity = 1760;   // 20 packets of 88 frames
    // Fine-tuning is gated on model/pool disagreement; at most this many
    // pool entries (evenly strided) are re-predicted per gate check.
    std::size_t misfit_gate_sample = 256;

    std::size_t per_window = 20;
    double per_threshold = 0.4;
    int per_consecutive = 2;

    // Decode-silence watchdog: with no packet outcome for this long the
    // monitor is fed a failure, so a receiver that lost data sync entirely
    // still accumulates trigger evidence. 0 derives 110 * T_s, which is
    // longer than one packet period (90 * T_s) plus slack.
    std::int64_t sync_timeout_us = 0;

    int max_attempts = 3;            // training-sequence requests per recovery
    std::int64_t scan_budget_us = 0; // per attempt; 0 derives 6x sequence length
    std::int64_t train_ms_per_batch = 3;

    SenderConfig sender{};      // live sessions only
    bool record_trace = true;   // live sessions only
};

// Per-ledger-packet receiver outcome. A packet the receiver never locked
// onto counts as found=false with all 88 symbols in error.
struct PacketOutcome {
    std::int64_t t_start_us = 0;
    bool found = false;
    bool crc_pass = false;
    bool payload_ok = false;  // CRC passed and payload matches the ledger
    std::uint32_t symbol_errors = kPacketSymbols;
    std::uint64_t snapshot_id = 0;
};

struct SessionResult {
    DecoderMode mode = DecoderMode::Adaptive;
    std::vector<LedgerPacket> ledger;
    std::vector<PacketOutcome> outcomes;  // 1:1 with ledger

    InterruptClock clock;  // recovery episodes only; bootstrap excluded

    std::size_t decodes = 0;             // packet decode attempts
    std::size_t unledgered_decodes = 0;  // decodes at non-packet positions
    std::size_t undetected_errors = 0;   // CRC passed, payload wrong
    std::size_t full_trains = 0;         // published recovery snapshots
    std::size_t failed_full_trains = 0;  // recoveries aborted to stale model
    std::size_t fine_tunes = 0;
    std::size_t harvested_frames = 0;
    std::size_t harvested_from_crc_fail = 0;  // invariant: stays 0
    std::size_t timeouts = 0;                 // watchdog pseudo-failures
    std::size_t grant_requests = 0;           // training-sequence requests
    std::size_t sequences_collected = 0;      // verified extractions
    std::size_t preamble_hits = 0;
    std::size_t preamble_verify_failures = 0;

    std::vector<std::int64_t> trigger_times_us;
    std::vector<std::int64_t> publish_times_us;
    std::int64_t bootstrap_done_us = 0;
    std::int64_t duration_us = 0;

    std::optional<nn::ModelParams> final_params;  // CNN modes
    double variance_threshold = 0.0;              // variance mode
    Trace trace;  // recorded stream (live sessions with record_trace)
};

// Runs a full receiver session against a live simulated sender. The receiver
// bootstraps its decoder from a training sequence at t=0 (excluded from the
// interrupt clock), then decodes packet traffic, harvesting CRC-passing
// packets and (in Adaptive mode) fine-tuning on pool misfits and running
// full training when the packet-error monitor triggers.
// Throws PreambleNotFoundError if the bootstrap collection fails outright.
SessionResult run_live_session(const ScenarioSpec& spec, const SessionConfig& cfg);

// Same receiver driven by a recorded sample stream instead of a live sender.
// Training-sequence requests are no-ops: the grants (and everything else)
// are already in the stream, so a replay of a live session's trace with the
// same SessionConfig reproduces that session's outcomes exactly, and
// replaying it with a different decoder mode yields a paired comparison on
// a byte-identical stream.
SessionResult run_replay_session(const Trace& trace, const std::vector<LedgerPacket>& ledger,
                                 const ScenarioSpec& spec, const SessionConfig& cfg);

}  // namespace adacomm
