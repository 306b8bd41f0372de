#include "adacomm/session.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <memory>
#include <unordered_map>
#include <utility>

#include "adacomm/errors.hpp"

namespace adacomm {

std::string_view decoder_mode_name(DecoderMode mode) {
    switch (mode) {
        case DecoderMode::Adaptive: return "adaptive";
        case DecoderMode::FrozenModel: return "frozen-model";
        case DecoderMode::VarianceThreshold: return "variance-threshold";
    }
    return "unknown";
}

std::optional<DecoderMode> decoder_mode_from_name(std::string_view name) {
    if (name == "adaptive") return DecoderMode::Adaptive;
    if (name == "frozen-model") return DecoderMode::FrozenModel;
    if (name == "variance-threshold") return DecoderMode::VarianceThreshold;
    return std::nullopt;
}

namespace {

// Distinct derivation streams off the session seed. Values are arbitrary but
// fixed: changing any of them changes every seeded artifact.
constexpr std::uint64_t kSaltInit = 0x11;
constexpr std::uint64_t kSaltTrain = 0x23;
constexpr std::uint64_t kSaltAugment = 0x37;
constexpr std::uint64_t kSaltTune = 0x4D;
constexpr std::uint64_t kSaltPayload = 0x59;

// splitmix64 finalizer over (base, salt, k): decorrelates the per-invocation
// seeds handed to model init, training, and augmentation.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt, std::uint64_t k) {
    std::uint64_t z = base ^ (0x9E3779B97F4A7C15ULL * (salt + 1)) ^
                      (0xD1B54A32D192ED03ULL * (k + 1));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

// ---------------------------------------------------------------------------
// SenderModel

SenderModel::SenderModel(const ScenarioSpec& spec, const SenderConfig& cfg)
    : gen_(spec.scenario, spec.mod),
      cfg_(cfg),
      ts_us_(spec.mod.ts_us),
      payload_rng_(cfg.payload_seed) {
    if (cfg_.sequence.ts_us != ts_us_)
        throw ConfigError("sender: training sequence T_s must match the modulation T_s");
    if (cfg_.sequence.tp_us % ts_us_ != 0)
        throw ConfigError("sender: T_p must be a multiple of T_s to stay on the grid");
    if (cfg_.grant_latency_us < 0 || cfg_.guard_chip_windows < 0 ||
        cfg_.idle_windows_between_packets < 0)
        throw ConfigError("sender: negative scheduling parameter");
}

void SenderModel::request_training() {
    // A retry while a grant is already pending simply re-arms the timer; the
    // sequence is emitted once per served grant.
    grant_due_us_ = gen_.now_us() + cfg_.grant_latency_us;
}

void SenderModel::push_idle(std::int64_t count_ts) {
    for (std::int64_t i = 0; i < count_ts; ++i)
        queue_.push_back({WindowKind::Idle, ts_us_});
}

void SenderModel::plan_sequence() {
    const std::int64_t now = gen_.now_us();
    const std::int64_t guard_us =
        static_cast<std::int64_t>(cfg_.guard_chip_windows) * cfg_.sequence.tp_us;
    if (now + guard_us + cfg_.sequence.total_duration_us() > gen_.end_us()) {
        // Not enough scenario left to serve the grant; drop it and pad idle.
        grant_due_us_.reset();
        push_idle(1);
        return;
    }
    grant_due_us_.reset();
    ++sequences_granted_;
    push_idle(guard_us / ts_us_);
    for (const ScheduleEntry& e : build_training_schedule(cfg_.sequence, now + guard_us))
        queue_.push_back({e.kind, e.duration_us});
}

void SenderModel::plan_packet() {
    const std::int64_t now = gen_.now_us();
    if (now + static_cast<std::int64_t>(kPacketSymbols) * ts_us_ > gen_.end_us()) {
        push_idle(1);  // tail pad; the final sliver is clamped on emission
        return;
    }
    std::array<std::uint8_t, kPayloadBytes> payload;
    for (auto& byte : payload)
        byte = static_cast<std::uint8_t>(payload_rng_.next_u64() & 0xFF);
    const Packet pkt = Packet::make(payload);
    ledger_.push_back({now, pkt});
    for (Symbol s : pkt.to_symbols())
        queue_.push_back({s == Symbol::One ? WindowKind::Sym1 : WindowKind::Sym0, ts_us_});
    push_idle(cfg_.idle_windows_between_packets);
}

void SenderModel::plan() {
    if (!queue_.empty()) return;
    const std::int64_t now = gen_.now_us();
    if (now >= gen_.end_us()) return;

    if (grant_due_us_) {
        if (now < *grant_due_us_) {
            // Wait out the control latency on the symbol grid; the grant is
            // served at the next planning step. Packets never start while a
            // grant is pending.
            push_idle((*grant_due_us_ - now + ts_us_ - 1) / ts_us_);
        } else if (now % cfg_.sequence.tp_us != 0) {
            // Preamble detection analyzes the absolute T_p grid, so chip
            // windows must start on it; pad to the next T_p boundary.
            push_idle(1);
        } else {
            plan_sequence();
        }
        return;
    }
    plan_packet();
}

bool SenderModel::next_window(ChannelGenerator::Window& out) {
    plan();
    if (queue_.empty() || gen_.exhausted()) return false;
    const Planned p = queue_.front();
    queue_.pop_front();
    // Only idle padding can reach the scenario edge; packets and sequences
    // are planned strictly inside it.
    const std::int64_t dur = std::min(p.duration_us, gen_.end_us() - gen_.now_us());
    if (dur <= 0) return false;
    out = gen_.emit_window(p.kind, dur);
    return true;
}

// ---------------------------------------------------------------------------
// Receiver session

namespace {

// Where the receiver pulls channel samples from. `next` delivers the next
// contiguous chunk (one emitted window live; one T_s slice on replay) and
// returns false at end of stream.
class WindowSource {
  public:
    virtual ~WindowSource() = default;
    virtual bool next(std::vector<SampleVector>& out) = 0;
    virtual void request_training() = 0;
    virtual std::int64_t now_us() const = 0;
    virtual std::int64_t end_us() const = 0;
};

class LiveSource final : public WindowSource {
  public:
    LiveSource(SenderModel& sender, Trace* record) : sender_(sender), record_(record) {}

    bool next(std::vector<SampleVector>& out) override {
        ChannelGenerator::Window w;
        if (!sender_.next_window(w)) return false;
        if (record_) {
            record_->truth.push_back({w.t_start_us, w.truth});
            record_->samples.insert(record_->samples.end(), w.samples.begin(),
                                    w.samples.end());
        }
        out.insert(out.end(), w.samples.begin(), w.samples.end());
        return true;
    }
    void request_training() override { sender_.request_training(); }
    std::int64_t now_us() const override { return sender_.now_us(); }
    std::int64_t end_us() const override { return sender_.end_us(); }

  private:
    SenderModel& sender_;
    Trace* record_;
};

class ReplaySource final : public WindowSource {
  public:
    ReplaySource(const Trace& trace, std::int64_t ts_us) : trace_(trace), ts_us_(ts_us) {
        if (ts_us_ <= 0) throw ConfigError("replay: T_s must be positive");
        end_us_ = trace.samples.empty()
                      ? 0
                      : (trace.samples.back().t_us / ts_us_ + 1) * ts_us_;
    }

    bool next(std::vector<SampleVector>& out) override {
        if (now_us_ >= end_us_) return false;
        const std::int64_t slice_end = now_us_ + ts_us_;
        while (idx_ < trace_.samples.size() && trace_.samples[idx_].t_us < slice_end)
            out.push_back(trace_.samples[idx_++]);
        now_us_ = slice_end;
        return true;
    }
    void request_training() override {}  // the grant is already in the stream
    std::int64_t now_us() const override { return now_us_; }
    std::int64_t end_us() const override { return end_us_; }

  private:
    const Trace& trace_;
    std::int64_t ts_us_;
    std::size_t idx_ = 0;
    std::int64_t now_us_ = 0;
    std::int64_t end_us_ = 0;
};

// Replayed traces cut grid frames across training sequences and window
// boundaries the live grid never splits, so frames can be too thin to
// classify; those decode as symbol 0 instead of throwing.
class GuardedDecoder final : public SymbolDecoder {
  public:
    GuardedDecoder(SymbolDecoder& inner, std::size_t min_samples)
        : inner_(inner), min_samples_(min_samples) {}

    Symbol decode(const Frame& frame) override {
        if (frame.length() < min_samples_) return Symbol::Zero;
        return inner_.decode(frame);
    }
    std::string name() const override { return inner_.name(); }
    std::uint64_t snapshot_id() const override { return inner_.snapshot_id(); }

  private:
    SymbolDecoder& inner_;
    std::size_t min_samples_;
};

SessionConfig normalized(SessionConfig cfg, const ScenarioSpec& spec) {
    cfg.model.input_dims = spec.scenario.subcarriers;
    cfg.sequence.ts_us = spec.mod.ts_us;
    cfg.sequence.tp_us = 2 * spec.mod.ts_us;
    cfg.preamble.tp_us = cfg.sequence.tp_us;
    if (cfg.sequence.tg_us % cfg.sequence.ts_us != 0)
        throw ConfigError("session: training block T_g must be a multiple of T_s");
    if (cfg.passive_capacity < cfg.fine_tune.batch_size)
        throw ConfigError("session: passive pool smaller than a fine-tuning batch");
    cfg.model.validate();
    return cfg;
}

class SessionEngine {
  public:
    SessionEngine(const SessionConfig& cfg, WindowSource& src, SenderModel* sender,
                  const std::vector<LedgerPacket>* replay_ledger)
        : cfg_(cfg),
          src_(src),
          sender_(sender),
          replay_ledger_(replay_ledger),
          ts_us_(cfg.sequence.ts_us),
          timeout_us_(cfg.sync_timeout_us > 0 ? cfg.sync_timeout_us : 110 * cfg.sequence.ts_us),
          pool_(DatasetKind::Passive, cfg.passive_capacity),
          monitor_(cfg.per_window, cfg.per_threshold, cfg.per_consecutive),
          tune_rng_(mix_seed(cfg.seed, kSaltTune, 0)) {}

    void run() {
        bootstrap();
        std::vector<SampleVector> chunk;
        for (;;) {
            chunk.clear();
            if (!src_.next(chunk)) break;
            interrupted_ = false;
            for (SampleVector& s : chunk) raw_.push_back(std::move(s));
            cut_frames();
            if (!interrupted_) check_timeout();
        }
    }

    SessionResult finish(Trace trace) {
        res_.mode = cfg_.mode;
        res_.duration_us = src_.end_us();
        res_.ledger = ledger();
        res_.outcomes.clear();
        res_.outcomes.reserve(res_.ledger.size());
        for (const LedgerPacket& lp : res_.ledger) {
            PacketOutcome po;
            po.t_start_us = lp.t_start_us;
            res_.outcomes.push_back(po);
        }
        for (const auto& [idx, po] : recorded_) res_.outcomes[idx] = po;
        if (cnn_) res_.final_params = cnn_->params();
        res_.trace = std::move(trace);
        return std::move(res_);
    }

  private:
    // --- seeding & shared plumbing -----------------------------------------

    FullTrainConfig ft_config() {
        FullTrainConfig fc;
        fc.sequence = cfg_.sequence;
        fc.preamble = cfg_.preamble;
        fc.augment = cfg_.augment;
        fc.train = cfg_.train;
        fc.model = cfg_.model;
        fc.max_attempts = cfg_.max_attempts;
        fc.scan_budget_us = cfg_.scan_budget_us;
        fc.train_ms_per_batch = cfg_.train_ms_per_batch;
        // Every invocation draws a fresh initialization/shuffle/permutation
        // stream: a retrain after a poor draw must not repeat it.
        fc.init_seed = mix_seed(cfg_.seed, kSaltInit, invocation_);
        fc.train.rng_seed = mix_seed(cfg_.seed, kSaltTrain, invocation_);
        fc.augment.rng_seed = mix_seed(cfg_.seed, kSaltAugment, invocation_);
        ++invocation_;
        return fc;
    }

    TrainingStream stream() {
        TrainingStream s;
        s.request = [this] {
            ++res_.grant_requests;
            src_.request_training();
        };
        s.next = [this](std::vector<SampleVector>& out) { return src_.next(out); };
        s.now_us = [this] { return src_.now_us(); };
        return s;
    }

    const std::vector<LedgerPacket>& ledger() const {
        return sender_ ? sender_->ledger() : *replay_ledger_;
    }

    std::optional<std::size_t> ledger_lookup(std::int64_t t_start_us) {
        const auto& led = ledger();
        while (ledger_seen_ < led.size()) {
            ledger_index_.emplace(led[ledger_seen_].t_start_us, ledger_seen_);
            ++ledger_seen_;
        }
        const auto it = ledger_index_.find(t_start_us);
        if (it == ledger_index_.end()) return std::nullopt;
        return it->second;
    }

    void blind_consume(std::int64_t ms) {
        const std::int64_t until = src_.now_us() + ms * 1000;
        std::vector<SampleVector> sink;
        while (src_.now_us() < until) {
            sink.clear();
            if (!src_.next(sink)) break;
        }
    }

    void anchor_grid() {
        grid_t_ = ((src_.now_us() + ts_us_ - 1) / ts_us_) * ts_us_;
        raw_.clear();
    }

    void absorb_preamble_stats(int hits, int verify_failures) {
        res_.preamble_hits += static_cast<std::size_t>(hits);
        res_.preamble_verify_failures += static_cast<std::size_t>(verify_failures);
    }

    // --- bootstrap ----------------------------------------------------------

    void bootstrap() {
        mode_ = AdaptationMode::FullTraining;
        TrainingStream s = stream();
        if (cfg_.mode == DecoderMode::VarianceThreshold) {
            const CollectOutcome col = collect_active(s, ft_config());
            absorb_preamble_stats(col.preamble_hits, col.preamble_verify_failures);
            if (!col.success)
                throw PreambleNotFoundError(
                    "session bootstrap: training sequence not collected");
            ++res_.sequences_collected;
            variance_ = std::make_unique<VarianceDecoder>(
                calibrate_variance_threshold(col.active));
            res_.variance_threshold = variance_->threshold();
            inner_ = variance_.get();
            // Variance needs two samples; anything thinner decodes as 0.
            guard_ = std::make_unique<GuardedDecoder>(*inner_, 2);
        } else {
            FullTrainConfig fc = ft_config();
            const nn::ModelParams blank = nn::init_params(fc.model, fc.init_seed);
            FullTrainOutcome out = full_train(s, blank, fc);
            absorb_preamble_stats(out.preamble_hits, out.preamble_verify_failures);
            if (!out.success)
                throw PreambleNotFoundError("session bootstrap: full training failed");
            ++res_.sequences_collected;
            blind_consume(out.t_train_ms);
            cnn_ = std::make_unique<CnnDecoder>(std::move(out.params));
            inner_ = cnn_.get();
            guard_ = std::make_unique<GuardedDecoder>(*inner_, cfg_.model.max_width());
        }
        res_.bootstrap_done_us = src_.now_us();
        last_event_us_ = last_healthy_us_ = src_.now_us();
        last_fail_fed_us_ = std::numeric_limits<std::int64_t>::min() / 2;
        anchor_grid();
        mode_ = AdaptationMode::Normal;
    }

    // --- steady-state decode loop -------------------------------------------

    void cut_frames() {
        while (!interrupted_ && src_.now_us() >= grid_t_ + ts_us_) {
            while (!raw_.empty() && raw_.front().t_us < grid_t_) raw_.pop_front();
            Frame f;
            f.t_start_us = grid_t_;
            f.t_end_us = grid_t_ + ts_us_;
            while (!raw_.empty() && raw_.front().t_us < grid_t_ + ts_us_) {
                f.samples.push_back(std::move(raw_.front()));
                raw_.pop_front();
            }
            grid_t_ += ts_us_;
            on_frame(std::move(f));
        }
    }

    void on_frame(Frame f) {
        frames_.push_back(std::move(f));
        syms_.push_back(guard_->decode(frames_.back()));

        if (!lock_) {
            while (scan_ + kSyncSymbols <= syms_.size()) {
                int matches = 0;
                for (std::size_t j = 0; j < kSyncSymbols; ++j)
                    if (syms_[scan_ + j] == kSyncWord[j]) ++matches;
                if (matches >= 7) {
                    lock_ = scan_;
                    break;
                }
                ++scan_;
            }
            if (!lock_ && frames_.size() > kScanCap) {
                // Sync has not matched for a long stretch (model failure or a
                // sequence crossing a replay); forget the oldest frames. The
                // scan position is far past the dropped prefix by now.
                frames_.erase(frames_.begin(), frames_.begin() + kScanDrop);
                syms_.erase(syms_.begin(), syms_.begin() + kScanDrop);
                scan_ -= kScanDrop;
            }
        }
        if (lock_ && frames_.size() >= *lock_ + kPacketSymbols) decode_locked();
    }

    void decode_locked() {
        const std::size_t at = *lock_;
        const std::span<const Frame> span(frames_.data() + at, kPacketSymbols);
        const std::int64_t t0 = span.front().t_start_us;

        const std::optional<std::size_t> lidx = ledger_lookup(t0);
        std::array<Symbol, kPacketSymbols> truth{};
        std::span<const Symbol> truth_span{};
        if (lidx) {
            truth = ledger()[*lidx].packet.to_symbols();
            truth_span = truth;
        }
        const DecodeResult r = decode_packet(span, *guard_, truth_span);
        ++res_.decodes;

        if (lidx) {
            PacketOutcome po;
            po.t_start_us = t0;
            po.found = true;
            po.crc_pass = r.crc_pass;
            po.payload_ok =
                r.crc_pass && r.packet.payload == ledger()[*lidx].packet.payload;
            po.symbol_errors = static_cast<std::uint32_t>(r.symbol_errors());
            po.snapshot_id = r.snapshot_id;
            if (r.crc_pass && !po.payload_ok) ++res_.undetected_errors;
            // A CRC-failing decode can be retried off a better alignment;
            // keep the first passing outcome, else the latest attempt.
            const auto it = recorded_.find(*lidx);
            if (it == recorded_.end() || !it->second.crc_pass) recorded_[*lidx] = po;
        } else {
            ++res_.unledgered_decodes;
            if (r.crc_pass) ++res_.undetected_errors;
        }

        if (cfg_.mode == DecoderMode::Adaptive && cnn_) {
            const std::size_t appended = harvest_passive(r, pool_);
            if (r.crc_pass) {
                res_.harvested_frames += appended;
                maybe_fine_tune();
            } else {
                res_.harvested_from_crc_fail += appended;
            }
        }

        // A verified packet is consumed whole; a CRC failure rolls the scan
        // back to just past the sync position, so a true sync word a few
        // frames later is not skipped.
        const std::size_t consumed = r.crc_pass ? at + kPacketSymbols : at + 1;
        frames_.erase(frames_.begin(),
                      frames_.begin() + static_cast<std::ptrdiff_t>(consumed));
        syms_.erase(syms_.begin(), syms_.begin() + static_cast<std::ptrdiff_t>(consumed));
        scan_ = 0;
        lock_.reset();

        record_outcome(r.crc_pass);
    }

    void maybe_fine_tune() {
        if (pool_.size() < cfg_.fine_tune.batch_size || !pool_.has_both_classes()) return;
        if (cfg_.misfit_gate_sample > 0) {
            // Tune only on evidence of drift: the current snapshot
            // disagreeing with a stored pool label. (Pool labels are the
            // decoder's own outputs, so this can only fire after the
            // snapshot has moved since the entry was harvested.)
            const std::size_t n = pool_.size();
            const std::size_t probe = std::min(cfg_.misfit_gate_sample, n);
            const std::size_t stride = std::max<std::size_t>(1, n / probe);
            bool misfit = false;
            for (std::size_t i = 0; i < n && !misfit; i += stride)
                misfit = nn::predict(cnn_->params(), pool_[i].frame) != pool_[i].label;
            if (!misfit) return;
        }
        nn::ModelParams tuned = cnn_->params();
        const FineTuneResult ft = fine_tune(tuned, pool_, cfg_.fine_tune, tune_rng_);
        if (ft.applied) {
            cnn_->publish(std::move(tuned));
            ++res_.fine_tunes;
        }
    }

    void record_outcome(bool crc_pass) {
        const std::int64_t now = src_.now_us();
        const std::int64_t prev_healthy = last_healthy_us_;
        last_event_us_ = now;
        // The monitor counts packet outcomes. Decode attempts can outnumber
        // packets (a missed sync slides through a packet body and false-locks
        // several times), so failure feeds are limited to one per packet
        // period; every pass is fed.
        if (!crc_pass) {
            if (now - last_fail_fed_us_ < static_cast<std::int64_t>(kPacketSymbols) * ts_us_)
                return;
            last_fail_fed_us_ = now;
        }
        const bool trig = monitor_.update_per(crc_pass);
        if (crc_pass) last_healthy_us_ = now;
        if (trig && cfg_.mode == DecoderMode::Adaptive && mode_ == AdaptationMode::Normal)
            start_full_training(now, prev_healthy);
    }

    void check_timeout() {
        // Decode silence feeds the monitor: a receiver that lost sync
        // entirely produces no packet outcomes, which must itself count as
        // failure evidence or an abrupt change would never trigger recovery.
        while (!interrupted_ && src_.now_us() - last_event_us_ > timeout_us_) {
            last_event_us_ += timeout_us_;
            ++res_.timeouts;
            const std::int64_t prev_healthy = last_healthy_us_;
            const bool trig = monitor_.update_per(false);
            if (trig && cfg_.mode == DecoderMode::Adaptive &&
                mode_ == AdaptationMode::Normal)
                start_full_training(last_event_us_, prev_healthy);
        }
    }

    // --- recovery -------------------------------------------------------------

    void start_full_training(std::int64_t t_trigger_us, std::int64_t prev_healthy_us) {
        mode_ = AdaptationMode::FullTraining;
        res_.trigger_times_us.push_back(t_trigger_us);
        raw_.clear();
        frames_.clear();
        syms_.clear();
        scan_ = 0;
        lock_.reset();

        // Model-failure time that has already elapsed: the stretch from the
        // last healthy outcome (or last recovery) to the trigger.
        const std::int64_t detect_ms =
            std::max<std::int64_t>(1, (t_trigger_us - prev_healthy_us) / 1000);

        TrainingStream s = stream();
        FullTrainOutcome out = full_train(s, cnn_->params(), ft_config());
        absorb_preamble_stats(out.preamble_hits, out.preamble_verify_failures);

        res_.clock.t_collect_ms += out.t_collect_ms;
        res_.clock.t_train_ms += out.t_train_ms;
        res_.clock.t_failure_ms += detect_ms + out.t_failure_extra_ms;

        if (out.success) {
            // Training wall time maps 1:1 onto simulated interruption: the
            // stream advances t_train with no decoding before publication.
            blind_consume(out.t_train_ms);
            const std::int64_t t_pub = src_.now_us();
            // Residual recovery time booked to neither collection nor
            // training (stream rounding to window boundaries) is failure time.
            res_.clock.t_failure_ms += std::max<std::int64_t>(
                0, (t_pub - t_trigger_us) / 1000 - out.t_collect_ms - out.t_train_ms -
                       out.t_failure_extra_ms);
            cnn_->publish(std::move(out.params));
            pool_ = LabeledDataset(DatasetKind::Passive, cfg_.passive_capacity);
            monitor_.reset();
            ++res_.full_trains;
            ++res_.sequences_collected;
            res_.publish_times_us.push_back(t_pub);
            last_healthy_us_ = t_pub;
        } else {
            // Stale snapshot stays in service. Restart the monitor so the
            // next trigger needs fresh evidence instead of re-firing on the
            // very next outcome, and mark failure time as billed through now.
            ++res_.failed_full_trains;
            monitor_.reset();
            last_healthy_us_ = src_.now_us();
        }
        anchor_grid();
        last_event_us_ = src_.now_us();
        last_fail_fed_us_ = std::numeric_limits<std::int64_t>::min() / 2;
        mode_ = AdaptationMode::Normal;
        interrupted_ = true;
    }

    // --- state ---------------------------------------------------------------

    static constexpr std::size_t kScanCap = 256;
    static constexpr std::size_t kScanDrop = 64;

    const SessionConfig cfg_;
    WindowSource& src_;
    SenderModel* sender_;
    const std::vector<LedgerPacket>* replay_ledger_;
    const std::int64_t ts_us_;
    const std::int64_t timeout_us_;

    std::unique_ptr<CnnDecoder> cnn_;
    std::unique_ptr<VarianceDecoder> variance_;
    SymbolDecoder* inner_ = nullptr;
    std::unique_ptr<GuardedDecoder> guard_;

    LabeledDataset pool_;
    PerMonitor monitor_;
    Rng tune_rng_;
    std::uint64_t invocation_ = 0;

    std::deque<SampleVector> raw_;
    std::int64_t grid_t_ = 0;
    std::vector<Frame> frames_;
    std::vector<Symbol> syms_;
    std::size_t scan_ = 0;
    std::optional<std::size_t> lock_;

    AdaptationMode mode_ = AdaptationMode::Normal;
    bool interrupted_ = false;
    std::int64_t last_event_us_ = 0;
    std::int64_t last_healthy_us_ = 0;
    std::int64_t last_fail_fed_us_ = 0;

    std::unordered_map<std::int64_t, std::size_t> ledger_index_;
    std::size_t ledger_seen_ = 0;
    std::map<std::size_t, PacketOutcome> recorded_;

    SessionResult res_;
};

}  // namespace

SessionResult run_live_session(const ScenarioSpec& spec, const SessionConfig& cfg0) {
    const SessionConfig cfg = normalized(cfg0, spec);
    SenderConfig scfg = cfg.sender;
    scfg.sequence = cfg.sequence;
    if (scfg.payload_seed == 0) scfg.payload_seed = mix_seed(cfg.seed, kSaltPayload, 0);
    SenderModel sender(spec, scfg);

    Trace trace;
    LiveSource src(sender, cfg.record_trace ? &trace : nullptr);
    SessionEngine engine(cfg, src, &sender, nullptr);
    engine.run();
    return engine.finish(std::move(trace));
}

SessionResult run_replay_session(const Trace& trace, const std::vector<LedgerPacket>& ledger,
                                 const ScenarioSpec& spec, const SessionConfig& cfg0) {
    const SessionConfig cfg = normalized(cfg0, spec);
    ReplaySource src(trace, cfg.sequence.ts_us);
    SessionEngine engine(cfg, src, nullptr, &ledger);
    engine.run();
    return engine.finish(Trace{});
}

}  // namespace adacomm
