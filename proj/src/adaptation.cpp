#include "adacomm/adaptation.hpp"

#include <algorithm>
#include <cstring>
#include <string>
#include <unordered_set>
#include <utility>

#include "adacomm/errors.hpp"

namespace adacomm {

PerMonitor::PerMonitor(std::size_t window_size, double trigger_threshold,
                       int consecutive_required)
    : window_size_(window_size),
      trigger_threshold_(trigger_threshold),
      consecutive_required_(consecutive_required) {
    if (window_size_ < 1) throw ConfigError("PerMonitor: window_size must be >= 1");
    if (trigger_threshold_ <= 0.0 || trigger_threshold_ >= 1.0)
        throw ConfigError("PerMonitor: trigger_threshold must be in (0, 1)");
    if (consecutive_required_ < 1)
        throw ConfigError("PerMonitor: consecutive_required must be >= 1");
}

bool PerMonitor::update_per(bool crc_pass) {
    outcomes_.push_back(crc_pass);
    if (!crc_pass) ++failures_;
    if (outcomes_.size() > window_size_) {
        if (!outcomes_.front()) --failures_;
        outcomes_.pop_front();
    }
    if (outcomes_.size() < window_size_) return false;

    if (per() > trigger_threshold_) {
        ++consecutive_exceedances_;
    } else {
        consecutive_exceedances_ = 0;
    }
    return consecutive_exceedances_ >= consecutive_required_;
}

double PerMonitor::per() const {
    if (outcomes_.empty()) return 0.0;
    return static_cast<double>(failures_) / static_cast<double>(outcomes_.size());
}

void PerMonitor::reset() {
    outcomes_.clear();
    failures_ = 0;
    consecutive_exceedances_ = 0;
}

FineTuneResult fine_tune(nn::ModelParams& params, const LabeledDataset& passive,
                         const FineTuneConfig& cfg, Rng& rng) {
    FineTuneResult result;
    if (passive.size() < cfg.batch_size) {
        result.skipped = FineTuneResult::Skip::TooFewExamples;
        return result;
    }
    if (!passive.has_both_classes()) {
        result.skipped = FineTuneResult::Skip::SingleClass;
        return result;
    }

    std::vector<LabeledFrame> batch(cfg.batch_size);
    std::vector<double> grad;
    for (std::size_t step = 0; step < cfg.steps; ++step) {
        for (auto& slot : batch)
            slot = passive[static_cast<std::size_t>(rng.uniform_index(passive.size()))];
        nn::loss_and_grad(params, batch, grad);
        nn::sgd_step(params, grad, cfg.alpha);
    }
    result.applied = true;
    result.steps = cfg.steps;
    return result;
}

namespace {

// Bit-exact fingerprint of a frame's sample-value sequence; permutations that
// land on identical value orderings collide on purpose (result-level dedupe).
std::string frame_key(const Frame& frame) {
    std::string key;
    key.reserve(frame.samples.size() * frame.width() * sizeof(double));
    for (const SampleVector& s : frame.samples) {
        for (double v : s.values) {
            char bits[sizeof(double)];
            std::memcpy(bits, &v, sizeof(double));
            key.append(bits, sizeof(double));
        }
    }
    return key;
}

Frame permuted_frame(const Frame& seed, const std::vector<std::size_t>& order) {
    Frame out;
    out.t_start_us = seed.t_start_us;
    out.t_end_us = seed.t_end_us;
    out.samples.resize(seed.samples.size());
    for (std::size_t slot = 0; slot < order.size(); ++slot) {
        out.samples[slot].values = seed.samples[order[slot]].values;
        out.samples[slot].t_us = seed.samples[slot].t_us;  // original slot times
    }
    return out;
}

}  // namespace

LabeledDataset augment(const LabeledDataset& active, const AugmentConfig& cfg) {
    if (active.empty()) throw ConfigError("augment: empty active dataset");
    if (cfg.multiplier < 1) throw ConfigError("augment: multiplier must be >= 1");

    LabeledDataset expanded{DatasetKind::Active, active.size() * (1 + cfg.multiplier)};

    // Each seed frame is emitted immediately followed by its permutations, so
    // all near-duplicates of one observation stay contiguous. Combined with
    // train()'s leading-slice holdout this keeps every seed's whole group on
    // one side of the split: holdout accuracy then reflects unseen frames
    // rather than reshuffles of memorized ones.
    Rng rng{cfg.rng_seed};
    std::vector<std::size_t> order;
    for (const LabeledFrame& seed : active.entries()) {
        expanded.append(seed);
        const std::size_t n = seed.frame.samples.size();
        order.resize(n);

        std::unordered_set<std::string> seen;
        if (cfg.dedupe) seen.insert(frame_key(seed.frame));

        // Random search with a generous budget; once duplicates dominate the
        // draw (tiny frames, repeated samples) the distinct-permutation cap
        // has been reached in practice and the loop gives up.
        const std::size_t budget = std::max<std::size_t>(cfg.multiplier * 20, 200);
        std::size_t emitted = 0;
        for (std::size_t tries = 0; tries < budget && emitted < cfg.multiplier; ++tries) {
            for (std::size_t i = 0; i < n; ++i) order[i] = i;
            rng.shuffle(order);
            Frame candidate = permuted_frame(seed.frame, order);
            if (cfg.dedupe && !seen.insert(frame_key(candidate)).second) continue;
            expanded.append({std::move(candidate), seed.label});
            ++emitted;
        }
    }
    return expanded;
}

CollectOutcome collect_active(TrainingStream& stream, const FullTrainConfig& cfg) {
    if (!stream.request || !stream.next || !stream.now_us)
        throw ConfigError("collect_active: stream callbacks must all be set");

    CollectOutcome out;
    const TrainingSequenceSpec& seq = cfg.sequence;
    const std::int64_t budget =
        cfg.scan_budget_us > 0 ? cfg.scan_budget_us : 6 * seq.total_duration_us();

    bool stream_dead = false;
    for (int attempt = 1; attempt <= cfg.max_attempts && !stream_dead; ++attempt) {
        out.attempts = attempt;
        stream.request();
        const std::int64_t t_attempt = stream.now_us();

        std::vector<SampleVector> buf;
        std::vector<SampleVector> chunk;
        std::optional<PreambleDetection> hit;
        while (!hit && stream.now_us() - t_attempt <= budget) {
            chunk.clear();
            if (!stream.next(chunk)) {
                stream_dead = true;
                break;
            }
            buf.insert(buf.end(), chunk.begin(), chunk.end());
            try {
                hit = detect_preamble(buf, cfg.preamble);
            } catch (const InsufficientSamplesError&) {
                // Not enough full chip windows buffered yet.
            }
        }
        if (!hit) {
            out.t_failure_extra_ms += (stream.now_us() - t_attempt) / 1000;
            continue;
        }
        ++out.preamble_hits;

        // Pull the payload, the tail preamble, and one spare chip window so
        // every window needed below is interior to the buffered stream.
        const std::int64_t need_until =
            hit->grid_t_us + 2 * seq.tg_us + 12 * seq.tp_us;
        while (stream.now_us() < need_until) {
            chunk.clear();
            if (!stream.next(chunk)) {
                stream_dead = true;
                break;
            }
            buf.insert(buf.end(), chunk.begin(), chunk.end());
        }

        bool verified = false;
        LabeledDataset active{DatasetKind::Active, 1};
        try {
            active = extract_active_dataset(buf, seq, hit->start_index);
            verified = verify_tail_preamble(buf, seq, cfg.preamble, hit->threshold,
                                            hit->grid_t_us);
        } catch (const TruncatedSequenceError&) {
        } catch (const InsufficientSamplesError&) {
        } catch (const EmptyWindowError&) {
        }
        if (!verified) {
            ++out.preamble_verify_failures;
            out.t_failure_extra_ms += (stream.now_us() - t_attempt) / 1000;
            continue;
        }

        out.t_collect_ms = (stream.now_us() - t_attempt) / 1000;
        out.active = std::move(active);
        out.success = true;
        return out;
    }
    return out;
}

FullTrainOutcome full_train(TrainingStream& stream, const nn::ModelParams& stale,
                            const FullTrainConfig& cfg) {
    CollectOutcome collected = collect_active(stream, cfg);

    FullTrainOutcome out;
    out.params = stale;
    out.attempts = collected.attempts;
    out.t_collect_ms = collected.t_collect_ms;
    out.t_failure_extra_ms = collected.t_failure_extra_ms;
    out.preamble_hits = collected.preamble_hits;
    out.preamble_verify_failures = collected.preamble_verify_failures;
    if (!collected.success) return out;

    const LabeledDataset& active = collected.active;
    out.active_frames = active.size();

    // The extracted dataset is one block of each class back to back;
    // interleave the classes so train()'s leading-slice holdout stays
    // balanced at any holdout_fraction.
    LabeledDataset interleaved{DatasetKind::Active, active.size()};
    const std::size_t half = active.size() / 2;
    for (std::size_t i = 0; i < half; ++i) {
        interleaved.append(active[i]);
        interleaved.append(active[half + i]);
    }
    for (std::size_t i = 2 * half; i < active.size(); ++i)
        interleaved.append(active[i]);

    // multiplier == 0 is the explicit no-augmentation escape hatch used
    // by collection-budget sweeps; augment() itself requires >= 1.
    const LabeledDataset training_set = cfg.augment.multiplier == 0
                                            ? interleaved
                                            : augment(interleaved, cfg.augment);
    out.augmented_frames = training_set.size() - active.size();

    nn::TrainResult trained =
        nn::train(nn::init_params(cfg.model, cfg.init_seed), training_set, cfg.train);
    out.params = std::move(trained.params);
    out.batches_used = trained.batches_used;
    out.final_accuracy = trained.final_accuracy;
    out.t_train_ms = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(trained.batches_used) * cfg.train_ms_per_batch);
    out.success = true;
    return out;
}

}  // namespace adacomm
