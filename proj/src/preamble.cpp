#include "adacomm/preamble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "adacomm/errors.hpp"
#include "adacomm/segment.hpp"

namespace adacomm {

bool is_valid_barker(const BarkerCode& code) {
    const auto& c = code.chips;
    for (int v : c) {
        if (v != 1 && v != -1) return false;
    }
    for (std::size_t shift = 0; shift < 11; ++shift) {
        int sum = 0;
        for (std::size_t j = 0; j + shift < 11; ++j) sum += c[j] * c[j + shift];
        if (shift == 0 && sum != 11) return false;
        if (shift > 0 && std::abs(sum) > 1) return false;
    }
    return true;
}

double window_energy_variance(std::span<const SampleVector> samples) {
    if (samples.size() < 2) {
        throw InsufficientSamplesError("variance needs >= 2 samples, got " +
                                       std::to_string(samples.size()));
    }
    // Accumulate in sorted order: the result is then bit-identical for any
    // reordering of the same samples, which lets permutation augmentation
    // preserve order-independent statistics exactly.
    std::vector<double> energies;
    energies.reserve(samples.size());
    for (const auto& s : samples) energies.push_back(s.energy());
    std::sort(energies.begin(), energies.end());

    double s1 = 0.0, s2 = 0.0;
    for (double e : energies) {
        s1 += e;
        s2 += e * e;
    }
    const double n = static_cast<double>(samples.size());
    const double mean = s1 / n;
    return std::max(0.0, (s2 - n * mean * mean) / (n - 1.0));
}

void RollingMedianThreshold::push(double variance) {
    recent_.push_back(variance);
    if (recent_.size() > history_) recent_.pop_front();
}

double RollingMedianThreshold::current() const {
    // No +1 decisions until a full history exists: small early medians
    // otherwise make warmup windows fire spuriously.
    if (!warm()) return std::numeric_limits<double>::infinity();
    std::vector<double> sorted(recent_.begin(), recent_.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    const double median =
        n % 2 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    return multiplier_ * median;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    return a >= 0 ? a / b : -((-a + b - 1) / b);
}

struct GriddedVariances {
    std::int64_t grid0_us = 0;  // start of the first analyzed window
    std::vector<double> vars;
};

// Per-window energy variances on the absolute T_p grid. Chip windows are
// emitted on that grid by the sender, and any sub-window offset smears chips
// together, so analysis must share the grid. A partially observed head
// window is skipped; the window holding the last sample is kept if it has
// at least two samples (a thinner live tail is dropped, not an error).
GriddedVariances window_variances(std::span<const SampleVector> samples,
                                  std::int64_t tp_us) {
    if (tp_us <= 0) throw ConfigError("binarize: T_p must be positive");
    if (samples.empty()) throw InsufficientSamplesError("binarize: empty stream");

    const std::int64_t t_first = samples.front().t_us;
    const std::int64_t t_last = samples.back().t_us;
    const std::int64_t g0 = floor_div(t_first + tp_us - 1, tp_us) * tp_us;
    const std::int64_t g_last = floor_div(t_last, tp_us) * tp_us;
    if (g_last < g0) throw InsufficientSamplesError("binarize: no full window in stream");
    const auto count = static_cast<std::size_t>((g_last - g0) / tp_us) + 1;

    std::vector<std::size_t> n(count, 0);
    std::vector<double> s1(count, 0.0), s2(count, 0.0);
    for (const auto& s : samples) {
        if (s.t_us < g0) continue;
        const auto k = static_cast<std::size_t>((s.t_us - g0) / tp_us);
        const double e = s.energy();
        ++n[k];
        s1[k] += e;
        s2[k] += e * e;
    }

    GriddedVariances out;
    out.grid0_us = g0;
    out.vars.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        if (n[k] < 2) {
            if (k + 1 == count) break;  // thin live tail, wait for more data
            throw InsufficientSamplesError("binarize: window " + std::to_string(k) +
                                           " has " + std::to_string(n[k]) + " samples");
        }
        const double nn = static_cast<double>(n[k]);
        const double mean = s1[k] / nn;
        out.vars.push_back(std::max(0.0, (s2[k] - nn * mean * mean) / (nn - 1.0)));
    }
    if (out.vars.size() < 11) {
        throw InsufficientSamplesError("binarize: stream spans " +
                                       std::to_string(out.vars.size()) +
                                       " full windows, need >= 11");
    }
    return out;
}

std::vector<int> chips_from_variances(const std::vector<double>& vars,
                                      const ThresholdStrategy& th,
                                      std::vector<double>* th_trace) {
    std::vector<int> chips;
    chips.reserve(vars.size());
    RollingMedianThreshold rolling(th.multiplier, th.history);
    for (const double v : vars) {
        double threshold = th.fixed_value;
        if (th.kind == ThresholdStrategy::Kind::RollingMedian) {
            threshold = rolling.current();
            rolling.push(v);
        }
        if (th_trace) th_trace->push_back(threshold);
        chips.push_back(v > threshold ? +1 : -1);
    }
    return chips;
}

}  // namespace

std::vector<int> binarize(std::span<const SampleVector> samples, std::int64_t tp_us,
                          const ThresholdStrategy& th) {
    return chips_from_variances(window_variances(samples, tp_us).vars, th, nullptr);
}

int correlate(std::span<const int> seq, const BarkerCode& code) {
    if (seq.size() != code.chips.size()) {
        throw LengthMismatchError("correlate: sequence length " + std::to_string(seq.size()) +
                                  " != 11");
    }
    int sum = 0;
    for (std::size_t j = 0; j < 11; ++j) sum += seq[j] * code.chips[j];
    return sum;
}

std::optional<PreambleDetection> detect_preamble(std::span<const SampleVector> samples,
                                                 const PreambleConfig& cfg) {
    const auto gridded = window_variances(samples, cfg.tp_us);
    std::vector<double> th_trace;
    const auto chips = chips_from_variances(gridded.vars, cfg.th, &th_trace);

    for (std::size_t pos = 0; pos + 11 <= chips.size(); ++pos) {
        const int c = correlate(std::span<const int>(chips.data() + pos, 11), cfg.code);
        if (c < cfg.corr_threshold) continue;

        PreambleDetection det;
        det.score = c;
        det.grid_t_us = gridded.grid0_us + static_cast<std::int64_t>(pos + 11) * cfg.tp_us;
        // Th as of the end of the last chip window: what the next window
        // would be compared against.
        det.threshold = pos + 11 < th_trace.size()
                            ? th_trace[pos + 11]
                            : th_trace.back();

        const auto it = std::lower_bound(
            samples.begin(), samples.end(), det.grid_t_us,
            [](const SampleVector& s, std::int64_t t) { return s.t_us < t; });
        if (it == samples.end()) return std::nullopt;  // nothing after the hit yet
        det.start_index = static_cast<std::size_t>(it - samples.begin());
        return det;
    }
    return std::nullopt;
}

std::vector<ScheduleEntry> build_training_schedule(const TrainingSequenceSpec& spec,
                                                   std::int64_t t_start_us) {
    if (spec.tg_us <= 0) throw ConfigError("training sequence: T_g must be positive");
    if (spec.ts_us <= 0) throw ConfigError("training sequence: T_s must be positive");
    if (spec.tp_us <= 0) throw ConfigError("training sequence: T_p must be positive");
    if (spec.tg_us % spec.ts_us != 0) {
        throw ConfigError("training sequence: T_g must be a multiple of T_s");
    }

    std::vector<ScheduleEntry> entries;
    std::int64_t t = t_start_us;
    auto add_preamble = [&] {
        for (int chip : spec.code.chips) {
            entries.push_back({t, spec.tp_us,
                               chip > 0 ? WindowKind::ChipOn : WindowKind::ChipOff});
            t += spec.tp_us;
        }
    };
    add_preamble();
    const std::size_t per_block = spec.frames_per_block();
    for (std::size_t i = 0; i < per_block; ++i) {
        entries.push_back({t, spec.ts_us, WindowKind::Sym1});
        t += spec.ts_us;
    }
    for (std::size_t i = 0; i < per_block; ++i) {
        entries.push_back({t, spec.ts_us, WindowKind::Sym0});
        t += spec.ts_us;
    }
    add_preamble();
    return entries;
}

LabeledDataset extract_active_dataset(std::span<const SampleVector> samples,
                                      const TrainingSequenceSpec& spec,
                                      std::size_t start_index) {
    if (spec.tg_us <= 0 || spec.ts_us <= 0 || spec.tg_us % spec.ts_us != 0) {
        throw ConfigError("extract_active_dataset: invalid training sequence spec");
    }
    if (start_index >= samples.size()) {
        throw TruncatedSequenceError("extract_active_dataset: start index beyond stream");
    }
    // Anchor on the symbol grid, not on the first sample's timestamp: senders
    // emit windows on multiples of T_s, so flooring keeps every extraction
    // window congruent with one emission window (uniform sample counts, no
    // mixed-label boundary frames).
    const std::int64_t t0 =
        (samples[start_index].t_us / spec.ts_us) * spec.ts_us;
    if (samples.back().t_us < t0 + 2 * spec.tg_us - 1) {
        throw TruncatedSequenceError("extract_active_dataset: stream ends before 2*T_g");
    }

    // Include stream entries from the same grid window that precede start_index.
    std::size_t begin = start_index;
    while (begin > 0 && samples[begin - 1].t_us >= t0) --begin;

    const std::size_t per_block = spec.frames_per_block();
    const auto frames =
        segment_stream(samples.subspan(begin), t0, spec.ts_us, 2 * per_block);

    LabeledDataset ds(DatasetKind::Active, 2 * per_block);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        ds.append({frames[i], i < per_block ? Symbol::One : Symbol::Zero});
    }
    return ds;
}

bool verify_tail_preamble(std::span<const SampleVector> samples,
                          const TrainingSequenceSpec& spec, const PreambleConfig& cfg,
                          double frozen_th, std::int64_t payload_start_us) {
    if (samples.empty()) return false;
    const std::int64_t tail_t0 = payload_start_us + 2 * spec.tg_us;
    if (samples.back().t_us < tail_t0 + 11 * spec.tp_us - 1) return false;

    const auto begin = std::lower_bound(
        samples.begin(), samples.end(), tail_t0,
        [](const SampleVector& s, std::int64_t t) { return s.t_us < t; });
    if (begin == samples.end()) return false;
    std::vector<Frame> frames;
    try {
        frames = segment_stream(
            std::span<const SampleVector>(&*begin,
                                          static_cast<std::size_t>(samples.end() - begin)),
            tail_t0, spec.tp_us, 11);
    } catch (const Error&) {
        return false;  // starved or missing windows: treat as failed check
    }

    std::array<int, 11> chips{};
    for (std::size_t j = 0; j < 11; ++j) {
        try {
            chips[j] = window_energy_variance(frames[j].samples) > frozen_th ? +1 : -1;
        } catch (const InsufficientSamplesError&) {
            return false;
        }
    }
    return correlate(chips, cfg.code) >= cfg.corr_threshold;
}

}  // namespace adacomm
