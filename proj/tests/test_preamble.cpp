#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "adacomm/channel_sim.hpp"
#include "adacomm/errors.hpp"
#include "adacomm/preamble.hpp"
#include "adacomm/presets.hpp"
#include "adacomm/rng.hpp"

using namespace adacomm;

namespace {

// Synthetic chip stream with exactly controlled window variances: high-var
// windows alternate amplitude 1 +/- 0.5, low-var windows are constant 1.
std::vector<SampleVector> synthetic_chips(const std::vector<int>& pattern,
                                          std::int64_t tp_us = 8000,
                                          std::int64_t t0 = 0) {
    std::vector<SampleVector> out;
    const int per_window = 8;
    const std::int64_t step = tp_us / per_window;
    std::int64_t t = t0;
    for (int chip : pattern) {
        for (int i = 0; i < per_window; ++i) {
            const double amp = chip > 0 ? (i % 2 ? 1.5 : 0.5) : 1.0;
            out.push_back({{amp}, t});
            t += step;
        }
    }
    return out;
}

Trace training_trace(std::int64_t guard_windows, std::uint64_t seed,
                     std::int64_t trailing_idle_us = 200000) {
    TrainingSequenceSpec seq;
    const std::int64_t t_start = guard_windows * seq.tp_us;
    const auto schedule = build_training_schedule(seq, t_start);

    ChannelScenario sc;
    const std::int64_t total_us = t_start + seq.total_duration_us() + trailing_idle_us;
    sc.segments = {{total_us / 1000, 0.0, std::nullopt, 0.04, std::nullopt}};
    sc.seed = seed;
    return generate_trace(sc, ModulationConfig{}, schedule);
}

}  // namespace

TEST_CASE("default barker code has ideal aperiodic autocorrelation") {
    BarkerCode code;
    CHECK(is_valid_barker(code));

    // Independent exhaustive shift enumeration.
    for (std::size_t shift = 1; shift < 11; ++shift) {
        int c = 0;
        for (std::size_t j = 0; j + shift < 11; ++j) {
            c += code.chips[j] * code.chips[j + shift];
        }
        CHECK(std::abs(c) <= 1);
    }

    BarkerCode broken;
    broken.chips[4] = -broken.chips[4];
    CHECK_FALSE(is_valid_barker(broken));
}

TEST_CASE("correlation peaks at the aligned code and drops two per flip") {
    BarkerCode code;
    std::vector<int> seq(code.chips.begin(), code.chips.end());
    CHECK(correlate(seq, code) == 11);

    for (std::size_t i = 0; i < 11; ++i) {
        auto flipped = seq;
        flipped[i] = -flipped[i];
        CHECK(correlate(flipped, code) == 9);
    }

    std::vector<int> wrong(10, 1);
    CHECK_THROWS_AS(correlate(wrong, code), LengthMismatchError);
}

TEST_CASE("binarize applies fixed thresholds per window") {
    const std::vector<int> pattern = {1, -1, 1, 1, -1, -1, -1, 1, -1, -1, 1, -1};
    const auto samples = synthetic_chips(pattern);

    ThresholdStrategy th;
    th.kind = ThresholdStrategy::Kind::Fixed;
    th.fixed_value = 0.05;  // high-var windows are ~0.28, low-var exactly 0
    const auto chips = binarize(samples, 8000, th);
    REQUIRE(chips.size() == pattern.size());
    for (std::size_t i = 0; i < pattern.size(); ++i) CHECK(chips[i] == pattern[i]);
}

TEST_CASE("binarize with rolling median separates idle from impacted windows") {
    ChannelScenario sc;
    sc.segments = {{400, 0.0, std::nullopt, 0.04, std::nullopt}};
    sc.seed = 31;
    ChannelGenerator gen(sc, ModulationConfig{});

    // 33 idle windows: the grid drops the partially observed head window,
    // leaving 32 full idle windows (31 warmup + 1 live) before the chips.
    std::vector<SampleVector> stream;
    for (int i = 0; i < 33; ++i) {
        auto w = gen.emit_window(WindowKind::Idle, 8000);
        stream.insert(stream.end(), w.samples.begin(), w.samples.end());
    }
    for (int i = 0; i < 10; ++i) {
        auto w = gen.emit_window(WindowKind::ChipOn, 8000);
        stream.insert(stream.end(), w.samples.begin(), w.samples.end());
    }

    const auto chips = binarize(stream, 8000, ThresholdStrategy{});
    REQUIRE(chips.size() >= 41);
    const std::size_t idle_count = chips.size() - 10;
    // Warmup windows never fire; post-warmup idle stays below Th.
    for (std::size_t i = 0; i < idle_count; ++i) CHECK(chips[i] == -1);
    for (std::size_t i = idle_count; i < chips.size(); ++i) CHECK(chips[i] == +1);
}

TEST_CASE("binarize rejects thin streams") {
    const auto samples = synthetic_chips({1, -1, 1});
    CHECK_THROWS_AS(binarize(samples, 8000, ThresholdStrategy{}), InsufficientSamplesError);

    // One lonely sample in a window.
    std::vector<SampleVector> sparse;
    for (int w = 0; w < 12; ++w) sparse.push_back({{1.0}, w * 8000});
    CHECK_THROWS_AS(binarize(sparse, 8000, ThresholdStrategy{}), InsufficientSamplesError);
}

TEST_CASE("preamble is detected at the exact grid position") {
    const std::int64_t guard = 32;
    const Trace trace = training_trace(guard, 71);

    PreambleConfig cfg;
    const auto det = detect_preamble(trace.samples, cfg);
    REQUIRE(det.has_value());
    CHECK(det->grid_t_us == (guard + 11) * 8000);
    CHECK(det->score == 11);
    CHECK(trace.samples[det->start_index].t_us >= det->grid_t_us);
    CHECK(trace.samples[det->start_index - 1].t_us < det->grid_t_us);
    CHECK(det->threshold < 0.01);  // frozen Th is idle-scale
}

TEST_CASE("one corrupted chip still detects at threshold nine") {
    // Pattern: 16 idle, the code with chip 5 flipped, trailing idle.
    BarkerCode code;
    std::vector<int> pattern(16, -1);
    for (std::size_t i = 0; i < 11; ++i) {
        int c = code.chips[i];
        if (i == 5) c = -c;
        pattern.push_back(c);
    }
    pattern.insert(pattern.end(), 4, -1);
    const auto samples = synthetic_chips(pattern);

    PreambleConfig cfg;
    cfg.th.kind = ThresholdStrategy::Kind::Fixed;
    cfg.th.fixed_value = 0.05;
    const auto det = detect_preamble(samples, cfg);
    REQUIRE(det.has_value());
    CHECK(det->score == 9);
    CHECK(det->grid_t_us == (16 + 11) * 8000);

    // Two corruptions: below threshold, no detection.
    auto worse = pattern;
    worse[16 + 2] = -worse[16 + 2];
    const auto det2 = detect_preamble(synthetic_chips(worse), cfg);
    CHECK_FALSE(det2.has_value());
}

TEST_CASE("detection is shift-equivariant under prepended idle windows") {
    const Trace base = training_trace(36, 72);
    PreambleConfig cfg;
    const auto det1 = detect_preamble(base.samples, cfg);
    REQUIRE(det1.has_value());

    // Prepend five synthetic idle windows before t=0.
    ChannelScenario sc;
    sc.segments = {{40, 0.0, std::nullopt, 0.04, std::nullopt}};
    sc.seed = 73;
    ChannelGenerator gen(sc, ModulationConfig{});
    std::vector<SampleVector> prefixed;
    for (int i = 0; i < 5; ++i) {
        auto w = gen.emit_window(WindowKind::Idle, 8000);
        for (auto s : w.samples) {
            s.t_us -= 5 * 8000;
            prefixed.push_back(std::move(s));
        }
    }
    const std::size_t added = prefixed.size();
    prefixed.insert(prefixed.end(), base.samples.begin(), base.samples.end());

    const auto det2 = detect_preamble(prefixed, cfg);
    REQUIRE(det2.has_value());
    CHECK(det2->grid_t_us == det1->grid_t_us);
    CHECK(det2->start_index == det1->start_index + added);
    CHECK(det2->score == det1->score);
}

TEST_CASE("idle traffic raises almost no false alarms") {
    // 10,000 idle windows: sliding correlation must stay under threshold at
    // >= 99.5% of positions (observed: zero alarms).
    ChannelScenario sc;
    sc.segments = {{80200, 0.0, std::nullopt, 0.04, std::nullopt}};
    sc.seed = 74;
    const Trace trace = generate_trace(sc, ModulationConfig{}, {});

    PreambleConfig cfg;
    const auto chips = binarize(trace.samples, cfg.tp_us, cfg.th);
    REQUIRE(chips.size() >= 10000);
    std::size_t alarms = 0, positions = 0;
    for (std::size_t pos = 0; pos + 11 <= chips.size(); ++pos) {
        ++positions;
        if (correlate(std::span<const int>(chips.data() + pos, 11), cfg.code) >=
            cfg.corr_threshold) {
            ++alarms;
        }
    }
    CHECK(static_cast<double>(alarms) / static_cast<double>(positions) <= 0.005);
}

TEST_CASE("training schedule has the documented structure") {
    TrainingSequenceSpec seq;
    const auto entries = build_training_schedule(seq, 16000);
    REQUIRE(entries.size() == 22 + 40);

    BarkerCode code;
    std::int64_t t = 16000;
    for (std::size_t i = 0; i < 11; ++i) {
        CHECK(entries[i].t_start_us == t);
        CHECK(entries[i].duration_us == 8000);
        CHECK(entries[i].kind ==
              (code.chips[i] > 0 ? WindowKind::ChipOn : WindowKind::ChipOff));
        t += 8000;
    }
    for (std::size_t i = 11; i < 31; ++i) {
        CHECK(entries[i].kind == WindowKind::Sym1);
        CHECK(entries[i].duration_us == 4000);
    }
    for (std::size_t i = 31; i < 51; ++i) CHECK(entries[i].kind == WindowKind::Sym0);
    for (std::size_t i = 51; i < 62; ++i) {
        CHECK(entries[i].kind ==
              (code.chips[i - 51] > 0 ? WindowKind::ChipOn : WindowKind::ChipOff));
    }
    const auto& last = entries.back();
    CHECK(last.t_start_us + last.duration_us - 16000 == seq.total_duration_us());
    CHECK(seq.total_duration_us() == 2 * 11 * 8000 + 2 * 80000);

    TrainingSequenceSpec zero_tg = seq;
    zero_tg.tg_us = 0;
    CHECK_THROWS_AS(build_training_schedule(zero_tg, 0), ConfigError);
    TrainingSequenceSpec ragged = seq;
    ragged.tg_us = 81000;  // not a multiple of T_s
    CHECK_THROWS_AS(build_training_schedule(ragged, 0), ConfigError);
}

TEST_CASE("active dataset extraction labels blocks from the structure") {
    const Trace trace = training_trace(32, 75);
    PreambleConfig cfg;
    const auto det = detect_preamble(trace.samples, cfg);
    REQUIRE(det.has_value());

    TrainingSequenceSpec seq;
    const auto ds = extract_active_dataset(trace.samples, seq, det->start_index);
    REQUIRE(ds.size() == 40);
    CHECK(ds.kind() == DatasetKind::Active);
    for (std::size_t i = 0; i < 20; ++i) CHECK(ds[i].label == Symbol::One);
    for (std::size_t i = 20; i < 40; ++i) CHECK(ds[i].label == Symbol::Zero);

    // Cross-check labels against simulator ground truth at frame starts.
    std::size_t matched = 0;
    for (std::size_t i = 0; i < 40; ++i) {
        const auto t = ds[i].frame.t_start_us;
        for (const auto& mark : trace.truth) {
            if (std::abs(mark.t_us - t) <= seq.ts_us / 2 &&
                (mark.kind == TruthKind::Sym0 || mark.kind == TruthKind::Sym1)) {
                const Symbol truth =
                    mark.kind == TruthKind::Sym1 ? Symbol::One : Symbol::Zero;
                if (truth == ds[i].label) ++matched;
                break;
            }
        }
    }
    CHECK(matched >= 39);  // at most the block-boundary frame may drift

    // Truncation: stream that dies inside the symbol blocks.
    const auto cut = std::span<const SampleVector>(trace.samples)
                         .first(det->start_index + 50);
    CHECK_THROWS_AS(extract_active_dataset(cut, seq, det->start_index),
                    TruncatedSequenceError);
    CHECK_THROWS_AS(extract_active_dataset(trace.samples, seq, trace.samples.size()),
                    TruncatedSequenceError);
}

TEST_CASE("tail preamble confirms a good lock and flags a window offset") {
    const Trace trace = training_trace(32, 76);
    PreambleConfig cfg;
    const auto det = detect_preamble(trace.samples, cfg);
    REQUIRE(det.has_value());

    TrainingSequenceSpec seq;
    CHECK(verify_tail_preamble(trace.samples, seq, cfg, det->threshold, det->grid_t_us));

    // A half-chip (T_s) offset smears every tail window across two chips;
    // the correlation of the resulting OR pattern is 8 < 9.
    CHECK_FALSE(verify_tail_preamble(trace.samples, seq, cfg, det->threshold,
                                     det->grid_t_us + seq.ts_us));
    // A grossly wrong lock fails too.
    CHECK_FALSE(verify_tail_preamble(trace.samples, seq, cfg, det->threshold,
                                     det->grid_t_us + 10 * seq.tp_us));
}
