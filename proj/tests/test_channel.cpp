#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "adacomm/channel_sim.hpp"
#include "adacomm/errors.hpp"
#include "adacomm/presets.hpp"
#include "adacomm/rng.hpp"
#include "adacomm/segment.hpp"

using namespace adacomm;

namespace {

double window_energy_variance(std::span<const SampleVector> samples) {
    double s1 = 0.0, s2 = 0.0;
    for (const auto& s : samples) {
        const double e = s.energy();
        s1 += e;
        s2 += e * e;
    }
    const double n = static_cast<double>(samples.size());
    const double mean = s1 / n;
    return n > 1 ? (s2 - n * mean * mean) / (n - 1) : 0.0;
}

std::vector<ScheduleEntry> alternating_schedule(std::int64_t ts_us, std::size_t pairs,
                                                std::int64_t t0 = 0) {
    std::vector<ScheduleEntry> entries;
    std::int64_t t = t0;
    for (std::size_t i = 0; i < pairs; ++i) {
        entries.push_back({t, ts_us, WindowKind::Sym1});
        t += ts_us;
        entries.push_back({t, ts_us, WindowKind::Sym0});
        t += ts_us;
    }
    return entries;
}

ChannelScenario quiet_scenario(std::int64_t ms, double awgn, std::uint64_t seed,
                               std::size_t dims = 12) {
    ChannelScenario sc;
    sc.segments = {{ms, 0.0, std::nullopt, awgn, std::nullopt}};
    sc.subcarriers = dims;
    sc.seed = seed;
    if (dims == 1) sc.sample_rate_hz = 1000.0;
    return sc;
}

}  // namespace

TEST_CASE("sample counts are poisson with a floor of one") {
    Rng rng(3);
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const int c = sample_count_for_window(2000.0, 4000, rng);
        CHECK(c >= 1);
        sum += c;
    }
    CHECK(sum / n == doctest::Approx(8.0).epsilon(0.02));
    CHECK_THROWS_AS(sample_count_for_window(0.0, 4000, rng), ConfigError);
}

TEST_CASE("generator is deterministic in the seed") {
    const auto schedule = alternating_schedule(4000, 20);
    const auto sc = quiet_scenario(200, 0.04, 77);
    const Trace a = generate_trace(sc, ModulationConfig{}, schedule);
    const Trace b = generate_trace(sc, ModulationConfig{}, schedule);
    REQUIRE(a.samples.size() == b.samples.size());
    bool identical = true;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        if (a.samples[i].t_us != b.samples[i].t_us) identical = false;
        if (a.samples[i].values != b.samples[i].values) identical = false;
    }
    CHECK(identical);

    auto sc2 = sc;
    sc2.seed = 78;
    const Trace c = generate_trace(sc2, ModulationConfig{}, schedule);
    CHECK(c.samples.size() > 0);
    bool differs = c.samples.size() != a.samples.size();
    for (std::size_t i = 0; !differs && i < std::min(c.samples.size(), a.samples.size()); ++i) {
        differs = c.samples[i].values != a.samples[i].values;
    }
    CHECK(differs);
}

TEST_CASE("windows always meet the sample floor and amplitudes stay non-negative") {
    ChannelScenario sc = quiet_scenario(5000, 0.04, 5);
    sc.min_samples_per_window = 5;
    ChannelGenerator gen(sc, ModulationConfig{});
    std::size_t min_n = SIZE_MAX;
    double min_amp = 1e300;
    while (gen.now_us() + 4000 <= gen.end_us()) {
        const auto win = gen.emit_window(WindowKind::Sym1, 4000);
        min_n = std::min(min_n, win.samples.size());
        for (const auto& s : win.samples) {
            for (double v : s.values) min_amp = std::min(min_amp, v);
        }
        // Timestamps strictly increase inside a window.
        for (std::size_t i = 1; i < win.samples.size(); ++i) {
            CHECK(win.samples[i].t_us > win.samples[i - 1].t_us);
        }
    }
    CHECK(min_n >= 5);
    CHECK(min_amp >= 0.0);
}

TEST_CASE("amplitude clamp holds under a hostile downward jump") {
    ChannelScenario sc;
    sc.segments = {{500, 0.0, std::nullopt, 0.04, std::nullopt},
                   {500, 0.0, std::nullopt, 0.5, AbruptJump{{-50.0}}}};
    sc.seed = 9;
    const Trace t = generate_trace(sc, ModulationConfig{}, {});
    double lo = 1e300;
    for (const auto& s : t.samples) {
        for (double v : s.values) lo = std::min(lo, v);
    }
    CHECK(lo >= 0.0);
}

TEST_CASE("strong modulation separates classes by window variance") {
    // impact_prob 1 and magnitude far above the noise floor: zero overlap.
    ModulationConfig mod;
    mod.impact_prob = 1.0;
    mod.impact_magnitude = 1.0;
    const auto schedule = alternating_schedule(4000, 50);
    const Trace trace = generate_trace(quiet_scenario(500, 0.02, 21), mod, schedule);

    double max_sym0 = 0.0, min_sym1 = 1e300;
    for (const auto& mark : trace.truth) {
        if (mark.kind != TruthKind::Sym0 && mark.kind != TruthKind::Sym1) continue;
        const auto frame = segment_stream(trace.samples, mark.t_us, 4000, 1);
        const double v = window_energy_variance(frame[0].samples);
        if (mark.kind == TruthKind::Sym0) max_sym0 = std::max(max_sym0, v);
        if (mark.kind == TruthKind::Sym1) min_sym1 = std::min(min_sym1, v);
    }
    CHECK(max_sym0 < min_sym1);
}

TEST_CASE("disabling modulation makes symbol windows statistically flat") {
    ModulationConfig mod;
    mod.impact_prob = 0.0;
    const auto schedule = alternating_schedule(4000, 100);
    const Trace trace = generate_trace(quiet_scenario(1000, 0.04, 33), mod, schedule);

    // With impact_prob = 0 both classes are pure noise: variance distributions
    // must interleave heavily (no threshold separates them).
    std::vector<double> v0, v1;
    for (const auto& mark : trace.truth) {
        if (mark.kind != TruthKind::Sym0 && mark.kind != TruthKind::Sym1) continue;
        const auto frame = segment_stream(trace.samples, mark.t_us, 4000, 1);
        const double v = window_energy_variance(frame[0].samples);
        (mark.kind == TruthKind::Sym0 ? v0 : v1).push_back(v);
    }
    const double max0 = *std::max_element(v0.begin(), v0.end());
    const double min0 = *std::min_element(v0.begin(), v0.end());
    const double max1 = *std::max_element(v1.begin(), v1.end());
    const double min1 = *std::min_element(v1.begin(), v1.end());
    CHECK(max0 > min1);
    CHECK(max1 > min0);
}

TEST_CASE("idle-window variance concentrates near the awgn power") {
    // D = 1: per-window sample variance estimates awgn_sigma^2 directly.
    const double sigma = 0.04;
    ChannelScenario sc = quiet_scenario(8000, sigma, 13, 1);
    ChannelGenerator gen(sc, ModulationConfig{});
    double sum = 0.0;
    int count = 0;
    while (gen.now_us() + 8000 <= gen.end_us() && count < 1000) {
        const auto win = gen.emit_window(WindowKind::Idle, 8000);
        sum += window_energy_variance(win.samples);
        ++count;
    }
    REQUIRE(count == 1000);
    CHECK(sum / count == doctest::Approx(sigma * sigma).epsilon(0.2));
}

TEST_CASE("abrupt jump shifts the baseline at the segment boundary") {
    ChannelScenario sc;
    sc.segments = {{1000, 0.0, std::nullopt, 0.01, std::nullopt},
                   {1000, 0.0, std::nullopt, 0.01, AbruptJump{{0.8}}}};
    sc.seed = 4;
    const Trace t = generate_trace(sc, ModulationConfig{}, {});
    double before = 0.0, after = 0.0;
    int nb = 0, na = 0;
    for (const auto& s : t.samples) {
        if (s.t_us < 1000000) {
            before += s.energy();
            ++nb;
        } else {
            after += s.energy();
            ++na;
        }
    }
    CHECK(after / na - before / nb == doctest::Approx(0.8).epsilon(0.05));
}

TEST_CASE("schedules are validated") {
    const auto sc = quiet_scenario(100, 0.04, 1);
    std::vector<ScheduleEntry> past_end = {{96000, 8000, WindowKind::Sym1}};
    CHECK_THROWS_AS(generate_trace(sc, ModulationConfig{}, past_end), ScheduleOutOfRangeError);

    std::vector<ScheduleEntry> overlap = {{0, 8000, WindowKind::Sym1},
                                          {4000, 8000, WindowKind::Sym0}};
    CHECK_THROWS_AS(generate_trace(sc, ModulationConfig{}, overlap), ConfigError);

    ChannelGenerator gen(sc, ModulationConfig{});
    CHECK_THROWS_AS(gen.emit_window(WindowKind::Idle, 101000), ScheduleOutOfRangeError);
}

TEST_CASE("trace truth marks cover the full duration in order") {
    const auto schedule = alternating_schedule(4000, 3, 20000);
    const Trace t = generate_trace(quiet_scenario(100, 0.04, 2), ModulationConfig{}, schedule);
    REQUIRE(!t.truth.empty());
    CHECK(t.truth.front().t_us == 0);
    CHECK(t.truth.front().kind == TruthKind::Idle);
    for (std::size_t i = 1; i < t.truth.size(); ++i) {
        CHECK(t.truth[i].t_us > t.truth[i - 1].t_us);
    }
    // Scheduled marks present with the right kinds.
    bool saw_sym1_at_20ms = false;
    for (const auto& m : t.truth) {
        if (m.t_us == 20000 && m.kind == TruthKind::Sym1) saw_sym1_at_20ms = true;
    }
    CHECK(saw_sym1_at_20ms);
    // Stream reaches the scenario end.
    CHECK(t.samples.back().t_us < 100000);
    CHECK(t.truth.back().t_us >= 96000);
}

TEST_CASE("confusion preset overlaps the class variance distributions") {
    // Motion noise comparable to the impact magnitude: some clean windows
    // must out-vary some impacted windows inside 60 s.
    const auto spec = make_scenario("confusion", 60.0, 17);
    std::vector<ScheduleEntry> schedule = alternating_schedule(spec.mod.ts_us, 3000);
    const Trace trace = generate_trace(spec.scenario, spec.mod, schedule);

    double max_sym0 = 0.0, min_sym1 = 1e300;
    for (const auto& mark : trace.truth) {
        if (mark.kind != TruthKind::Sym0 && mark.kind != TruthKind::Sym1) continue;
        const auto frame = segment_stream(trace.samples, mark.t_us, spec.mod.ts_us, 1);
        const double v = window_energy_variance(frame[0].samples);
        if (mark.kind == TruthKind::Sym0) max_sym0 = std::max(max_sym0, v);
        if (mark.kind == TruthKind::Sym1) min_sym1 = std::min(min_sym1, v);
    }
    CHECK(max_sym0 > min_sym1);
}

TEST_CASE("presets instantiate with the advertised shapes") {
    for (const auto& name : preset_names()) {
        const auto spec = make_scenario(name, 30.0, 1);
        CHECK(spec.scenario.duration_us() == 30000000);
        if (name.find("rssi") != std::string::npos) {
            CHECK(spec.scenario.subcarriers == 1);
            CHECK(spec.mod.ts_us == 8000);
        } else {
            CHECK(spec.scenario.subcarriers == 12);
            CHECK(spec.mod.ts_us == 4000);
        }
        // Every preset must be generatable end to end.
        ChannelGenerator gen(spec.scenario, spec.mod);
        CHECK_NOTHROW(gen.emit_window(WindowKind::Idle, spec.mod.ts_us));
    }
    CHECK_THROWS_AS(make_scenario("bogus", 30.0, 1), ConfigError);
    CHECK(make_scenario("four_phase", 30.0, 1).scenario.segments.size() == 4);
    CHECK(make_scenario("drift_staircase", 30.0, 1).scenario.segments.size() == 12);
}
