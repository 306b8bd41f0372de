#include "adacomm/segment.hpp"

#include <algorithm>
#include <string>

#include "adacomm/errors.hpp"

namespace adacomm {

std::vector<Frame> segment_stream(std::span<const SampleVector> samples,
                                  std::int64_t t0_us, std::int64_t ts_us,
                                  std::size_t count) {
    if (ts_us <= 0) throw ConfigError("segment_stream: ts_us must be positive");
    if (count < 1) throw ConfigError("segment_stream: count must be >= 1");

    std::vector<Frame> frames;
    frames.reserve(count);

    // Skip anything before the first window.
    std::size_t i = 0;
    while (i < samples.size() && samples[i].t_us < t0_us) ++i;

    for (std::size_t k = 0; k < count; ++k) {
        Frame frame;
        frame.t_start_us = t0_us + static_cast<std::int64_t>(k) * ts_us;
        frame.t_end_us = frame.t_start_us + ts_us;
        while (i < samples.size() && samples[i].t_us < frame.t_end_us) {
            frame.samples.push_back(samples[i]);
            ++i;
        }
        if (frame.samples.empty())
            throw EmptyWindowError("segment_stream: window " + std::to_string(k) +
                                   " starting at " + std::to_string(frame.t_start_us) +
                                   "us captured no samples");
        frames.push_back(std::move(frame));
    }
    return frames;
}

}  // namespace adacomm
