#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "adacomm/types.hpp"

namespace adacomm {

// Partitions a time-sorted sample stream into `count` consecutive symbol
// windows of ts_us starting at t0_us. Frame k holds exactly the samples with
// timestamp in [t0 + k*ts, t0 + (k+1)*ts). A window that captures no samples
// throws EmptyWindowError.
std::vector<Frame> segment_stream(std::span<const SampleVector> samples,
                                  std::int64_t t0_us, std::int64_t ts_us,
                                  std::size_t count);

}  // namespace adacomm
