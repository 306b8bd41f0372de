#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adacomm/channel_sim.hpp"

namespace adacomm {

struct ScenarioSpec {
    std::string name;
    ChannelScenario scenario;
    ModulationConfig mod;
};

// Named channel conditions:
//   static          quiet channel, AWGN only
//   walking         sinusoidal motion noise on top of AWGN
//   moving_rx       continuous baseline random-walk drift
//   abrupt          static, then a +0.8 amplitude step at the midpoint
//   four_phase      static / walking / drift / abrupt step, equal phases
//   confusion       weak sparse impacts + strong motion; window-level energy
//                   variance overlaps between classes
//   drift_staircase baseline steps up +0.07 every 1/12th of the duration
//   static_rssi     D=1 scalar amplitude at 1 kHz, T_s=8 ms
//   walking_rssi    RSSI variant with motion noise
std::vector<std::string> preset_names();

ScenarioSpec make_scenario(const std::string& preset, double duration_s, std::uint64_t seed);

}  // namespace adacomm
