#pragma once

#include <string>

#include "adacomm/model.hpp"

namespace adacomm::nn {

// Versioned JSON checkpoint: model config + flat parameter vector.
// Doubles use shortest-round-trip formatting, so load(save(p)) == p exactly.
void save_checkpoint(const std::string& path, const ModelParams& params);
ModelParams load_checkpoint(const std::string& path);

std::string checkpoint_to_json(const ModelParams& params);
ModelParams checkpoint_from_json(const std::string& text);

}  // namespace adacomm::nn
