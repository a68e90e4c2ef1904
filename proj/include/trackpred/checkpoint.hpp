// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>

#include "trackpred/model.hpp"
#include "trackpred/train.hpp"

namespace trackpred {

struct Checkpoint {
  ModelParams params;
  TrainConfig train;
};

/// Versioned binary container; parameters round-trip bit-identically.
void write_checkpoint(const std::filesystem::path& path, const ModelParams& params, const TrainConfig& train);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace trackpred
