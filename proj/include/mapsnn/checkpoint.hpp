// Copyright 2026 The MAP-SNN Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Versioned binary checkpoint, little-endian:
//   "MAPCKPT" (7 bytes), version (u32)
//   metadata length (u32), metadata JSON (UTF-8)
//   group count (u32), then per group:
//     name length (u32), name, value count (u64), values (f64)
// Groups are the network parameters ("layer0.weights", ...) followed by the
// Adam moments ("adam.m.layer0.weights", "adam.v.layer0.weights", ...).

#ifndef MAPSNN_CHECKPOINT_HPP_
#define MAPSNN_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "mapsnn/train.hpp"

namespace mapsnn {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  TrainState state;
  TrainOptions options;
};

std::vector<std::uint8_t> serialize_checkpoint(const TrainState& state,
                                               const TrainOptions& options);
Checkpoint parse_checkpoint(std::span<const std::uint8_t> bytes);

void save_checkpoint(const std::filesystem::path& path, const TrainState& state,
                     const TrainOptions& options);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace mapsnn

#endif  // MAPSNN_CHECKPOINT_HPP_
