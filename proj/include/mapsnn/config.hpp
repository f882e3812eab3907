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

// Experiment configuration. The JSON document is validated in full before
// any work starts: unknown keys, wrong types and inconsistent shapes are
// ConfigErrors naming the offending key.
//
// {
//   "network": {"widths": [32, 32, 2], "dt": 1.0, "T": 64, "mode": "sfa",
//               "pattern": "msp", "readout": "spike_count_sum", "s_max": 64,
//               "init": {"v_threshold": 1.0, "tau_decay": 0.7, "q": 2.0,
//                        "jitter": 0.0, "center_weights": true}},
//   "synapse": {"kernel_size": 8, "trainable": true, "seed": 7},
//   "train":   {"lr": 1e-3, "beta1": 0.9, "beta2": 0.999, "eps": 1e-8,
//               "batch": 32, "epochs": 20, "seed": 0, "threads": 1,
//               "resume_from": "model.ckpt"},
//   "data":    {"source": "synthetic" | "nmnist" | "portable",
//               "synthetic": {...SyntheticTaskSpec fields...},
//               "train_manifest": "train.csv", "test_manifest": "test.csv",
//               "nmnist_merge_polarity": true},
//   "output":  {"csv": "metrics.csv", "checkpoint": "model.ckpt",
//               "record_wall_time": false}
// }
//
// "network" and "data" are required; everything else has defaults. Seeds
// left out of "synapse" and "data.synthetic" follow train.seed.

#ifndef MAPSNN_CONFIG_HPP_
#define MAPSNN_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "mapsnn/network.hpp"
#include "mapsnn/spike_tensor.hpp"
#include "mapsnn/synthetic.hpp"
#include "mapsnn/train.hpp"

namespace mapsnn {

enum class DataSource { kSynthetic, kNmnist, kPortable };
std::string_view to_string(DataSource source);

struct ExperimentConfig {
  NetworkSpec network;
  SpikePattern pattern = SpikePattern::kMsp;
  InitOptions init;

  bool kernel_trainable = true;
  std::optional<std::uint64_t> kernel_seed;

  TrainOptions train;
  std::string resume_from;

  DataSource source = DataSource::kSynthetic;
  SyntheticTaskSpec synthetic;
  std::optional<std::uint64_t> data_seed;
  std::string train_manifest;
  std::string test_manifest;
  bool nmnist_merge_polarity = true;

  std::string csv = "metrics.csv";
  std::string checkpoint = "model.ckpt";
  bool record_wall_time = false;

  // Directory relative paths in "data" resolve against.
  std::filesystem::path base_dir;

  std::uint64_t effective_kernel_seed() const {
    return kernel_seed.value_or(train.seed);
  }
  std::uint64_t effective_data_seed() const { return data_seed.value_or(train.seed); }

  // Cross-section checks (mode vs pattern, widths vs data shape). Throws
  // ConfigError.
  void validate() const;
};

ExperimentConfig parse_config(std::string_view json_text,
                              const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical JSON form (all defaults filled in).
std::string to_json(const ExperimentConfig& config);

}  // namespace mapsnn

#endif  // MAPSNN_CONFIG_HPP_
