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

// Desk-scale synthetic event datasets.
//
// RatePattern: every class owns a vector of per-unit Poisson rates.
// TemporalOrder: two classes whose unit groups G1 and G2 burst with identical
// rates but in opposite order, so per-unit spike totals carry no label
// information and only timing separates the classes.

#ifndef MAPSNN_SYNTHETIC_HPP_
#define MAPSNN_SYNTHETIC_HPP_

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "mapsnn/events.hpp"

namespace mapsnn {

enum class SyntheticTask { kRatePattern, kTemporalOrder };
std::string_view to_string(SyntheticTask task);
SyntheticTask parse_synthetic_task(std::string_view name);

// How RatePattern class prototypes are drawn.
//   random:   rate ~ U[rate_low, rate_high] independently per class and unit
//   disjoint: units split into num_classes blocks; a class drives its own
//             block at rate_high and every other unit at rate_low
enum class RateLayout { kRandom, kDisjoint };
std::string_view to_string(RateLayout layout);
RateLayout parse_rate_layout(std::string_view name);

struct SyntheticTaskSpec {
  SyntheticTask task = SyntheticTask::kRatePattern;
  int num_classes = 2;
  int num_units = 32;
  double duration_ms = 64.0;
  std::uint64_t seed = 0;
  int train_samples = 256;
  int test_samples = 128;

  // RatePattern.
  RateLayout layout = RateLayout::kRandom;
  double rate_low_hz = 20.0;
  double rate_high_hz = 200.0;

  // TemporalOrder. G1 = units [0, group_size), G2 = [group_size, 2 group_size).
  int group_size = 8;
  double burst_rate_hz = 500.0;
  double burst_ms = 4.0;
  double gap_ms = 6.0;       // onset of the second burst after the first
  double onset_ms = 8.0;     // nominal onset of the first burst
  double jitter_ms = 2.0;    // onset drawn from onset_ms +- jitter_ms
  double noise_rate_hz = 10.0;

  // Throws ConfigError.
  void validate() const;
};

struct SyntheticDataset {
  std::vector<LabeledStream> train;
  std::vector<LabeledStream> test;
};

// Pure function of the spec: sample i of a split uses its own generator, so
// any subset can be regenerated independently.
SyntheticDataset generate_synthetic(const SyntheticTaskSpec& spec);

// RatePattern prototypes, [class][unit] in Hz.
std::vector<std::vector<double>> class_rates(const SyntheticTaskSpec& spec);

// Appends homogeneous Poisson events of `unit` on [begin_us, end_us).
void append_poisson(std::vector<Event>& events, std::uint32_t unit, double rate_hz,
                    double begin_us, double end_us, std::mt19937_64& rng);

}  // namespace mapsnn

#endif  // MAPSNN_SYNTHETIC_HPP_
