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

#ifndef MAPSNN_SPIKE_TENSOR_HPP_
#define MAPSNN_SPIKE_TENSOR_HPP_

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace mapsnn {

// MSP carries integer counts per step; SSP clamps them to {0, 1}.
enum class SpikePattern { kMsp, kSsp };

std::string_view to_string(SpikePattern pattern);
SpikePattern parse_spike_pattern(std::string_view name);

// Spike counts indexed [step][unit].
struct SpikeTensor {
  std::size_t steps = 0;
  std::size_t units = 0;
  double dt = 1.0;  // ms
  SpikePattern pattern = SpikePattern::kMsp;
  std::vector<std::int32_t> counts;
  // Events that fell at or beyond steps * dt and were dropped.
  std::uint64_t dropped = 0;

  SpikeTensor() = default;
  SpikeTensor(std::size_t steps_, std::size_t units_, double dt_ = 1.0,
              SpikePattern pattern_ = SpikePattern::kMsp)
      : steps(steps_),
        units(units_),
        dt(dt_),
        pattern(pattern_),
        counts(steps_ * units_, 0) {}

  std::int32_t& at(std::size_t t, std::size_t u) { return counts[t * units + u]; }
  std::int32_t at(std::size_t t, std::size_t u) const {
    return counts[t * units + u];
  }
  std::int64_t total() const;
};

}  // namespace mapsnn

#endif  // MAPSNN_SPIKE_TENSOR_HPP_
