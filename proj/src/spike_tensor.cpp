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

#include "mapsnn/spike_tensor.hpp"

#include <numeric>
#include <string>

#include "mapsnn/error.hpp"

namespace mapsnn {

std::string_view to_string(SpikePattern pattern) {
  return pattern == SpikePattern::kMsp ? "msp" : "ssp";
}

SpikePattern parse_spike_pattern(std::string_view name) {
  if (name == "msp") return SpikePattern::kMsp;
  if (name == "ssp") return SpikePattern::kSsp;
  throw ConfigError("unknown spike pattern '" + std::string(name) +
                    "' (expected msp or ssp)");
}

std::int64_t SpikeTensor::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
}

}  // namespace mapsnn
