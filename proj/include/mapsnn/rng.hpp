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

#ifndef MAPSNN_RNG_HPP_
#define MAPSNN_RNG_HPP_

#include <cstdint>
#include <random>

namespace mapsnn {

// Independent, reproducible generator for (seed, stream, index).
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream,
                                std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

namespace streams {
inline constexpr std::uint64_t kWeights = 1;
inline constexpr std::uint64_t kNeurons = 2;
inline constexpr std::uint64_t kKernels = 3;
inline constexpr std::uint64_t kShuffle = 4;
inline constexpr std::uint64_t kPrototype = 5;
inline constexpr std::uint64_t kTrainSamples = 6;
inline constexpr std::uint64_t kTestSamples = 7;
inline constexpr std::uint64_t kGradcheck = 8;
}  // namespace streams

}  // namespace mapsnn

#endif  // MAPSNN_RNG_HPP_
