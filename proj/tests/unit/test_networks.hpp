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

// Hand-specified networks shared by the unit tests. The parameter values
// mirror tests/oracles/oracles.py, which produced oracle_values.hpp.

#ifndef MAPSNN_TESTS_TEST_NETWORKS_HPP_
#define MAPSNN_TESTS_TEST_NETWORKS_HPP_

#include <algorithm>
#include <filesystem>
#include <vector>

#include "mapsnn/network.hpp"

namespace testnet {

inline mapsnn::Layer make_layer(std::vector<std::vector<double>> w, std::vector<double> vth,
                                std::vector<double> tau, std::vector<double> q,
                                std::vector<double> a, std::vector<double> b,
                                std::vector<double> d, mapsnn::NeuronMode mode,
                                int kernel_size) {
  mapsnn::Layer l;
  l.width = w.size();
  l.in_width = w.front().size();
  for (const auto& row : w) l.weights.insert(l.weights.end(), row.begin(), row.end());
  l.neurons.mode = mode;
  l.neurons.v_threshold = std::move(vth);
  l.neurons.tau_decay = std::move(tau);
  l.neurons.q = std::move(q);
  l.kernel.a = std::move(a);
  l.kernel.b = std::move(b);
  l.kernel.delay = std::move(d);
  l.kernel.kernel_size = kernel_size;
  l.kernel.dt = 1.0;
  return l;
}

// 4-3-2, T = 8, four taps.
inline mapsnn::Network oracle_net(mapsnn::NeuronMode mode, bool relaxed) {
  mapsnn::NetworkSpec spec;
  spec.widths = {4, 3, 2};
  spec.dt = 1.0;
  spec.steps = 8;
  spec.mode = mode;
  spec.kernel_size = 4;
  spec.relaxed = relaxed;
  std::vector<mapsnn::Layer> layers;
  layers.push_back(make_layer({{0.9, -0.4, 0.6, 0.3}, {0.5, 0.8, -0.2, 0.7}, {-0.3, 0.6, 0.9, 0.4}},
                              {1.0, 0.8, 1.2}, {0.7, 0.6, 0.8}, {2.0, 1.5, 3.0},
                              {0.3, 0.25, 0.4, 0.2}, {1.2, 0.9, 1.5, 1.1},
                              {0.3, 0.05, 0.6, 0.15}, mode, 4));
  layers.push_back(make_layer({{0.8, 0.5, 0.6}, {-0.4, 0.9, 0.5}}, {0.9, 1.1}, {0.65, 0.75},
                              {2.5, 1.8}, {0.35, 0.3, 0.22}, {1.0, 1.3, 0.8},
                              {0.1, 0.45, 0.05}, mode, 4));
  return mapsnn::Network(spec, std::move(layers));
}

inline const std::vector<std::vector<int>> kOracleSpikes = {
    {2, 0, 1, 0}, {1, 3, 0, 1}, {0, 1, 2, 0}, {3, 0, 0, 2},
    {0, 2, 1, 1}, {1, 0, 3, 0}, {0, 1, 0, 2}, {2, 1, 1, 0}};

inline constexpr int kOracleLabel = 1;

// Input series [T][4]; SSP inputs are clamped to one spike per step.
inline std::vector<double> oracle_input(mapsnn::NeuronMode mode, double scale) {
  std::vector<double> x;
  for (const auto& row : kOracleSpikes) {
    for (int c : row) {
      x.push_back((mode == mapsnn::NeuronMode::kSsp ? std::min(c, 1) : c) * scale);
    }
  }
  return x;
}

inline std::filesystem::path fixture(const char* name) {
  return std::filesystem::path(MAPSNN_FIXTURE_DIR) / name;
}

// Scratch directory unique to one test case, emptied on creation.
inline std::filesystem::path scratch(const char* name) {
  auto p = std::filesystem::temp_directory_path() / "mapsnn_unit" / name;
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testnet

#endif  // MAPSNN_TESTS_TEST_NETWORKS_HPP_
