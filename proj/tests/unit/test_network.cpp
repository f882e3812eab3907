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

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "mapsnn/error.hpp"
#include "mapsnn/network.hpp"
#include "oracle_values.hpp"
#include "test_networks.hpp"

using namespace mapsnn;

namespace {

SpikeTensor oracle_tensor(NeuronMode mode) {
  const bool ssp = mode == NeuronMode::kSsp;
  SpikeTensor x(8, 4, 1.0, ssp ? SpikePattern::kSsp : SpikePattern::kMsp);
  for (std::size_t t = 0; t < 8; ++t) {
    for (std::size_t u = 0; u < 4; ++u) {
      const int c = testnet::kOracleSpikes[t][u];
      x.at(t, u) = ssp ? std::min(c, 1) : c;
    }
  }
  return x;
}

void check_forward(NeuronMode mode, const double* logits, const double* totals) {
  const Network net = testnet::oracle_net(mode, false);
  const ForwardResult r = net.forward(oracle_tensor(mode), false);
  REQUIRE(r.logits.size() == 2);
  REQUIRE(r.spike_totals.size() == 2);
  for (int i = 0; i < 2; ++i) {
    CHECK(r.logits[i] == logits[i]);
    CHECK(r.spike_totals[i] == totals[i]);
  }
}

}  // namespace

TEST_CASE("integer forward pass matches the reference in every mode") {
  SUBCASE("sfa") { check_forward(NeuronMode::kSfa, oracle::kForwardSfaLogits, oracle::kForwardSfaTotals); }
  SUBCASE("linear") {
    check_forward(NeuronMode::kLinear, oracle::kForwardLinearLogits, oracle::kForwardLinearTotals);
  }
  SUBCASE("ssp") { check_forward(NeuronMode::kSsp, oracle::kForwardSspLogits, oracle::kForwardSspTotals); }
}

TEST_CASE("SFA never fires more than Linear on the same network") {
  const SpikeTensor x = oracle_tensor(NeuronMode::kSfa);
  const ForwardResult sfa = testnet::oracle_net(NeuronMode::kSfa, false).forward(x, false);
  const ForwardResult lin = testnet::oracle_net(NeuronMode::kLinear, false).forward(x, false);
  CHECK(sfa.spike_totals[0] <= lin.spike_totals[0]);
}

TEST_CASE("tape records every intermediate") {
  const Network net = testnet::oracle_net(NeuronMode::kLinear, false);
  const ForwardResult r = net.forward(oracle_tensor(NeuronMode::kLinear), true);
  REQUIRE(r.tape.has_value());
  const Tape& tape = *r.tape;
  CHECK(tape.steps == 8);
  REQUIRE(tape.layers.size() == 2);
  CHECK(tape.layers[0].v.size() == 8 * 3);
  CHECK(tape.layers[1].o.size() == 8 * 3);
  const double total = std::accumulate(tape.layers[1].s.begin(), tape.layers[1].s.end(), 0.0);
  CHECK(total == oracle::kForwardLinearTotals[1]);
}

TEST_CASE("SSP network rejects multi-spike input") {
  const Network net = testnet::oracle_net(NeuronMode::kSsp, false);
  SpikeTensor x = oracle_tensor(NeuronMode::kSsp);
  x.at(0, 0) = 2;
  CHECK_THROWS_AS(net.forward(x, false), ConfigError);
}

TEST_CASE("shape mismatches name the widths") {
  const Network net = testnet::oracle_net(NeuronMode::kSfa, false);
  SpikeTensor wrong(8, 5);
  CHECK_THROWS_AS(net.forward(wrong, false), ConfigError);
  SpikeTensor short_t(7, 4);
  CHECK_THROWS_AS(net.forward(short_t, false), ConfigError);

  NetworkSpec spec = net.spec();
  std::vector<Layer> layers = net.layers();
  spec.widths = {4, 5, 2};
  try {
    Network bad(spec, layers);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("4 -> 5") != std::string::npos);
  }
}

TEST_CASE("cross-entropy and its gradient") {
  const std::vector<double> logits = {1.0, 2.0, 3.0};
  std::vector<double> grad;
  CHECK(cross_entropy(logits, 2, &grad) == doctest::Approx(oracle::kCrossEntropy123Label2).epsilon(1e-15));
  REQUIRE(grad.size() == 3);
  CHECK(std::accumulate(grad.begin(), grad.end(), 0.0) == doctest::Approx(0.0));
  CHECK(grad[2] < 0.0);
  // Large logits stay finite.
  const std::vector<double> big = {1000.0, 0.0};
  CHECK(std::isfinite(cross_entropy(big, 1)));
  CHECK_THROWS_AS(cross_entropy(logits, 3), ConfigError);
}

TEST_CASE("predict breaks ties toward the lowest index") {
  const std::vector<double> a = {3.0, 5.0, 5.0};
  CHECK(predict(a) == 1);
  const std::vector<double> zeros = {0.0, 0.0};
  CHECK(predict(zeros) == 0);
}

TEST_CASE("initialization is seeded and rows are centered") {
  NetworkSpec spec;
  spec.widths = {6, 5, 3};
  spec.steps = 4;
  InitOptions init;
  const Network a = Network::initialize(spec, init, 9, 10);
  const Network b = Network::initialize(spec, init, 9, 10);
  const Network c = Network::initialize(spec, init, 9, 11);
  const Network d = Network::initialize(spec, init, 8, 10);
  CHECK(a.layers()[0].weights == b.layers()[0].weights);
  CHECK(a.layers()[0].kernel.a == b.layers()[0].kernel.a);
  CHECK(a.layers()[0].weights == c.layers()[0].weights);
  CHECK(a.layers()[0].kernel.a != c.layers()[0].kernel.a);
  CHECK(a.layers()[0].weights != d.layers()[0].weights);
  for (const Layer& l : a.layers()) {
    for (std::size_t k = 0; k < l.width; ++k) {
      double sum = 0.0;
      for (std::size_t j = 0; j < l.in_width; ++j) sum += l.weights[k * l.in_width + j];
      CHECK(sum == doctest::Approx(0.0).epsilon(1e-12));
    }
    CHECK(l.neurons.v_threshold == std::vector<double>(l.width, 1.0));
  }
  init.center_weights = false;
  const Network e = Network::initialize(spec, init, 9, 10);
  CHECK(e.layers()[0].weights != a.layers()[0].weights);
}

TEST_CASE("parameter groups cover every trainable value") {
  Network net = testnet::oracle_net(NeuronMode::kSfa, false);
  const auto groups = net.parameter_groups();
  CHECK(groups.size() == 14);
  std::size_t total = 0;
  for (const auto& g : groups) total += g.values.size();
  CHECK(total == (12 + 3 * 3 + 4 * 3) + (6 + 2 * 3 + 3 * 3));
  CHECK(groups[0].name == "layer0.weights");
  groups[0].values[0] = 42.0;
  CHECK(net.layers()[0].weights[0] == 42.0);

  GradBuffers g = net.zero_grads();
  CHECK(g.all_finite());
  g.layers[1].q[1] = std::nan("");
  CHECK_FALSE(g.all_finite());
  CHECK(g.first_non_finite().find("layer1.q") != std::string::npos);
}

TEST_CASE("spec validation") {
  NetworkSpec spec;
  spec.widths = {4};
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.widths = {4, 2};
  spec.dt = 0.0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.dt = 1.0;
  spec.steps = 0;
  CHECK_THROWS_AS(spec.validate(), ConfigError);
  spec.steps = 3;
  CHECK_NOTHROW(spec.validate());
}
