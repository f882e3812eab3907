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
#include <limits>
#include <random>
#include <vector>

#include "mapsnn/dynamics.hpp"
#include "mapsnn/error.hpp"

using namespace mapsnn;

TEST_CASE("membrane update decays the unconsumed potential") {
  CHECK(membrane_update(2.0, 0.5, 0.7, 0.25) == doctest::Approx(0.7 * 1.5 + 0.25));
  NeuronParams p = NeuronParams::uniform(NeuronMode::kSfa, 2, 1.0, 0.5);
  NeuronState s(2);
  s.v = {1.0, 3.0};
  s.u = {1.0, 1.0};
  const std::vector<double> i = {0.0, 0.5};
  NeuronState next = membrane_update(s, p, i);
  CHECK(next.v[0] == 0.0);
  CHECK(next.v[1] == doctest::Approx(1.5));
}

TEST_CASE("non-finite current raises a numeric fault with its location") {
  NeuronParams p = NeuronParams::uniform(NeuronMode::kLinear, 1);
  NeuronState s(1);
  const std::vector<double> i = {std::numeric_limits<double>::quiet_NaN()};
  try {
    membrane_update(s, p, i, 2, 5);
    FAIL("expected NumericFault");
  } catch (const NumericFault& e) {
    CHECK(e.layer() == 2);
    CHECK(e.step() == 5);
  }
  const std::vector<double> wrong = {0.0, 0.0};
  CHECK_THROWS_AS(membrane_update(s, p, wrong), ConfigError);
}

TEST_CASE("SFA spikes are the largest count whose consumed potential fits") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ratio(0.0, 100.0);
  std::uniform_real_distribution<double> qd(1.0 + 1e-3, 16.0);
  for (int n = 0; n < 2000; ++n) {
    const double vth = 0.8;
    const double v = ratio(rng) * vth;
    const double q = qd(rng);
    const double nstar = spike_intensity(NeuronMode::kSfa, v, vth, q);
    const double s = spike_count(NeuronMode::kSfa, nstar, v, vth, q, 64, false);
    const double u = consumed_potential(NeuronMode::kSfa, s, v, vth, q);
    CHECK(s == std::floor(s));
    CHECK(u <= v);
    CHECK(u == doctest::Approx((std::pow(q, s) - 1.0) / (q - 1.0) * vth));
    if (s < 64) {
      CHECK(consumed_potential(NeuronMode::kSfa, s + 1, v, vth, q) > v);
    }
    const double nlin = spike_intensity(NeuronMode::kLinear, v, vth, q);
    CHECK(s <= spike_count(NeuronMode::kLinear, nlin, v, vth, q, 64, false));
  }
}

TEST_CASE("SFA intensity approaches the linear one as q tends to 1") {
  const double v = 3.7;
  const double vth = 1.0;
  const double lin = spike_intensity(NeuronMode::kLinear, v, vth, 2.0);
  CHECK(spike_intensity(NeuronMode::kSfa, v, vth, 1.0 + 1e-9) ==
        doctest::Approx(lin).epsilon(1e-6));
  CHECK(spike_intensity(NeuronMode::kSfa, v, vth, 1.5) < lin);
}

TEST_CASE("linear and SSP counts") {
  CHECK(spike_count(NeuronMode::kLinear, 3.99, 3.99, 1.0, 2.0, 64, false) == 3.0);
  CHECK(spike_count(NeuronMode::kLinear, 500.0, 500.0, 1.0, 2.0, 64, false) == 64.0);
  CHECK(spike_count(NeuronMode::kLinear, -2.0, -2.0, 1.0, 2.0, 64, false) == 0.0);
  CHECK(spike_count(NeuronMode::kSsp, 5.0, 5.0, 1.0, 2.0, 64, false) == 1.0);
  CHECK(spike_count(NeuronMode::kSsp, 0.999, 0.999, 1.0, 2.0, 64, false) == 0.0);
  // An SSP spike resets the whole potential.
  CHECK(consumed_potential(NeuronMode::kSsp, 1.0, 2.5, 1.0, 2.0) == 2.5);
  CHECK(consumed_potential(NeuronMode::kLinear, 3.0, 3.5, 1.0, 2.0) == 3.0);
}

TEST_CASE("relaxed counts follow the clamped intensity") {
  CHECK(spike_count(NeuronMode::kSfa, 2.3, 0.0, 1.0, 2.0, 64, true) == 2.3);
  CHECK(spike_count(NeuronMode::kSsp, 0.4, 0.4, 1.0, 2.0, 64, true) == 0.4);
  CHECK(spike_count(NeuronMode::kSsp, 1.4, 1.4, 1.0, 2.0, 64, true) == 1.0);
  CHECK(spike_surrogate(NeuronMode::kSfa, 10.0, 64, false) == 1.0);
  CHECK(spike_surrogate(NeuronMode::kSfa, 70.0, 64, false) == 0.0);
  CHECK(spike_surrogate(NeuronMode::kSsp, 1.2, 64, false) == 1.0);
  CHECK(spike_surrogate(NeuronMode::kSsp, 2.0, 64, false) == 0.0);
}

TEST_CASE("intensity and consumed-potential derivatives match finite differences") {
  const double h = 1e-6;
  for (NeuronMode m : {NeuronMode::kSfa, NeuronMode::kLinear, NeuronMode::kSsp}) {
    const double v = 2.3;
    const double vth = 0.9;
    const double q = 1.7;
    const IntensityGrad g = spike_intensity_grad(m, v, vth, q);
    auto f = [&](double vv, double tt, double qq) { return spike_intensity(m, vv, tt, qq); };
    CHECK(g.dv == doctest::Approx((f(v + h, vth, q) - f(v - h, vth, q)) / (2 * h)).epsilon(1e-6));
    CHECK(g.dv_threshold ==
          doctest::Approx((f(v, vth + h, q) - f(v, vth - h, q)) / (2 * h)).epsilon(1e-6));
    CHECK(g.dq == doctest::Approx((f(v, vth, q + h) - f(v, vth, q - h)) / (2 * h)).epsilon(1e-6));

    const double s = 1.6;
    const ConsumedGrad c = consumed_potential_grad(m, s, v, vth, q);
    auto u = [&](double ss, double vv, double tt, double qq) {
      return consumed_potential(m, ss, vv, tt, qq);
    };
    CHECK(c.ds == doctest::Approx((u(s + h, v, vth, q) - u(s - h, v, vth, q)) / (2 * h)).epsilon(1e-6));
    CHECK(c.dv == doctest::Approx((u(s, v + h, vth, q) - u(s, v - h, vth, q)) / (2 * h)).epsilon(1e-6));
    CHECK(c.dv_threshold ==
          doctest::Approx((u(s, v, vth + h, q) - u(s, v, vth - h, q)) / (2 * h)).epsilon(1e-6));
    CHECK(c.dq == doctest::Approx((u(s, v, vth, q + h) - u(s, v, vth, q - h)) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("projection clips parameters into range") {
  NeuronParams p = NeuronParams::uniform(NeuronMode::kSfa, 1);
  p.v_threshold = {-1.0};
  p.tau_decay = {1.5};
  p.q = {0.5};
  p.project();
  CHECK(p.v_threshold[0] == kThresholdMin);
  CHECK(p.tau_decay[0] == kTauDecayMax);
  CHECK(p.q[0] == kQMin);
}

TEST_CASE("vector fire dispatches on mode") {
  const std::vector<double> v = {0.5, 2.0, 7.5};
  NeuronParams p = NeuronParams::uniform(NeuronMode::kLinear, 3, 1.0, 0.7, 2.0);
  StepOutput lin = fire(v, p);
  CHECK(lin.s == std::vector<double>{0.0, 2.0, 7.0});
  p.mode = NeuronMode::kSfa;
  StepOutput sfa = fire(v, p);
  // 2^s - 1 <= v: s = 0, 1, 3.
  CHECK(sfa.s == std::vector<double>{0.0, 1.0, 3.0});
  p.mode = NeuronMode::kSsp;
  CHECK(fire(v, p).s == std::vector<double>{0.0, 1.0, 1.0});
  CHECK(parse_neuron_mode("linear") == NeuronMode::kLinear);
  CHECK_THROWS_AS(parse_neuron_mode("lif"), ConfigError);
}

TEST_CASE("SFA fires strictly fewer spikes than Linear once v reaches (q + 1) V_th") {
  // Holds for q >= 2; for q < 2 both counts can still be equal there.
  for (double q : {2.0, 2.5, 4.0, 16.0}) {
    for (double m = q + 1.0; m < 60.0; m += 0.37) {
      const double v = m * 0.9;
      const double sfa = spike_count(NeuronMode::kSfa, spike_intensity(NeuronMode::kSfa, v, 0.9, q),
                                     v, 0.9, q, 64, false);
      const double lin = spike_count(NeuronMode::kLinear,
                                     spike_intensity(NeuronMode::kLinear, v, 0.9, q), v, 0.9, q,
                                     64, false);
      CHECK(sfa < lin);
    }
  }
}

TEST_CASE("under a constant step input SFA stays at or below Linear every step") {
  // The per-step SFA count need not fall monotonically: the unconsumed
  // residual carries over and can lift the next step's count.
  NeuronParams sfa = NeuronParams::uniform(NeuronMode::kSfa, 1, 1.0, 0.7, 2.0);
  NeuronParams lin = NeuronParams::uniform(NeuronMode::kLinear, 1, 1.0, 0.7, 2.0);
  NeuronState a(1), b(1);
  const std::vector<double> drive = {6.5};
  double total_sfa = 0.0, total_lin = 0.0;
  for (int t = 0; t < 20; ++t) {
    a = membrane_update(a, sfa, drive);
    b = membrane_update(b, lin, drive);
    const StepOutput sa = fire(a.v, sfa);
    const StepOutput sb = fire(b.v, lin);
    a.u = consumed_potential(sa.s, a.v, sfa);
    b.u = consumed_potential(sb.s, b.v, lin);
    CHECK(sa.s[0] <= sb.s[0]);
    total_sfa += sa.s[0];
    total_lin += sb.s[0];
  }
  CHECK(total_sfa < total_lin);
}
