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

#include <cmath>

#include "mapsnn/error.hpp"
#include "mapsnn/train.hpp"

namespace mapsnn {

void AdamOptions::validate() const {
  if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("train.lr must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw ConfigError("train.beta1 and train.beta2 must lie in [0, 1)");
  }
  if (!(eps > 0.0)) throw ConfigError("train.eps must be positive");
}

void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> m, std::span<double> v, std::uint64_t step,
                 const AdamOptions& o) {
  const double t = static_cast<double>(step);
  const double c1 = 1.0 - std::pow(o.beta1, t);
  const double c2 = 1.0 - std::pow(o.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    m[i] = o.beta1 * m[i] + (1.0 - o.beta1) * g;
    v[i] = o.beta2 * v[i] + (1.0 - o.beta2) * g * g;
    const double m_hat = m[i] / c1;
    const double v_hat = v[i] / c2;
    params[i] -= o.lr * m_hat / (std::sqrt(v_hat) + o.eps);
  }
}

Adam::Adam(const AdamOptions& options, const Network& net)
    : options_(options), m_(net.zero_grads()), v_(net.zero_grads()) {
  options_.validate();
}

void Adam::restore(std::uint64_t step, GradBuffers m, GradBuffers v) {
  step_ = step;
  m_ = std::move(m);
  v_ = std::move(v);
}

void Adam::step(Network& net, const GradBuffers& grads, bool kernel_trainable) {
  const std::string bad = grads.first_non_finite();
  if (!bad.empty()) {
    throw NumericFault("non-finite gradient at " + bad + " after optimizer step " +
                       std::to_string(step_));
  }
  ++step_;
  for (std::size_t n = 0; n < net.layers().size(); ++n) {
    Layer& layer = net.layers()[n];
    for (GroupKind kind : kAllGroupKinds) {
      if (is_kernel_group(kind) && (!kernel_trainable || layer.fixed_taps)) continue;
      adam_update(group_values(layer, kind), group_values(grads.layers[n], kind),
                  group_values(m_.layers[n], kind), group_values(v_.layers[n], kind),
                  step_, options_);
    }
  }
  net.project();
}

}  // namespace mapsnn
