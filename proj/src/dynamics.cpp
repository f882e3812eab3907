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

#include "mapsnn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mapsnn/error.hpp"

namespace mapsnn {

std::string_view to_string(NeuronMode mode) {
  switch (mode) {
    case NeuronMode::kSfa:
      return "sfa";
    case NeuronMode::kLinear:
      return "linear";
    case NeuronMode::kSsp:
      return "ssp";
  }
  return "?";
}

NeuronMode parse_neuron_mode(std::string_view name) {
  if (name == "sfa") return NeuronMode::kSfa;
  if (name == "linear") return NeuronMode::kLinear;
  if (name == "ssp") return NeuronMode::kSsp;
  throw ConfigError("unknown neuron mode '" + std::string(name) +
                    "' (expected sfa, linear or ssp)");
}

NeuronParams NeuronParams::uniform(NeuronMode mode, std::size_t width,
                                   double v_threshold, double tau_decay,
                                   double q) {
  NeuronParams p;
  p.mode = mode;
  p.v_threshold.assign(width, v_threshold);
  p.tau_decay.assign(width, tau_decay);
  p.q.assign(width, q);
  return p;
}

void NeuronParams::project() {
  for (auto& x : v_threshold) x = std::max(x, kThresholdMin);
  for (auto& x : tau_decay) x = std::clamp(x, kTauDecayMin, kTauDecayMax);
  for (auto& x : q) x = std::clamp(x, kQMin, kQMax);
}

double spike_intensity(NeuronMode mode, double v, double v_threshold,
                       double q) {
  switch (mode) {
    case NeuronMode::kSfa: {
      const double excess = v / v_threshold * (q - 1.0);
      if (!(excess > 0.0)) return 0.0;
      return std::log1p(excess) / std::log(q);
    }
    case NeuronMode::kLinear:
      return v > 0.0 ? v / v_threshold : 0.0;
    case NeuronMode::kSsp:
      return v / v_threshold;
  }
  return 0.0;
}

double spike_count(NeuronMode mode, double n_star, double v, double v_threshold,
                   double q, int s_max, bool relaxed) {
  if (mode == NeuronMode::kSsp) {
    if (relaxed) return std::clamp(n_star, 0.0, 1.0);
    return v >= v_threshold ? 1.0 : 0.0;
  }
  const double capped = std::clamp(n_star, 0.0, static_cast<double>(s_max));
  if (relaxed) return capped;
  double s = std::floor(capped);
  // n* is a rounded logarithm; never let the consumed potential exceed v.
  while (s > 0.0 && consumed_potential(mode, s, v, v_threshold, q) > v) {
    s -= 1.0;
  }
  return s;
}

double consumed_potential(NeuronMode mode, double s, double v,
                          double v_threshold, double q) {
  switch (mode) {
    case NeuronMode::kSfa:
      if (s == 0.0) return 0.0;
      return (std::pow(q, s) - 1.0) / (q - 1.0) * v_threshold;
    case NeuronMode::kLinear:
      return s * v_threshold;
    case NeuronMode::kSsp:
      return s * v;
  }
  return 0.0;
}

IntensityGrad spike_intensity_grad(NeuronMode mode, double v,
                                   double v_threshold, double q) {
  IntensityGrad g;
  switch (mode) {
    case NeuronMode::kSfa: {
      const double ratio = v / v_threshold;
      const double excess = ratio * (q - 1.0);
      if (!(excess > 0.0)) return g;
      const double arg = 1.0 + excess;
      const double ln_q = std::log(q);
      g.dv = (q - 1.0) / (v_threshold * ln_q * arg);
      g.dv_threshold = -ratio * (q - 1.0) / (v_threshold * ln_q * arg);
      g.dq = ratio / (arg * ln_q) - std::log1p(excess) / (q * ln_q * ln_q);
      return g;
    }
    case NeuronMode::kLinear:
      if (!(v > 0.0)) return g;
      [[fallthrough]];
    case NeuronMode::kSsp:
      g.dv = 1.0 / v_threshold;
      g.dv_threshold = -v / (v_threshold * v_threshold);
      return g;
  }
  return g;
}

double spike_surrogate(NeuronMode mode, double n_star, int s_max,
                       bool relaxed) {
  if (mode == NeuronMode::kSsp) {
    if (relaxed) return (n_star > 0.0 && n_star < 1.0) ? 1.0 : 0.0;
    return std::abs(n_star - 1.0) <= 0.5 ? 1.0 : 0.0;
  }
  return n_star < static_cast<double>(s_max) ? surrogate_dsdn() : 0.0;
}

ConsumedGrad consumed_potential_grad(NeuronMode mode, double s, double v,
                                     double v_threshold, double q) {
  ConsumedGrad g;
  switch (mode) {
    case NeuronMode::kSfa: {
      const double qs = std::pow(q, s);
      const double qm1 = q - 1.0;
      g.ds = qs * std::log(q) / qm1 * v_threshold;
      g.dv_threshold = (qs - 1.0) / qm1;
      g.dq = v_threshold * (s * std::pow(q, s - 1.0) * qm1 - (qs - 1.0)) /
             (qm1 * qm1);
      return g;
    }
    case NeuronMode::kLinear:
      g.ds = v_threshold;
      g.dv_threshold = s;
      return g;
    case NeuronMode::kSsp:
      g.ds = v;
      g.dv = s;
      return g;
  }
  return g;
}

NeuronState membrane_update(const NeuronState& state, const NeuronParams& params,
                            std::span<const double> i_norm, int layer,
                            int step) {
  const std::size_t n = params.size();
  if (state.v.size() != n || state.u.size() != n || i_norm.size() != n) {
    throw ConfigError("membrane_update: state, params and input widths differ");
  }
  NeuronState next(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(i_norm[k])) {
      throw NumericFault("non-finite input current", layer, step);
    }
    next.v[k] = membrane_update(state.v[k], state.u[k], params.tau_decay[k],
                                i_norm[k]);
    if (!std::isfinite(next.v[k])) {
      throw NumericFault("non-finite membrane potential", layer, step);
    }
  }
  return next;
}

namespace {

StepOutput fire_as(NeuronMode mode, std::span<const double> v,
                   const NeuronParams& params, int s_max, bool relaxed) {
  const std::size_t n = v.size();
  if (params.size() != n) {
    throw ConfigError("spike generation: potential and parameter widths differ");
  }
  StepOutput out;
  out.s.resize(n);
  out.n_star.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double vth = params.v_threshold[k];
    const double q = params.q[k];
    out.n_star[k] = spike_intensity(mode, v[k], vth, q);
    out.s[k] = spike_count(mode, out.n_star[k], v[k], vth, q, s_max, relaxed);
  }
  return out;
}

}  // namespace

StepOutput spike_count_sfa(std::span<const double> v, const NeuronParams& params,
                           int s_max) {
  return fire_as(NeuronMode::kSfa, v, params, s_max, false);
}

StepOutput spike_count_linear(std::span<const double> v,
                              const NeuronParams& params, int s_max) {
  return fire_as(NeuronMode::kLinear, v, params, s_max, false);
}

StepOutput spike_ssp(std::span<const double> v, const NeuronParams& params) {
  return fire_as(NeuronMode::kSsp, v, params, 1, false);
}

StepOutput fire(std::span<const double> v, const NeuronParams& params,
                int s_max, bool relaxed) {
  return fire_as(params.mode, v, params, s_max, relaxed);
}

std::vector<double> consumed_potential(std::span<const double> s,
                                       std::span<const double> v,
                                       const NeuronParams& params) {
  const std::size_t n = s.size();
  if (params.size() != n || (params.mode == NeuronMode::kSsp && v.size() != n)) {
    throw ConfigError("consumed_potential: widths differ");
  }
  std::vector<double> u(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double vk = v.empty() ? 0.0 : v[k];
    u[k] = consumed_potential(params.mode, s[k], vk, params.v_threshold[k],
                              params.q[k]);
  }
  return u;
}

}  // namespace mapsnn
