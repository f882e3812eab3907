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

// MAP-LIF neuron cell.
//
// A neuron integrates a normalized input current into its membrane potential
//
//   v(t) = tau_decay * (v(t - dt) - u(t - dt)) + I(t)
//
// and emits a non-negative integer spike count s per step. The continuous
// spike intensity n* depends on the mode:
//
//   SFA     n* = log_q[(v / V_th)(q - 1) + 1]   (argument clamped to >= 1)
//   Linear  n* = max(v / V_th, 0)
//   SSP     n* = v / V_th, s = [v >= V_th]
//
// and the consumed potential u that is subtracted on the next step is the
// partial geometric sum (q^s - 1)/(q - 1) * V_th (SFA), s * V_th (Linear), or
// the whole potential s * v (SSP, i.e. reset to rest).
//
// In relaxed mode (used by the gradient checker) the floor is dropped and
// s := clamp(n*, 0, s_max), or clamp(n*, 0, 1) for SSP, which makes every
// operation differentiable almost everywhere.

#ifndef MAPSNN_DYNAMICS_HPP_
#define MAPSNN_DYNAMICS_HPP_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace mapsnn {

enum class NeuronMode { kSfa, kLinear, kSsp };

std::string_view to_string(NeuronMode mode);
NeuronMode parse_neuron_mode(std::string_view name);

inline constexpr int kDefaultSpikeCap = 64;

// Projection bounds applied after every optimizer step.
inline constexpr double kTauDecayMin = 1e-3;
inline constexpr double kTauDecayMax = 1.0 - 1e-3;
inline constexpr double kThresholdMin = 1e-2;
inline constexpr double kQMin = 1.0 + 1e-3;
inline constexpr double kQMax = 16.0;

// Per-neuron learnable dynamics parameters of one layer.
struct NeuronParams {
  NeuronMode mode = NeuronMode::kSfa;
  std::vector<double> v_threshold;
  std::vector<double> tau_decay;
  std::vector<double> q;

  static NeuronParams uniform(NeuronMode mode, std::size_t width,
                              double v_threshold = 1.0, double tau_decay = 0.7,
                              double q = 2.0);
  std::size_t size() const { return v_threshold.size(); }
  // Clips every parameter into its admissible range.
  void project();
};

struct NeuronState {
  std::vector<double> v;
  std::vector<double> u;

  explicit NeuronState(std::size_t width = 0) : v(width, 0.0), u(width, 0.0) {}
};

struct StepOutput {
  std::vector<double> s;  // integral-valued unless relaxed
  std::vector<double> n_star;
};

// Scalar kernels. The network and the backward pass call these directly.

inline double membrane_update(double v_old, double u_old, double tau_decay,
                              double i_norm) {
  return tau_decay * (v_old - u_old) + i_norm;
}

double spike_intensity(NeuronMode mode, double v, double v_threshold, double q);

// Turns an intensity into a spike count. `v` is needed to guard against
// round-off pushing the consumed potential above the membrane potential.
double spike_count(NeuronMode mode, double n_star, double v, double v_threshold,
                   double q, int s_max, bool relaxed);

double consumed_potential(NeuronMode mode, double s, double v,
                          double v_threshold, double q);

// Partial derivatives of n* with respect to its inputs. All zero inside the
// clamped region.
struct IntensityGrad {
  double dv = 0.0;
  double dv_threshold = 0.0;
  double dq = 0.0;
};
IntensityGrad spike_intensity_grad(NeuronMode mode, double v,
                                   double v_threshold, double q);

// ds/dn*: straight-through 1 for MSP modes below the cap, a rectangular
// window of half-width 0.5 around n* = 1 for SSP. In relaxed mode, the exact
// derivative of the clamp.
double spike_surrogate(NeuronMode mode, double n_star, int s_max, bool relaxed);

struct ConsumedGrad {
  double ds = 0.0;
  double dv = 0.0;  // explicit dependence on v (SSP only)
  double dv_threshold = 0.0;
  double dq = 0.0;
};
ConsumedGrad consumed_potential_grad(NeuronMode mode, double s, double v,
                                     double v_threshold, double q);

// Vector operations over one layer.

// Throws NumericFault when the result is non-finite.
NeuronState membrane_update(const NeuronState& state, const NeuronParams& params,
                            std::span<const double> i_norm, int layer = 0,
                            int step = 0);

StepOutput spike_count_sfa(std::span<const double> v, const NeuronParams& params,
                           int s_max = kDefaultSpikeCap);
StepOutput spike_count_linear(std::span<const double> v,
                              const NeuronParams& params,
                              int s_max = kDefaultSpikeCap);
StepOutput spike_ssp(std::span<const double> v, const NeuronParams& params);

// Dispatches on params.mode.
StepOutput fire(std::span<const double> v, const NeuronParams& params,
                int s_max = kDefaultSpikeCap, bool relaxed = false);

// `v` is only read in SSP mode.
std::vector<double> consumed_potential(std::span<const double> s,
                                       std::span<const double> v,
                                       const NeuronParams& params);

// The straight-through pseudo-derivative for MSP modes.
constexpr double surrogate_dsdn() { return 1.0; }

}  // namespace mapsnn

#endif  // MAPSNN_DYNAMICS_HPP_
