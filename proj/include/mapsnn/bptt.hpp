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

// Backpropagation through time over a recorded forward tape.
//
// Layers are swept from the output down; within a layer, steps are swept from
// T-1 to 0 so that dL/dV[t+1] is available when step t is processed. The
// gradient reaching S[t] collects the readout, the convolution taps of the
// layer above (every o(t..t+kernel_size-1) that read S[t]), and the consumed
// potential U[t] that the next membrane update subtracts.

#ifndef MAPSNN_BPTT_HPP_
#define MAPSNN_BPTT_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mapsnn/network.hpp"

namespace mapsnn {

struct BackwardOptions {
  // Off for frozen-kernel training.
  bool kernel_grads = true;
};

// Optional per-step gradients, [layer][t * width + k].
struct BackwardTrace {
  std::vector<std::vector<double>> dv;
  std::vector<std::vector<double>> ds;
};

// `logit_grad` is dL/dlogits; every output step receives it.
GradBuffers backward(const Network& net, const Tape& tape,
                     std::span<const double> logit_grad,
                     const BackwardOptions& options = {},
                     BackwardTrace* trace = nullptr);

// General form: `output_spike_grad` is dL/dS_out[t][k], row-major [T][C].
GradBuffers backward_steps(const Network& net, const Tape& tape,
                           std::span<const double> output_spike_grad,
                           const BackwardOptions& options = {},
                           BackwardTrace* trace = nullptr);

// Finite-difference verification in relaxed mode.

enum class CheckStatus { kPass, kFail, kSkipped, kNotApplicable, kExcluded };
std::string_view to_string(CheckStatus status);

struct GradcheckGroup {
  GroupKind kind = GroupKind::kWeights;
  std::size_t count = 0;
  double max_abs_grad = 0.0;
  double max_rel_error = 0.0;
  CheckStatus status = CheckStatus::kPass;
  std::string note;
};

struct GradcheckOptions {
  double tolerance = 1e-4;
  double step = 1e-5;           // relative to max(1, |p|)
  double abs_floor = 1e-5;      // denominator floor of the relative error
  double boundary_margin = 1e-3;
  int max_resamples = 200;
};

struct GradcheckReport {
  std::uint64_t seed = 0;
  NeuronMode mode = NeuronMode::kSfa;
  std::vector<int> widths;
  int steps = 0;
  int kernel_size = 0;
  double dt = 0.0;
  int resamples = 0;
  // Set when a perturbation crossed a kink; the point must be resampled.
  bool boundary_hit = false;
  std::string boundary_reason;
  std::vector<GradcheckGroup> groups;

  bool passed() const;
};

// Checks every parameter of `net` at the given input. Forces relaxed mode.
GradcheckReport gradcheck_network(Network net, std::span<const double> input,
                                  int label, const GradcheckOptions& options = {});

// Draws a random micro-network (widths <= 8, T <= 16) for `mode` and checks
// it, resampling points that sit on a clamp or kink boundary.
GradcheckReport gradcheck(NeuronMode mode, std::uint64_t seed,
                          const GradcheckOptions& options = {});

// Plain-text table.
std::string format_report(const GradcheckReport& report);

}  // namespace mapsnn

#endif  // MAPSNN_BPTT_HPP_
