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

// Feed-forward stack of MAP-LIF layers.
//
// For layer n at step t:
//   O^{n-1}[t] = causal convolution of S^{n-1} with the presynaptic kernels
//   I^n[t]     = Filter(W^n O^{n-1}[t])
//   V^n[t]     = tau_decay (V^n[t-1] - U^n[t-1]) + I^n[t]
//   S^n[t], U^n[t] from the neuron mode
// S^0 is the input spike tensor. The class logits are the output spike counts
// summed over time.

#ifndef MAPSNN_NETWORK_HPP_
#define MAPSNN_NETWORK_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mapsnn/dynamics.hpp"
#include "mapsnn/spike_tensor.hpp"
#include "mapsnn/synapse.hpp"

namespace mapsnn {

enum class Readout { kSpikeCountSum };

struct NetworkSpec {
  std::vector<int> widths;  // input, hidden..., output
  double dt = 1.0;          // ms
  int steps = 1;            // T
  NeuronMode mode = NeuronMode::kSfa;
  Readout readout = Readout::kSpikeCountSum;
  int s_max = kDefaultSpikeCap;
  int kernel_size = kDefaultKernelSize;
  // Continuous relaxation s := n* used by the gradient checker.
  bool relaxed = false;

  std::size_t num_layers() const { return widths.size() - 1; }
  int input_width() const { return widths.front(); }
  int num_classes() const { return widths.back(); }
  // Throws ConfigError.
  void validate() const;
};

struct InitOptions {
  double v_threshold = 1.0;
  double tau_decay = 0.7;
  double q = 2.0;
  double jitter = 0.0;  // relative half-width of uniform jitter on the above
  // Zero-sum weight rows; see Network::initialize.
  bool center_weights = true;
};

// One MAP-LIF layer together with the kernels of its presynaptic neurons.
struct Layer {
  std::size_t width = 0;
  std::size_t in_width = 0;
  std::vector<double> weights;  // row-major [width][in_width]
  NeuronParams neurons;         // size width
  KernelParams kernel;          // size in_width
  // Explicit taps replacing the sampled kernel (not trainable).
  std::optional<SampledKernel> fixed_taps;

  SampledKernel effective_kernel() const;
};

// Parameter or gradient values of one layer, laid out like Layer.
struct LayerGrads {
  std::vector<double> weights;
  std::vector<double> v_threshold;
  std::vector<double> tau_decay;
  std::vector<double> q;
  std::vector<double> kernel_a;
  std::vector<double> kernel_b;
  std::vector<double> kernel_delay;
};

enum class GroupKind {
  kWeights,
  kThreshold,
  kTauDecay,
  kQ,
  kKernelA,
  kKernelB,
  kKernelDelay
};

inline constexpr GroupKind kAllGroupKinds[] = {
    GroupKind::kWeights,  GroupKind::kThreshold, GroupKind::kTauDecay,
    GroupKind::kQ,        GroupKind::kKernelA,   GroupKind::kKernelB,
    GroupKind::kKernelDelay};

std::string_view group_name(GroupKind kind);
bool is_kernel_group(GroupKind kind);

// The values of one group inside a layer or its gradient mirror.
std::vector<double>& group_values(LayerGrads& g, GroupKind kind);
const std::vector<double>& group_values(const LayerGrads& g, GroupKind kind);
std::vector<double>& group_values(Layer& l, GroupKind kind);
const std::vector<double>& group_values(const Layer& l, GroupKind kind);

struct ParamGroup {
  std::string name;  // e.g. "layer1.kernel_a"
  std::size_t layer = 0;
  GroupKind kind = GroupKind::kWeights;
  std::span<double> values;
};

class GradBuffers {
 public:
  GradBuffers() = default;
  std::vector<LayerGrads> layers;

  std::vector<ParamGroup> groups();
  void add(const GradBuffers& other);
  void scale(double factor);
  bool all_finite() const;
  // Name and index of the first non-finite entry, or empty.
  std::string first_non_finite() const;
};

struct LayerTape {
  std::size_t width = 0;
  std::size_t in_width = 0;
  SampledKernel kernel;
  std::vector<double> input;  // [T][in_width] presynaptic spikes
  std::vector<double> o;      // [T][in_width]
  std::vector<double> x;      // [T][width] filter pre-activation
  std::vector<double> i_hat;  // [T][width]
  std::vector<double> v;      // [T][width]
  std::vector<double> n_star;
  std::vector<double> s;
  std::vector<double> u;
};

struct Tape {
  std::size_t steps = 0;
  std::vector<LayerTape> layers;
};

struct ForwardResult {
  std::vector<double> logits;
  std::vector<double> spike_totals;  // per MAP-LIF layer
  std::optional<Tape> tape;
};

class Network {
 public:
  Network() = default;
  Network(NetworkSpec spec, std::vector<Layer> layers);

  // Weights ~ N(0, 2 / (fan_in + fan_out)), optionally centered per row so
  // every neuron starts with zero net response to a uniform input; neuron
  // parameters from `init` with optional jitter; kernels per
  // KernelParams::random.
  static Network initialize(const NetworkSpec& spec, const InitOptions& init,
                            std::uint64_t seed, std::uint64_t kernel_seed);

  const NetworkSpec& spec() const { return spec_; }
  NetworkSpec& mutable_spec() { return spec_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }

  ForwardResult forward(const SpikeTensor& input, bool record_tape) const;
  // Relaxed-mode forward on real-valued input spikes [T][input_width].
  ForwardResult forward(std::span<const double> input, bool record_tape) const;

  std::vector<ParamGroup> parameter_groups();
  GradBuffers zero_grads() const;
  void project();

 private:
  NetworkSpec spec_;
  std::vector<Layer> layers_;
};

// Softmax cross-entropy; fills dL/dlogits when `grad` is given.
double cross_entropy(std::span<const double> logits, int label,
                     std::vector<double>* grad = nullptr);

// Index of the largest logit, lowest index on ties.
int predict(std::span<const double> logits);

}  // namespace mapsnn

#endif  // MAPSNN_NETWORK_HPP_
