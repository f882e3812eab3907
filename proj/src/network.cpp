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

#include "mapsnn/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "mapsnn/error.hpp"
#include "mapsnn/rng.hpp"

namespace mapsnn {

void NetworkSpec::validate() const {
  if (widths.size() < 2) {
    throw ConfigError("network needs at least an input and an output width");
  }
  for (int w : widths) {
    if (w <= 0) throw ConfigError("layer widths must be positive");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigError("dt must be a positive number of milliseconds");
  }
  if (steps < 1) throw ConfigError("T must be at least 1 step");
  if (s_max < 1) throw ConfigError("s_max must be at least 1");
  if (kernel_size < 1) throw ConfigError("kernel_size must be at least 1");
}

SampledKernel Layer::effective_kernel() const {
  if (fixed_taps) {
    if (fixed_taps->width != in_width ||
        fixed_taps->c.size() != in_width * fixed_taps->kernel_size) {
      throw ConfigError("fixed kernel taps do not match the layer input width");
    }
    return *fixed_taps;
  }
  return sample_kernel(kernel);
}

std::string_view group_name(GroupKind kind) {
  switch (kind) {
    case GroupKind::kWeights:
      return "weights";
    case GroupKind::kThreshold:
      return "v_threshold";
    case GroupKind::kTauDecay:
      return "tau_decay";
    case GroupKind::kQ:
      return "q";
    case GroupKind::kKernelA:
      return "kernel_a";
    case GroupKind::kKernelB:
      return "kernel_b";
    case GroupKind::kKernelDelay:
      return "kernel_delay";
  }
  return "?";
}

bool is_kernel_group(GroupKind kind) {
  return kind == GroupKind::kKernelA || kind == GroupKind::kKernelB ||
         kind == GroupKind::kKernelDelay;
}

namespace {

template <class Grads>
auto& field(Grads& g, GroupKind kind) {
  switch (kind) {
    case GroupKind::kWeights:
      return g.weights;
    case GroupKind::kThreshold:
      return g.v_threshold;
    case GroupKind::kTauDecay:
      return g.tau_decay;
    case GroupKind::kQ:
      return g.q;
    case GroupKind::kKernelA:
      return g.kernel_a;
    case GroupKind::kKernelB:
      return g.kernel_b;
    case GroupKind::kKernelDelay:
      return g.kernel_delay;
  }
  return g.weights;
}

template <class L>
auto& layer_field(L& l, GroupKind kind) {
  switch (kind) {
    case GroupKind::kWeights:
      return l.weights;
    case GroupKind::kThreshold:
      return l.neurons.v_threshold;
    case GroupKind::kTauDecay:
      return l.neurons.tau_decay;
    case GroupKind::kQ:
      return l.neurons.q;
    case GroupKind::kKernelA:
      return l.kernel.a;
    case GroupKind::kKernelB:
      return l.kernel.b;
    case GroupKind::kKernelDelay:
      return l.kernel.delay;
  }
  return l.weights;
}

}  // namespace

std::vector<double>& group_values(LayerGrads& g, GroupKind kind) {
  return field(g, kind);
}
const std::vector<double>& group_values(const LayerGrads& g, GroupKind kind) {
  return field(g, kind);
}
std::vector<double>& group_values(Layer& l, GroupKind kind) {
  return layer_field(l, kind);
}
const std::vector<double>& group_values(const Layer& l, GroupKind kind) {
  return layer_field(l, kind);
}

namespace {

// Shifts each weight row to sum to zero and rescales by sqrt(n / (n - 1)),
// which keeps every entry marginally N(0, sigma^2). A row with a random
// non-zero sum turns a shared input background into a fixed offset that can
// hold the neuron below the filter's knee for every sample.
void center_rows(Layer& l) {
  const double n = static_cast<double>(l.in_width);
  const double rescale = std::sqrt(n / (n - 1.0));
  for (std::size_t k = 0; k < l.width; ++k) {
    double* row = l.weights.data() + k * l.in_width;
    double mean = 0.0;
    for (std::size_t j = 0; j < l.in_width; ++j) mean += row[j];
    mean /= n;
    for (std::size_t j = 0; j < l.in_width; ++j) row[j] = (row[j] - mean) * rescale;
  }
}

std::string layer_group_name(std::size_t layer, GroupKind kind) {
  return "layer" + std::to_string(layer) + "." + std::string(group_name(kind));
}

}  // namespace

std::vector<ParamGroup> GradBuffers::groups() {
  std::vector<ParamGroup> out;
  for (std::size_t n = 0; n < layers.size(); ++n) {
    for (GroupKind kind : kAllGroupKinds) {
      out.push_back({layer_group_name(n, kind), n, kind, field(layers[n], kind)});
    }
  }
  return out;
}

void GradBuffers::add(const GradBuffers& other) {
  for (std::size_t n = 0; n < layers.size(); ++n) {
    for (GroupKind kind : kAllGroupKinds) {
      auto& dst = field(layers[n], kind);
      const auto& src = field(other.layers[n], kind);
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
    }
  }
}

void GradBuffers::scale(double factor) {
  for (auto& l : layers) {
    for (GroupKind kind : kAllGroupKinds) {
      for (auto& x : field(l, kind)) x *= factor;
    }
  }
}

bool GradBuffers::all_finite() const { return first_non_finite().empty(); }

std::string GradBuffers::first_non_finite() const {
  for (std::size_t n = 0; n < layers.size(); ++n) {
    for (GroupKind kind : kAllGroupKinds) {
      const auto& v = field(layers[n], kind);
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i])) {
          return layer_group_name(n, kind) + "[" + std::to_string(i) + "]";
        }
      }
    }
  }
  return {};
}

Network::Network(NetworkSpec spec, std::vector<Layer> layers)
    : spec_(std::move(spec)), layers_(std::move(layers)) {
  spec_.validate();
  if (layers_.size() != spec_.num_layers()) {
    throw ConfigError("network has " + std::to_string(layers_.size()) +
                      " layers but the spec lists " +
                      std::to_string(spec_.num_layers()));
  }
  for (std::size_t n = 0; n < layers_.size(); ++n) {
    const Layer& l = layers_[n];
    const auto w = static_cast<std::size_t>(spec_.widths[n + 1]);
    const auto in = static_cast<std::size_t>(spec_.widths[n]);
    if (l.width != w || l.in_width != in || l.weights.size() != w * in ||
        l.neurons.size() != w || l.neurons.tau_decay.size() != w ||
        l.neurons.q.size() != w || l.kernel.size() != in ||
        l.kernel.b.size() != in || l.kernel.delay.size() != in) {
      throw ConfigError("layer " + std::to_string(n) +
                        " parameters do not match widths " + std::to_string(in) +
                        " -> " + std::to_string(w));
    }
  }
}

Network Network::initialize(const NetworkSpec& spec, const InitOptions& init,
                            std::uint64_t seed, std::uint64_t kernel_seed) {
  spec.validate();
  std::vector<Layer> layers;
  for (std::size_t n = 0; n < spec.num_layers(); ++n) {
    Layer l;
    l.in_width = static_cast<std::size_t>(spec.widths[n]);
    l.width = static_cast<std::size_t>(spec.widths[n + 1]);

    auto wrng = make_rng(seed, streams::kWeights, n);
    std::normal_distribution<double> normal(
        0.0, std::sqrt(2.0 / static_cast<double>(l.in_width + l.width)));
    l.weights.resize(l.width * l.in_width);
    for (auto& w : l.weights) w = normal(wrng);
    if (init.center_weights && l.in_width > 1) center_rows(l);

    l.neurons = NeuronParams::uniform(spec.mode, l.width, init.v_threshold,
                                      init.tau_decay, init.q);
    if (init.jitter > 0.0) {
      auto nrng = make_rng(seed, streams::kNeurons, n);
      std::uniform_real_distribution<double> jit(1.0 - init.jitter,
                                                 1.0 + init.jitter);
      for (std::size_t k = 0; k < l.width; ++k) {
        l.neurons.v_threshold[k] *= jit(nrng);
        l.neurons.tau_decay[k] *= jit(nrng);
        l.neurons.q[k] *= jit(nrng);
      }
    }
    l.neurons.project();

    auto krng = make_rng(kernel_seed, streams::kKernels, n);
    l.kernel = KernelParams::random(l.in_width, spec.kernel_size, spec.dt, krng);
    layers.push_back(std::move(l));
  }
  return Network(spec, std::move(layers));
}

ForwardResult Network::forward(const SpikeTensor& input, bool record_tape) const {
  if (input.steps != static_cast<std::size_t>(spec_.steps) ||
      input.units != static_cast<std::size_t>(spec_.input_width())) {
    throw ConfigError("input spike tensor is " + std::to_string(input.steps) +
                      " x " + std::to_string(input.units) +
                      " but the network expects " + std::to_string(spec_.steps) +
                      " x " + std::to_string(spec_.input_width()));
  }
  std::vector<double> x(input.counts.size());
  const bool binary = spec_.mode == NeuronMode::kSsp;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::int32_t c = input.counts[i];
    if (c < 0 || (binary && c > 1)) {
      throw ConfigError(binary ? "SSP network requires binary input spikes"
                               : "input spike counts must be non-negative");
    }
    x[i] = static_cast<double>(c);
  }
  return forward(std::span<const double>(x), record_tape);
}

ForwardResult Network::forward(std::span<const double> input,
                               bool record_tape) const {
  const auto steps = static_cast<std::size_t>(spec_.steps);
  if (input.size() != steps * static_cast<std::size_t>(spec_.input_width())) {
    throw ConfigError("input series has the wrong shape for this network");
  }
  const DendriteFilter filter;
  ForwardResult result;
  result.spike_totals.assign(layers_.size(), 0.0);
  if (record_tape) {
    result.tape.emplace();
    result.tape->steps = steps;
  }

  std::vector<double> prev(input.begin(), input.end());
  for (std::size_t n = 0; n < layers_.size(); ++n) {
    const Layer& layer = layers_[n];
    const std::size_t width = layer.width;
    const std::size_t in = layer.in_width;
    const NeuronParams& np = layer.neurons;
    SampledKernel kernel = layer.effective_kernel();

    std::vector<double> o(steps * in);
    convolve_layer(prev, steps, kernel, o);

    std::vector<double> xs(steps * width), ih(steps * width), vs(steps * width),
        ns(steps * width), ss(steps * width), us(steps * width);
    std::vector<double> v(width, 0.0), u(width, 0.0);
    double total = 0.0;
    for (std::size_t t = 0; t < steps; ++t) {
      const double* ot = o.data() + t * in;
      for (std::size_t k = 0; k < width; ++k) {
        const double* w = layer.weights.data() + k * in;
        double pre = 0.0;
        for (std::size_t j = 0; j < in; ++j) pre += w[j] * ot[j];
        const double current = filter(pre);
        if (!std::isfinite(current)) {
          throw NumericFault("non-finite input current", static_cast<int>(n),
                             static_cast<int>(t));
        }
        const double vk = membrane_update(v[k], u[k], np.tau_decay[k], current);
        if (!std::isfinite(vk)) {
          throw NumericFault("non-finite membrane potential", static_cast<int>(n),
                             static_cast<int>(t));
        }
        const double vth = np.v_threshold[k];
        const double q = np.q[k];
        const double nstar = spike_intensity(np.mode, vk, vth, q);
        const double s =
            spike_count(np.mode, nstar, vk, vth, q, spec_.s_max, spec_.relaxed);
        const double uk = consumed_potential(np.mode, s, vk, vth, q);
        v[k] = vk;
        u[k] = uk;
        const std::size_t idx = t * width + k;
        xs[idx] = pre;
        ih[idx] = current;
        vs[idx] = vk;
        ns[idx] = nstar;
        ss[idx] = s;
        us[idx] = uk;
        total += s;
      }
    }
    result.spike_totals[n] = total;

    if (record_tape) {
      LayerTape lt;
      lt.width = width;
      lt.in_width = in;
      lt.kernel = std::move(kernel);
      lt.input = std::move(prev);
      lt.o = std::move(o);
      lt.x = std::move(xs);
      lt.i_hat = std::move(ih);
      lt.v = std::move(vs);
      lt.n_star = std::move(ns);
      lt.u = std::move(us);
      lt.s = ss;
      result.tape->layers.push_back(std::move(lt));
    }
    prev = std::move(ss);
  }

  const auto classes = static_cast<std::size_t>(spec_.num_classes());
  result.logits.assign(classes, 0.0);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t k = 0; k < classes; ++k) {
      result.logits[k] += prev[t * classes + k];
    }
  }
  return result;
}

std::vector<ParamGroup> Network::parameter_groups() {
  std::vector<ParamGroup> out;
  for (std::size_t n = 0; n < layers_.size(); ++n) {
    for (GroupKind kind : kAllGroupKinds) {
      out.push_back({layer_group_name(n, kind), n, kind, layer_field(layers_[n], kind)});
    }
  }
  return out;
}

GradBuffers Network::zero_grads() const {
  GradBuffers g;
  for (const Layer& l : layers_) {
    LayerGrads lg;
    lg.weights.assign(l.weights.size(), 0.0);
    lg.v_threshold.assign(l.width, 0.0);
    lg.tau_decay.assign(l.width, 0.0);
    lg.q.assign(l.width, 0.0);
    lg.kernel_a.assign(l.in_width, 0.0);
    lg.kernel_b.assign(l.in_width, 0.0);
    lg.kernel_delay.assign(l.in_width, 0.0);
    g.layers.push_back(std::move(lg));
  }
  return g;
}

void Network::project() {
  for (Layer& l : layers_) {
    l.neurons.project();
    l.kernel.project();
  }
}

double cross_entropy(std::span<const double> logits, int label,
                     std::vector<double>* grad) {
  if (label < 0 || static_cast<std::size_t>(label) >= logits.size()) {
    throw ConfigError("label " + std::to_string(label) + " outside [0, " +
                      std::to_string(logits.size()) + ")");
  }
  const double peak = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - peak);
  const double log_z = peak + std::log(z);
  if (grad) {
    grad->resize(logits.size());
    for (std::size_t k = 0; k < logits.size(); ++k) {
      (*grad)[k] = std::exp(logits[k] - log_z);
    }
    (*grad)[label] -= 1.0;
  }
  return log_z - logits[label];
}

int predict(std::span<const double> logits) {
  return static_cast<int>(std::max_element(logits.begin(), logits.end()) -
                          logits.begin());
}

}  // namespace mapsnn
