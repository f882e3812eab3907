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

// Trainable convolutional synapse.
//
// Every presynaptic neuron j owns a delayed two-exponential response kernel
//
//   K_j(t) = exp(-a_j (t - d_j)) - exp(-b_j (t - d_j))   for t >= d_j, else 0
//
// sampled on the step grid as C_{j,i} = K_j(i * dt), i < kernel_size. Its
// outgoing current is the causal convolution o_j(t) = sum_i s_j(t - i) C_{j,i}.
// Postsynaptic neurons integrate Filter(sum_j w_kj o_j) with the Swish filter
// x * sigmoid(10 x), which masks negative currents.

#ifndef MAPSNN_SYNAPSE_HPP_
#define MAPSNN_SYNAPSE_HPP_

#include <cstddef>
#include <random>
#include <span>
#include <vector>

namespace mapsnn {

inline constexpr int kDefaultKernelSize = 8;
inline constexpr double kKernelRateMin = 1e-4;  // 1/ms

struct KernelParams {
  std::vector<double> a;      // 1/ms
  std::vector<double> b;      // 1/ms
  std::vector<double> delay;  // ms
  int kernel_size = kDefaultKernelSize;
  double dt = 1.0;  // ms

  std::size_t size() const { return a.size(); }
  double window() const { return (kernel_size - 1) * dt; }
  bool degenerate(std::size_t j) const { return a[j] == b[j]; }

  // a ~ U[0.5, 1.5] / (5 dt), b ~ U[0.5, 1.5] / dt, delay ~ U[0, 2 dt].
  static KernelParams random(std::size_t width, int kernel_size, double dt,
                             std::mt19937_64& rng);
  void project();
};

// Taps of every neuron, row-major [neuron][tap].
struct SampledKernel {
  std::size_t width = 0;
  int kernel_size = 0;
  std::vector<double> c;

  std::span<const double> taps(std::size_t j) const {
    return {c.data() + j * kernel_size, static_cast<std::size_t>(kernel_size)};
  }
};

double response_kernel(double t, double a, double b, double delay);
std::vector<double> sample_kernel(double a, double b, double delay,
                                  int kernel_size, double dt);
SampledKernel sample_kernel(const KernelParams& params);

// o(t) for a single neuron; spikes[0..t] is its history, earlier steps are 0.
double convolve_spikes(std::span<const double> spikes, std::size_t t,
                       std::span<const double> taps);

// Whole-series convolution for a layer stored row-major [step][neuron].
void convolve_layer(std::span<const double> spikes, std::size_t steps,
                    const SampledKernel& kernel, std::span<double> out);

struct DendriteFilter {
  double beta = 10.0;

  double operator()(double x) const;
  double derivative(double x) const;
};

// Returns Filter(W o) with W row-major [out][in]; `pre` receives W o.
std::vector<double> dendrite_integrate(std::span<const double> o,
                                       std::span<const double> weights,
                                       std::size_t out_width,
                                       const DendriteFilter& filter = {},
                                       std::vector<double>* pre = nullptr);

struct TapGrad {
  double da = 0.0;
  double db = 0.0;
  double ddelay = 0.0;
};
// Zero at and before the delay crossing.
TapGrad kernel_tap_grad(int tap, double a, double b, double delay, double dt);

struct KernelGrad {
  double da = 0.0;
  double db = 0.0;
  double ddelay = 0.0;
  std::vector<double> spikes;  // dL/ds(t) through this kernel
};

// Backward of convolve_spikes for one neuron over the whole series.
// `upstream[t]` is dL/do(t).
KernelGrad kernel_gradients(std::span<const double> upstream,
                            std::span<const double> spikes, double a, double b,
                            double delay, int kernel_size, double dt);

}  // namespace mapsnn

#endif  // MAPSNN_SYNAPSE_HPP_
