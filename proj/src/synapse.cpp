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

#include "mapsnn/synapse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mapsnn/error.hpp"

namespace mapsnn {

KernelParams KernelParams::random(std::size_t width, int kernel_size, double dt,
                                  std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.5, 1.5);
  std::uniform_real_distribution<double> lag(0.0, 2.0 * dt);
  KernelParams p;
  p.kernel_size = kernel_size;
  p.dt = dt;
  p.a.resize(width);
  p.b.resize(width);
  p.delay.resize(width);
  for (std::size_t j = 0; j < width; ++j) {
    p.a[j] = unit(rng) / (5.0 * dt);
    p.b[j] = unit(rng) / dt;
    p.delay[j] = lag(rng);
  }
  return p;
}

void KernelParams::project() {
  for (auto& x : a) x = std::max(x, kKernelRateMin);
  for (auto& x : b) x = std::max(x, kKernelRateMin);
  for (auto& x : delay) x = std::max(x, 0.0);
}

double response_kernel(double t, double a, double b, double delay) {
  const double tau = t - delay;
  if (tau < 0.0) return 0.0;
  return std::exp(-a * tau) - std::exp(-b * tau);
}

std::vector<double> sample_kernel(double a, double b, double delay,
                                  int kernel_size, double dt) {
  std::vector<double> c(kernel_size);
  for (int i = 0; i < kernel_size; ++i) {
    c[i] = response_kernel(i * dt, a, b, delay);
  }
  return c;
}

SampledKernel sample_kernel(const KernelParams& params) {
  SampledKernel k;
  k.width = params.size();
  k.kernel_size = params.kernel_size;
  k.c.resize(k.width * k.kernel_size);
  for (std::size_t j = 0; j < k.width; ++j) {
    for (int i = 0; i < k.kernel_size; ++i) {
      k.c[j * k.kernel_size + i] =
          response_kernel(i * params.dt, params.a[j], params.b[j],
                          params.delay[j]);
    }
  }
  return k;
}

double convolve_spikes(std::span<const double> spikes, std::size_t t,
                       std::span<const double> taps) {
  double o = 0.0;
  const std::size_t n = std::min(taps.size(), t + 1);
  for (std::size_t i = 0; i < n; ++i) o += spikes[t - i] * taps[i];
  return o;
}

void convolve_layer(std::span<const double> spikes, std::size_t steps,
                    const SampledKernel& kernel, std::span<double> out) {
  const std::size_t width = kernel.width;
  const std::size_t taps = static_cast<std::size_t>(kernel.kernel_size);
  if (spikes.size() != steps * width || out.size() != steps * width) {
    throw ConfigError("convolve_layer: spike series has " +
                      std::to_string(spikes.size()) + " entries, expected " +
                      std::to_string(steps * width));
  }
  for (std::size_t t = 0; t < steps; ++t) {
    const std::size_t n = std::min(taps, t + 1);
    for (std::size_t j = 0; j < width; ++j) {
      const double* c = kernel.c.data() + j * taps;
      double o = 0.0;
      for (std::size_t i = 0; i < n; ++i) o += spikes[(t - i) * width + j] * c[i];
      out[t * width + j] = o;
    }
  }
}

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

double DendriteFilter::operator()(double x) const { return x * sigmoid(beta * x); }

double DendriteFilter::derivative(double x) const {
  const double sg = sigmoid(beta * x);
  return sg * (1.0 + beta * x * (1.0 - sg));
}

std::vector<double> dendrite_integrate(std::span<const double> o,
                                       std::span<const double> weights,
                                       std::size_t out_width,
                                       const DendriteFilter& filter,
                                       std::vector<double>* pre) {
  const std::size_t in_width = o.size();
  if (weights.size() != out_width * in_width) {
    throw ConfigError("dendrite_integrate: weight matrix has " +
                      std::to_string(weights.size()) +
                      " entries but layer widths are " +
                      std::to_string(out_width) + " x " +
                      std::to_string(in_width));
  }
  std::vector<double> current(out_width);
  if (pre) pre->assign(out_width, 0.0);
  for (std::size_t k = 0; k < out_width; ++k) {
    const double* w = weights.data() + k * in_width;
    double x = 0.0;
    for (std::size_t j = 0; j < in_width; ++j) x += w[j] * o[j];
    if (pre) (*pre)[k] = x;
    current[k] = filter(x);
  }
  return current;
}

TapGrad kernel_tap_grad(int tap, double a, double b, double delay, double dt) {
  TapGrad g;
  const double tau = tap * dt - delay;
  if (!(tau > 0.0)) return g;
  const double ea = std::exp(-a * tau);
  const double eb = std::exp(-b * tau);
  g.da = -tau * ea;
  g.db = tau * eb;
  g.ddelay = a * ea - b * eb;
  return g;
}

KernelGrad kernel_gradients(std::span<const double> upstream,
                            std::span<const double> spikes, double a, double b,
                            double delay, int kernel_size, double dt) {
  const std::size_t steps = upstream.size();
  if (spikes.size() != steps) {
    throw ConfigError("kernel_gradients: upstream and spike series differ in length");
  }
  const std::vector<double> taps = sample_kernel(a, b, delay, kernel_size, dt);
  KernelGrad g;
  g.spikes.assign(steps, 0.0);
  for (int i = 0; i < kernel_size; ++i) {
    double dc = 0.0;
    for (std::size_t t = static_cast<std::size_t>(i); t < steps; ++t) {
      dc += upstream[t] * spikes[t - i];
      g.spikes[t - i] += upstream[t] * taps[i];
    }
    const TapGrad tg = kernel_tap_grad(i, a, b, delay, dt);
    g.da += dc * tg.da;
    g.db += dc * tg.db;
    g.ddelay += dc * tg.ddelay;
  }
  return g;
}

}  // namespace mapsnn
