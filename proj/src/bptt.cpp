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

#include "mapsnn/bptt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "mapsnn/error.hpp"
#include "mapsnn/rng.hpp"

namespace mapsnn {

namespace {

void check_tape(const Network& net, const Tape& tape) {
  const auto steps = static_cast<std::size_t>(net.spec().steps);
  if (tape.steps != steps || tape.layers.size() != net.layers().size()) {
    throw Error("backward: tape is incomplete for this network");
  }
  for (std::size_t n = 0; n < tape.layers.size(); ++n) {
    const LayerTape& lt = tape.layers[n];
    const Layer& l = net.layers()[n];
    const std::size_t cells = steps * l.width;
    if (lt.width != l.width || lt.in_width != l.in_width ||
        lt.input.size() != steps * l.in_width || lt.o.size() != steps * l.in_width ||
        lt.x.size() != cells || lt.v.size() != cells || lt.n_star.size() != cells ||
        lt.s.size() != cells || lt.u.size() != cells ||
        lt.kernel.c.size() != l.in_width * lt.kernel.kernel_size) {
      throw Error("backward: tape for layer " + std::to_string(n) +
                  " is incomplete");
    }
  }
}

}  // namespace

GradBuffers backward(const Network& net, const Tape& tape,
                     std::span<const double> logit_grad,
                     const BackwardOptions& options, BackwardTrace* trace) {
  const auto steps = static_cast<std::size_t>(net.spec().steps);
  const auto classes = static_cast<std::size_t>(net.spec().num_classes());
  if (logit_grad.size() != classes) {
    throw ConfigError("backward: expected " + std::to_string(classes) +
                      " logit gradients, got " + std::to_string(logit_grad.size()));
  }
  std::vector<double> per_step(steps * classes);
  for (std::size_t t = 0; t < steps; ++t) {
    std::copy(logit_grad.begin(), logit_grad.end(), per_step.begin() + t * classes);
  }
  return backward_steps(net, tape, per_step, options, trace);
}

GradBuffers backward_steps(const Network& net, const Tape& tape,
                           std::span<const double> output_spike_grad,
                           const BackwardOptions& options, BackwardTrace* trace) {
  check_tape(net, tape);
  const NetworkSpec& spec = net.spec();
  const auto steps = static_cast<std::size_t>(spec.steps);
  const std::size_t layers = net.layers().size();
  if (output_spike_grad.size() != steps * net.layers().back().width) {
    throw ConfigError("backward: output gradient has the wrong shape");
  }
  const DendriteFilter filter;
  GradBuffers grads = net.zero_grads();
  if (trace) {
    trace->dv.assign(layers, {});
    trace->ds.assign(layers, {});
  }

  std::vector<double> gs_in(output_spike_grad.begin(), output_spike_grad.end());
  for (std::size_t n = layers; n-- > 0;) {
    const Layer& layer = net.layers()[n];
    const LayerTape& lt = tape.layers[n];
    const NeuronParams& np = layer.neurons;
    LayerGrads& g = grads.layers[n];
    const std::size_t width = layer.width;
    const std::size_t in = layer.in_width;

    std::vector<double> go(steps * in, 0.0);
    std::vector<double> gv_next(width, 0.0);
    if (trace) {
      trace->dv[n].assign(steps * width, 0.0);
      trace->ds[n].assign(steps * width, 0.0);
    }

    for (std::size_t t = steps; t-- > 0;) {
      const double* ot = lt.o.data() + t * in;
      double* got = go.data() + t * in;
      for (std::size_t k = 0; k < width; ++k) {
        const std::size_t idx = t * width + k;
        const double v = lt.v[idx];
        const double s = lt.s[idx];
        const double u = lt.u[idx];
        const double nstar = lt.n_star[idx];
        const double vth = np.v_threshold[k];
        const double q = np.q[k];
        const double tau = np.tau_decay[k];

        // V[t+1] = tau (V[t] - U[t]) + I[t+1]
        const double gvn = gv_next[k];
        const double gu = -tau * gvn;
        double gv = tau * gvn;
        g.tau_decay[k] += gvn * (v - u);

        const ConsumedGrad cg = consumed_potential_grad(np.mode, s, v, vth, q);
        const double gs = gs_in[idx] + gu * cg.ds;
        gv += gu * cg.dv;
        g.v_threshold[k] += gu * cg.dv_threshold;
        g.q[k] += gu * cg.dq;

        const double gn =
            gs * spike_surrogate(np.mode, nstar, spec.s_max, spec.relaxed);
        if (gn != 0.0) {
          const IntensityGrad ig = spike_intensity_grad(np.mode, v, vth, q);
          gv += gn * ig.dv;
          g.v_threshold[k] += gn * ig.dv_threshold;
          g.q[k] += gn * ig.dq;
        }
        gv_next[k] = gv;
        if (trace) {
          trace->dv[n][idx] = gv;
          trace->ds[n][idx] = gs;
        }

        const double gx = gv * filter.derivative(lt.x[idx]);
        if (gx == 0.0) continue;
        double* gw = g.weights.data() + k * in;
        const double* w = layer.weights.data() + k * in;
        for (std::size_t j = 0; j < in; ++j) {
          gw[j] += gx * ot[j];
          got[j] += gx * w[j];
        }
      }
    }

    // Through the presynaptic convolution.
    const SampledKernel& kernel = lt.kernel;
    const auto taps = static_cast<std::size_t>(kernel.kernel_size);
    const bool kernel_grads = options.kernel_grads && !layer.fixed_taps;
    std::vector<double> gs_prev(steps * in, 0.0);
    for (std::size_t j = 0; j < in; ++j) {
      const double* c = kernel.c.data() + j * taps;
      for (std::size_t i = 0; i < taps && i < steps; ++i) {
        double dc = 0.0;
        for (std::size_t t = i; t < steps; ++t) {
          const double up = go[t * in + j];
          dc += up * lt.input[(t - i) * in + j];
          gs_prev[(t - i) * in + j] += up * c[i];
        }
        if (kernel_grads && dc != 0.0) {
          const TapGrad tg =
              kernel_tap_grad(static_cast<int>(i), layer.kernel.a[j],
                              layer.kernel.b[j], layer.kernel.delay[j], layer.kernel.dt);
          g.kernel_a[j] += dc * tg.da;
          g.kernel_b[j] += dc * tg.db;
          g.kernel_delay[j] += dc * tg.ddelay;
        }
      }
    }
    gs_in = std::move(gs_prev);
  }

  const std::string bad = grads.first_non_finite();
  if (!bad.empty()) throw NumericFault("non-finite gradient at " + bad);
  return grads;
}

std::string_view to_string(CheckStatus status) {
  switch (status) {
    case CheckStatus::kPass:
      return "pass";
    case CheckStatus::kFail:
      return "FAIL";
    case CheckStatus::kSkipped:
      return "skipped";
    case CheckStatus::kNotApplicable:
      return "n/a";
    case CheckStatus::kExcluded:
      return "excluded";
  }
  return "?";
}

bool GradcheckReport::passed() const {
  if (boundary_hit) return false;
  return std::none_of(groups.begin(), groups.end(), [](const GradcheckGroup& g) {
    return g.status == CheckStatus::kFail;
  });
}

namespace {

// Side of every kink the relaxed forward can sit on. A perturbation that
// changes any entry straddles a non-differentiable point.
std::vector<std::uint8_t> kink_signature(const Network& net, const Tape& tape) {
  std::vector<std::uint8_t> sig;
  const NetworkSpec& spec = net.spec();
  for (std::size_t n = 0; n < tape.layers.size(); ++n) {
    const LayerTape& lt = tape.layers[n];
    const Layer& layer = net.layers()[n];
    for (std::size_t idx = 0; idx < lt.v.size(); ++idx) {
      const double nstar = lt.n_star[idx];
      std::uint8_t side;
      if (layer.neurons.mode == NeuronMode::kSsp) {
        side = nstar <= 0.0 ? 0 : (nstar >= 1.0 ? 2 : 1);
      } else {
        side = lt.v[idx] > 0.0 ? 1 : 0;
        if (nstar >= spec.s_max) side = 2;
      }
      sig.push_back(side);
    }
    if (!layer.fixed_taps) {
      for (std::size_t j = 0; j < layer.in_width; ++j) {
        for (int i = 0; i < layer.kernel.kernel_size; ++i) {
          sig.push_back(i * layer.kernel.dt - layer.kernel.delay[j] > 0.0 ? 1 : 0);
        }
      }
    }
  }
  return sig;
}

bool all_degenerate(const KernelParams& k) {
  for (std::size_t j = 0; j < k.size(); ++j) {
    if (!k.degenerate(j)) return false;
  }
  return true;
}

struct Evaluation {
  double loss;
  std::vector<std::uint8_t> signature;
};

Evaluation evaluate(const Network& net, std::span<const double> input, int label) {
  ForwardResult fr = net.forward(input, true);
  return {cross_entropy(fr.logits, label), kink_signature(net, *fr.tape)};
}

bool group_checked(NeuronMode mode, GroupKind kind, std::string* why,
                   CheckStatus* status) {
  if (kind == GroupKind::kQ && mode != NeuronMode::kSfa) {
    *status = CheckStatus::kNotApplicable;
    *why = "q unused in this mode";
    return false;
  }
  if (mode == NeuronMode::kSsp && kind != GroupKind::kWeights &&
      kind != GroupKind::kThreshold) {
    *status = CheckStatus::kExcluded;
    *why = "ssp checks weights and threshold only";
    return false;
  }
  return true;
}

// Checks explicit distances to boundaries that the sign signature cannot see
// coming: delay vs. the tap grid and n* vs. the spike cap.
std::string near_boundary(const Network& net, const Tape& tape, double margin) {
  for (std::size_t n = 0; n < net.layers().size(); ++n) {
    const Layer& l = net.layers()[n];
    if (!l.fixed_taps) {
      for (std::size_t j = 0; j < l.in_width; ++j) {
        for (int i = 0; i < l.kernel.kernel_size; ++i) {
          if (std::abs(i * l.kernel.dt - l.kernel.delay[j]) < margin) {
            return "delay on a tap";
          }
        }
      }
    }
    const LayerTape& lt = tape.layers[n];
    for (std::size_t idx = 0; idx < lt.n_star.size(); ++idx) {
      const double nstar = lt.n_star[idx];
      if (l.neurons.mode == NeuronMode::kSsp) {
        if (std::abs(nstar - 1.0) < margin) return "ssp intensity at threshold";
      } else if (std::abs(nstar - net.spec().s_max) < margin) {
        return "intensity at the spike cap";
      }
    }
  }
  return {};
}

}  // namespace

GradcheckReport gradcheck_network(Network net, std::span<const double> input,
                                  int label, const GradcheckOptions& options) {
  net.mutable_spec().relaxed = true;
  const NetworkSpec spec = net.spec();
  const NeuronMode mode = net.layers().front().neurons.mode;

  GradcheckReport report;
  report.mode = mode;
  report.widths = spec.widths;
  report.steps = spec.steps;
  report.kernel_size = spec.kernel_size;
  report.dt = spec.dt;

  ForwardResult base = net.forward(input, true);
  std::vector<double> logit_grad;
  cross_entropy(base.logits, label, &logit_grad);
  GradBuffers analytic = backward(net, *base.tape, logit_grad);
  const std::vector<std::uint8_t> base_sig = kink_signature(net, *base.tape);

  const std::string reason = near_boundary(net, *base.tape, options.boundary_margin);
  if (!reason.empty()) {
    report.boundary_hit = true;
    report.boundary_reason = reason;
    return report;
  }

  std::vector<ParamGroup> params = net.parameter_groups();
  std::vector<ParamGroup> grads = analytic.groups();
  for (GroupKind kind : kAllGroupKinds) {
    GradcheckGroup row;
    row.kind = kind;
    std::string why;
    CheckStatus status = CheckStatus::kPass;
    const bool checked = group_checked(mode, kind, &why, &status);

    for (std::size_t gi = 0; gi < params.size(); ++gi) {
      if (params[gi].kind != kind) continue;
      ParamGroup& p = params[gi];
      const ParamGroup& ga = grads[gi];
      const Layer& layer = net.layers()[p.layer];
      const bool dead_kernel =
          is_kernel_group(kind) && (layer.fixed_taps || all_degenerate(layer.kernel));
      row.count += p.values.size();
      for (double g : ga.values) {
        row.max_abs_grad = std::max(row.max_abs_grad, std::abs(g));
      }
      if (!checked || dead_kernel) {
        if (checked && dead_kernel) {
          status = CheckStatus::kSkipped;
          why = "dead kernel (a = b), gradients all zero";
        }
        continue;
      }
      for (std::size_t i = 0; i < p.values.size(); ++i) {
        const double orig = p.values[i];
        const double h = options.step * std::max(1.0, std::abs(orig));
        p.values[i] = orig + h;
        const Evaluation plus = evaluate(net, input, label);
        p.values[i] = orig - h;
        const Evaluation minus = evaluate(net, input, label);
        p.values[i] = orig;
        if (plus.signature != base_sig || minus.signature != base_sig) {
          report.boundary_hit = true;
          report.boundary_reason = "perturbing " + p.name + " crosses a kink";
          return report;
        }
        const double fd = (plus.loss - minus.loss) / (2.0 * h);
        const double a = ga.values[i];
        const double denom =
            std::max({std::abs(a), std::abs(fd), options.abs_floor});
        row.max_rel_error = std::max(row.max_rel_error, std::abs(a - fd) / denom);
      }
    }
    if (status == CheckStatus::kPass && checked) {
      status = row.max_rel_error < options.tolerance ? CheckStatus::kPass
                                                     : CheckStatus::kFail;
    }
    row.status = status;
    row.note = why;
    report.groups.push_back(row);
  }
  return report;
}

namespace {

struct MicroProblem {
  Network net;
  std::vector<double> input;
  int label;
};

MicroProblem random_micro_problem(NeuronMode mode, std::mt19937_64& rng) {
  auto pick = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto uni = [&](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };
  NetworkSpec spec;
  spec.mode = mode;
  spec.relaxed = true;
  spec.widths.push_back(pick(2, 8));
  if (pick(0, 1) == 1) spec.widths.push_back(pick(2, 8));
  spec.widths.push_back(pick(2, 8));
  spec.steps = pick(4, 16);
  spec.kernel_size = pick(2, 8);
  spec.dt = uni(0.5, 2.0);

  std::vector<Layer> layers;
  for (std::size_t n = 0; n + 1 < spec.widths.size(); ++n) {
    Layer l;
    l.in_width = static_cast<std::size_t>(spec.widths[n]);
    l.width = static_cast<std::size_t>(spec.widths[n + 1]);
    l.weights.resize(l.width * l.in_width);
    // Scaled so logits stay O(1); a saturated softmax leaves gradients that
    // finite differences cannot resolve.
    const double scale = 1.0 / std::sqrt(static_cast<double>(l.in_width));
    for (auto& w : l.weights) w = uni(-0.5, 1.0) * scale;
    l.neurons.mode = mode;
    for (std::size_t k = 0; k < l.width; ++k) {
      l.neurons.v_threshold.push_back(uni(0.5, 1.5));
      l.neurons.tau_decay.push_back(uni(0.3, 0.9));
      l.neurons.q.push_back(uni(1.5, 3.0));
    }
    l.kernel.kernel_size = spec.kernel_size;
    l.kernel.dt = spec.dt;
    for (std::size_t j = 0; j < l.in_width; ++j) {
      l.kernel.a.push_back(uni(0.1, 0.5) / spec.dt);
      l.kernel.b.push_back(uni(0.6, 1.5) / spec.dt);
      l.kernel.delay.push_back(uni(0.0, 2.0 * spec.dt));
    }
    layers.push_back(std::move(l));
  }
  const int max_count = mode == NeuronMode::kSsp ? 1 : 3;
  std::vector<double> input(static_cast<std::size_t>(spec.steps) * spec.widths[0]);
  for (auto& x : input) x = pick(0, max_count);
  const int label = pick(0, spec.widths.back() - 1);
  return {Network(spec, std::move(layers)), std::move(input), label};
}

}  // namespace

GradcheckReport gradcheck(NeuronMode mode, std::uint64_t seed,
                          const GradcheckOptions& options) {
  for (int attempt = 0; attempt <= options.max_resamples; ++attempt) {
    auto rng = make_rng(seed, streams::kGradcheck, attempt);
    MicroProblem p = random_micro_problem(mode, rng);
    GradcheckReport r = gradcheck_network(std::move(p.net), p.input, p.label, options);
    if (r.boundary_hit) continue;
    r.seed = seed;
    r.resamples = attempt;
    return r;
  }
  throw Error("gradcheck: no boundary-free point found after " +
              std::to_string(options.max_resamples) + " resamples");
}

std::string format_report(const GradcheckReport& r) {
  std::ostringstream os;
  os << "gradcheck seed=" << r.seed << " mode=" << to_string(r.mode) << " widths=";
  for (std::size_t i = 0; i < r.widths.size(); ++i) {
    os << (i ? "-" : "") << r.widths[i];
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, " T=%d kernel_size=%d dt=%.4f resamples=%d\n",
                r.steps, r.kernel_size, r.dt, r.resamples);
  os << buf;
  std::snprintf(buf, sizeof buf, "  %-14s %6s %12s %12s  %s\n", "group", "count",
                "max|grad|", "max_rel_err", "status");
  os << buf;
  for (const GradcheckGroup& g : r.groups) {
    std::snprintf(buf, sizeof buf, "  %-14s %6zu %12.4e %12.4e  %s",
                  std::string(group_name(g.kind)).c_str(), g.count, g.max_abs_grad,
                  g.max_rel_error, std::string(to_string(g.status)).c_str());
    os << buf;
    if (!g.note.empty()) os << " (" << g.note << ")";
    os << "\n";
  }
  return os.str();
}

}  // namespace mapsnn
