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

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <numeric>
#include <thread>

#include "mapsnn/bptt.hpp"
#include "mapsnn/error.hpp"
#include "mapsnn/rng.hpp"
#include "mapsnn/train.hpp"

namespace mapsnn {

void TrainOptions::validate() const {
  adam.validate();
  if (batch < 1) throw ConfigError("train.batch must be at least 1");
  if (epochs < 0) throw ConfigError("train.epochs must be non-negative");
  if (threads < 1) throw ConfigError("train.threads must be at least 1");
}

namespace {

// Runs fn(i) for i in [0, count) on up to `threads` workers, each taking a
// contiguous slice. The first exception is rethrown on the caller.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn fn) {
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Pairwise sum in a fixed order: (0+1), (2+3), ... then (0+2), ...
template <class T, class Add>
void tree_reduce(std::vector<T>& items, Add add) {
  for (std::size_t stride = 1; stride < items.size(); stride *= 2) {
    for (std::size_t i = 0; i + stride < items.size(); i += 2 * stride) {
      add(items[i], items[i + stride]);
    }
  }
}

struct SampleResult {
  GradBuffers grads;
  double loss = 0.0;
  bool error = false;
  std::vector<double> spikes;
};

void add_spikes(std::vector<double>& into, const std::vector<double>& from) {
  if (into.empty()) into.assign(from.size(), 0.0);
  for (std::size_t i = 0; i < from.size(); ++i) into[i] += from[i];
}

void check_dataset(const Network& net, const Dataset& data) {
  if (data.inputs.size() != data.labels.size()) {
    throw ConfigError("dataset has mismatched inputs and labels");
  }
  for (int label : data.labels) {
    if (label < 0 || label >= net.spec().num_classes()) {
      throw ConfigError("label " + std::to_string(label) + " does not fit " +
                        std::to_string(net.spec().num_classes()) + " output units");
    }
  }
}

}  // namespace

EvalResult evaluate(const Network& net, const Dataset& data, int threads) {
  check_dataset(net, data);
  const std::size_t n = data.size();
  std::vector<SampleResult> results(n);
  std::vector<int> predictions(n);
  parallel_for(n, threads, [&](std::size_t i) {
    ForwardResult fr = net.forward(data.inputs[i], false);
    results[i].loss = cross_entropy(fr.logits, data.labels[i]);
    predictions[i] = predict(fr.logits);
    results[i].error = predictions[i] != data.labels[i];
    results[i].spikes = std::move(fr.spike_totals);
  });
  EvalResult out;
  out.spikes.assign(net.layers().size(), 0.0);
  double loss = 0.0;
  int errors = 0;
  for (const SampleResult& r : results) {
    loss += r.loss;
    errors += r.error ? 1 : 0;
    add_spikes(out.spikes, r.spikes);
  }
  if (n > 0) {
    out.loss = loss / static_cast<double>(n);
    out.error_rate = static_cast<double>(errors) / static_cast<double>(n);
  }
  out.predictions = std::move(predictions);
  return out;
}

BatchResult batch_gradients(const Network& net, const Dataset& data,
                            std::span<const std::size_t> indices,
                            const BackwardOptions& backward_options, int threads) {
  std::vector<SampleResult> results(indices.size());
  parallel_for(indices.size(), threads, [&](std::size_t k) {
    const std::size_t i = indices[k];
    ForwardResult fr = net.forward(data.inputs[i], true);
    std::vector<double> logit_grad;
    results[k].loss = cross_entropy(fr.logits, data.labels[i], &logit_grad);
    results[k].error = predict(fr.logits) != data.labels[i];
    results[k].spikes = std::move(fr.spike_totals);
    results[k].grads = backward(net, *fr.tape, logit_grad, backward_options);
  });
  BatchResult out;
  out.spikes.assign(net.layers().size(), 0.0);
  for (const SampleResult& r : results) {
    out.loss_sum += r.loss;
    out.errors += r.error ? 1 : 0;
    add_spikes(out.spikes, r.spikes);
  }
  if (results.empty()) {
    out.grads = net.zero_grads();
    return out;
  }
  tree_reduce(results, [](SampleResult& a, const SampleResult& b) {
    a.grads.add(b.grads);
  });
  out.grads = std::move(results.front().grads);
  out.grads.scale(1.0 / static_cast<double>(indices.size()));
  return out;
}

std::vector<std::size_t> epoch_order(std::size_t size, std::uint64_t seed, int epoch) {
  std::vector<std::size_t> order(size);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto rng = make_rng(seed, streams::kShuffle, static_cast<std::uint64_t>(epoch));
  // Fisher-Yates with an explicit draw so the permutation does not depend on
  // the standard library's shuffle.
  for (std::size_t i = size; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

std::vector<EpochMetrics> train(TrainState& state, const Dataset& train_data,
                                const Dataset& test_data, const TrainOptions& options,
                                const TrainHooks& hooks) {
  options.validate();
  check_dataset(state.net, train_data);
  check_dataset(state.net, test_data);
  using Clock = std::chrono::steady_clock;
  auto elapsed = [&](Clock::time_point since) {
    return hooks.record_wall_time
               ? std::chrono::duration<double>(Clock::now() - since).count()
               : 0.0;
  };

  std::vector<EpochMetrics> rows;
  auto emit = [&](EpochMetrics m) {
    if (hooks.on_metrics) hooks.on_metrics(m);
    rows.push_back(std::move(m));
  };
  auto test_row = [&](int epoch, Clock::time_point since) {
    const EvalResult r = evaluate(state.net, test_data, options.threads);
    emit({epoch, "test", r.error_rate, r.loss, r.spikes, elapsed(since)});
    if (!test_data.inputs.empty() && r.error_rate < state.best_test_error) {
      state.best_test_error = r.error_rate;
      if (hooks.on_best) hooks.on_best(state);
    }
  };

  if (state.epoch == 0) test_row(0, Clock::now());

  const BackwardOptions backward_options{options.kernel_trainable};
  const auto batch = static_cast<std::size_t>(options.batch);
  for (int epoch = state.epoch + 1; epoch <= options.epochs; ++epoch) {
    const auto start = Clock::now();
    const std::vector<std::size_t> order =
        epoch_order(train_data.size(), options.seed, epoch);
    double loss_sum = 0.0;
    int errors = 0;
    std::vector<double> spikes(state.net.layers().size(), 0.0);
    for (std::size_t b = 0; b < order.size(); b += batch) {
      const std::size_t end = std::min(order.size(), b + batch);
      BatchResult r = batch_gradients(
          state.net, train_data, std::span(order).subspan(b, end - b),
          backward_options, options.threads);
      loss_sum += r.loss_sum;
      errors += r.errors;
      add_spikes(spikes, r.spikes);
      state.adam.step(state.net, r.grads, options.kernel_trainable);
    }
    state.epoch = epoch;
    const double n = std::max<double>(1.0, static_cast<double>(order.size()));
    emit({epoch, "train", errors / n, loss_sum / n, spikes, elapsed(start)});
    test_row(epoch, start);
  }
  return rows;
}

std::string metrics_header(std::size_t layers) {
  std::string h = "epoch,split,error_rate,loss";
  for (std::size_t n = 0; n < layers; ++n) h += ",spikes_layer_" + std::to_string(n);
  return h + ",seconds";
}

std::string metrics_row(const EpochMetrics& m) {
  char buf[64];
  std::string row = std::to_string(m.epoch) + "," + m.split;
  std::snprintf(buf, sizeof buf, ",%.6f,%.9f", m.error_rate, m.loss);
  row += buf;
  for (double s : m.spikes) {
    std::snprintf(buf, sizeof buf, ",%.17g", s);
    row += buf;
  }
  std::snprintf(buf, sizeof buf, ",%.3f", m.seconds);
  return row + buf;
}

}  // namespace mapsnn
