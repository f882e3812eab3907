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

// Adam, the training loop and per-epoch metrics.

#ifndef MAPSNN_TRAIN_HPP_
#define MAPSNN_TRAIN_HPP_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "mapsnn/bptt.hpp"
#include "mapsnn/events.hpp"
#include "mapsnn/network.hpp"

namespace mapsnn {

struct AdamOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  void validate() const;
};

// One bias-corrected Adam update of a flat parameter block; `step` is the
// 1-based step count after this update.
void adam_update(std::span<double> params, std::span<const double> grads,
                 std::span<double> m, std::span<double> v, std::uint64_t step,
                 const AdamOptions& options);

class Adam {
 public:
  Adam() = default;
  Adam(const AdamOptions& options, const Network& net);

  // Applies one update to every trainable group, then projects the
  // parameters back into their valid ranges. Kernel groups are left alone
  // when `kernel_trainable` is false. Throws NumericFault on a non-finite
  // gradient, before anything is modified.
  void step(Network& net, const GradBuffers& grads, bool kernel_trainable);

  const AdamOptions& options() const { return options_; }
  std::uint64_t steps() const { return step_; }
  GradBuffers& first_moment() { return m_; }
  GradBuffers& second_moment() { return v_; }
  const GradBuffers& first_moment() const { return m_; }
  const GradBuffers& second_moment() const { return v_; }
  void restore(std::uint64_t step, GradBuffers m, GradBuffers v);

 private:
  AdamOptions options_;
  std::uint64_t step_ = 0;
  GradBuffers m_;
  GradBuffers v_;
};

struct TrainOptions {
  AdamOptions adam;
  int batch = 32;
  int epochs = 20;
  std::uint64_t seed = 0;
  int threads = 1;
  bool kernel_trainable = true;

  void validate() const;
};

struct EpochMetrics {
  int epoch = 0;
  std::string split;  // "train" or "test"
  double error_rate = 0.0;
  double loss = 0.0;
  std::vector<double> spikes;  // per MAP-LIF layer, summed over the split
  double seconds = 0.0;
};

struct EvalResult {
  double error_rate = 0.0;
  double loss = 0.0;
  std::vector<double> spikes;
  std::vector<int> predictions;
};

// Forward-only pass over a dataset.
EvalResult evaluate(const Network& net, const Dataset& data, int threads = 1);

// Mean loss gradient over `indices`; per-sample gradients are merged by a
// fixed pairwise tree so the result does not depend on the thread count.
struct BatchResult {
  GradBuffers grads;
  double loss_sum = 0.0;
  int errors = 0;
  std::vector<double> spikes;
};
BatchResult batch_gradients(const Network& net, const Dataset& data,
                            std::span<const std::size_t> indices,
                            const BackwardOptions& backward, int threads);

// Sample order of one epoch, a pure function of (seed, epoch).
std::vector<std::size_t> epoch_order(std::size_t size, std::uint64_t seed, int epoch);

// State carried across epochs; everything needed to resume bit-for-bit.
struct TrainState {
  Network net;
  Adam adam;
  int epoch = 0;  // last completed epoch
  double best_test_error = std::numeric_limits<double>::infinity();
};

struct TrainHooks {
  // Called after every metrics row.
  std::function<void(const EpochMetrics&)> on_metrics;
  // Called when the test error strictly improves on the best so far.
  std::function<void(const TrainState&)> on_best;
  bool record_wall_time = false;
};

// Evaluates the test split at state.epoch when starting fresh (epoch 0), then
// trains epochs state.epoch + 1 .. options.epochs. Returns all rows emitted.
std::vector<EpochMetrics> train(TrainState& state, const Dataset& train_data,
                                const Dataset& test_data, const TrainOptions& options,
                                const TrainHooks& hooks = {});

// Metrics CSV: epoch,split,error_rate,loss,spikes_layer_0..N,seconds
std::string metrics_header(std::size_t layers);
std::string metrics_row(const EpochMetrics& m);

}  // namespace mapsnn

#endif  // MAPSNN_TRAIN_HPP_
