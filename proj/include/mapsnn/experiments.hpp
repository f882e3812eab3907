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

// Experiment drivers behind the CLI subcommands. Each one validates its
// inputs and loads its data before creating any output file, writes CSVs
// into the output directory, and returns a summary for callers that want
// numbers rather than files.
//
// CSV schemas (all numbers printed with fixed formats, so reruns with the
// same config and seed are byte-identical):
//   metrics     epoch,split,error_rate,loss,spikes_layer_0..N,seconds
//   sweep-dt    dt,pattern,mode,steps,final_error,final_loss
//   compare-*   variant,epoch,split,error_rate,loss,spikes_layer_0..N,seconds
//   trace       t,I,v,n_star,s,u,o
//   gradcheck   seed,mode,group,count,max_abs_grad,max_rel_error,status
//   eval        split,samples,error_rate,loss,spikes_layer_0..N
//   convert     file,format,status,events,units,duration_us,detail

#ifndef MAPSNN_EXPERIMENTS_HPP_
#define MAPSNN_EXPERIMENTS_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mapsnn/bptt.hpp"
#include "mapsnn/config.hpp"
#include "mapsnn/events.hpp"
#include "mapsnn/train.hpp"

namespace mapsnn {

struct RunOptions {
  std::filesystem::path out_dir = ".";
  // Progress lines go here when set.
  std::ostream* log = nullptr;
};

// Applies the global --seed / --threads flags.
void apply_overrides(ExperimentConfig& config, std::optional<std::uint64_t> seed,
                     std::optional<int> threads);

struct DataSplits {
  Dataset train;
  Dataset test;
};

// Loads or generates the configured data and bins it with the network's dt,
// T and spike pattern. Throws ConfigError when the data does not fit the
// network's input or output width.
DataSplits load_data(const ExperimentConfig& config);

struct TrainSummary {
  std::vector<EpochMetrics> rows;
  double final_error = 0.0;
  double final_loss = 0.0;
  std::vector<double> final_test_spikes;  // per layer, test split, last epoch
  double best_test_error = 0.0;
  int start_epoch = 0;  // > 0 after resuming
};

// Trains a fresh model, or resumes from train.resume_from, writing the
// metrics CSV and the best-so-far checkpoint.
TrainSummary cmd_train(const ExperimentConfig& config, const RunOptions& run);

// Evaluates a checkpoint on the configured test split.
EvalResult cmd_eval(const ExperimentConfig& config,
                    const std::filesystem::path& checkpoint, const RunOptions& run);

struct SweepCell {
  double dt = 0.0;
  SpikePattern pattern = SpikePattern::kMsp;
  NeuronMode mode = NeuronMode::kLinear;
  int steps = 0;
  double final_error = 0.0;
  double final_loss = 0.0;
};

inline const std::vector<double> kDefaultSweepDts = {1.0, 2.0, 4.0, 8.0};

// One model per (dt, pattern) cell. The simulated window T * dt of the
// config is held fixed, so T scales as 1 / dt. The SSP cell runs SSP
// neurons on binary input; the MSP cell runs the config's MSP mode (Linear
// when the config asks for SSP). `parallel` trains cells on separate threads.
std::vector<SweepCell> cmd_sweep_dt(const ExperimentConfig& config,
                                    const std::vector<double>& dts,
                                    const RunOptions& run, bool parallel = false);

// Spread (max - min) of final errors per pattern.
double error_spread(const std::vector<SweepCell>& cells, SpikePattern pattern);

struct TwinSummary {
  TrainSummary first;   // SFA, or trainable kernels
  TrainSummary second;  // Linear, or frozen kernels
};

// SFA versus Linear MSP twins with identical seeds.
struct SfaComparison {
  TwinSummary runs;
  double sfa_spikes = 0.0;     // all layers, test split, final epoch
  double linear_spikes = 0.0;
  double ratio = 0.0;          // linear / sfa
};
SfaComparison cmd_compare_sfa(const ExperimentConfig& config, const RunOptions& run);

// Trainable versus frozen kernels with identical seeds.
struct PlasticityComparison {
  TwinSummary runs;
  int half_epoch = 0;
  double trainable_loss_half = 0.0;
  double frozen_loss_half = 0.0;
  double trainable_loss_final = 0.0;
  double frozen_loss_final = 0.0;
};
PlasticityComparison cmd_compare_plasticity(const ExperimentConfig& config,
                                            const RunOptions& run);

// Single-neuron trace driven by a piecewise-constant current density.
struct ScheduleSegment {
  double value = 0.0;        // current density; step input is value * dt
  double duration_ms = 0.0;
};
// "VALUE@DURATION_MS,VALUE@DURATION_MS,..."; throws ConfigError.
std::vector<ScheduleSegment> parse_schedule(std::string_view text);

struct TraceOptions {
  NeuronMode mode = NeuronMode::kSfa;
  double dt = 1.0;
  double window_ms = 64.0;
  std::vector<ScheduleSegment> schedule;
  double v_threshold = 1.0;
  double tau_decay = 0.7;
  double q = 2.0;
  int s_max = kDefaultSpikeCap;
  double kernel_a = 0.2;
  double kernel_b = 1.0;
  double kernel_delay = 0.0;
  int kernel_size = kDefaultKernelSize;

  void validate() const;
};

struct TraceRow {
  double t = 0.0;  // ms, start of the step
  double i = 0.0;
  double v = 0.0;
  double n_star = 0.0;
  double s = 0.0;
  double u = 0.0;
  double o = 0.0;
};

std::vector<TraceRow> trace_neuron(const TraceOptions& options);
double total_spikes(const std::vector<TraceRow>& rows);

// Runs trace_neuron and writes `csv_name` into the output directory.
std::vector<TraceRow> cmd_trace_neuron(const TraceOptions& options,
                                       const RunOptions& run,
                                       const std::string& csv_name = "trace.csv");

// Checks `count` micro-networks with seeds seed, seed + 1, ... cycling
// through SFA, Linear and SSP.
std::vector<GradcheckReport> cmd_gradcheck(std::uint64_t seed, int count,
                                           const RunOptions& run,
                                           const GradcheckOptions& options = {});

struct ConvertCheckResult {
  std::filesystem::path file;
  bool ok = false;
  std::uint64_t events = 0;
  std::uint32_t units = 0;
  std::uint64_t duration_us = 0;
  std::string detail;
};

// Parses every file and reports per-file status; never throws on a bad file.
std::vector<ConvertCheckResult> cmd_convert_check(
    const std::vector<std::filesystem::path>& files, EventFormat format,
    const RunOptions& run, bool merge_polarity = false);

}  // namespace mapsnn

#endif  // MAPSNN_EXPERIMENTS_HPP_
