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

#include "mapsnn/mapsnn.h"

#include <algorithm>
#include <cstring>
#include <iostream>
#include <new>
#include <string>
#include <vector>

#include "mapsnn/checkpoint.hpp"
#include "mapsnn/config.hpp"
#include "mapsnn/error.hpp"
#include "mapsnn/experiments.hpp"

struct mapsnn_config {
  mapsnn::ExperimentConfig config;
};

struct mapsnn_model {
  mapsnn::Network net;
};

namespace {

thread_local std::string g_last_error;

mapsnn_status fail(mapsnn_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `fn`, translating exceptions into status codes.
template <class Fn>
mapsnn_status guarded(Fn fn) {
  g_last_error.clear();
  try {
    fn();
    return MAPSNN_OK;
  } catch (const mapsnn::ConfigError& e) {
    return fail(MAPSNN_ERR_CONFIG, e.what());
  } catch (const mapsnn::IoError& e) {
    return fail(MAPSNN_ERR_IO, e.what());
  } catch (const mapsnn::FormatError& e) {
    return fail(MAPSNN_ERR_FORMAT, e.what());
  } catch (const mapsnn::NumericFault& e) {
    return fail(MAPSNN_ERR_NUMERIC, e.what());
  } catch (const std::bad_alloc&) {
    return fail(MAPSNN_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(MAPSNN_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MAPSNN_ERR_INTERNAL, "unknown error");
  }
}

mapsnn::RunOptions run_options(const mapsnn_run_options* run) {
  mapsnn::RunOptions r;
  if (run && run->out_dir) r.out_dir = run->out_dir;
  if (run && run->verbose) r.log = &std::cerr;
  return r;
}

bool to_mode(int mode, mapsnn::NeuronMode& out) {
  switch (mode) {
    case MAPSNN_MODE_SFA:
      out = mapsnn::NeuronMode::kSfa;
      return true;
    case MAPSNN_MODE_LINEAR:
      out = mapsnn::NeuronMode::kLinear;
      return true;
    case MAPSNN_MODE_SSP:
      out = mapsnn::NeuronMode::kSsp;
      return true;
  }
  return false;
}

mapsnn_mode from_mode(mapsnn::NeuronMode mode) {
  switch (mode) {
    case mapsnn::NeuronMode::kSfa:
      return MAPSNN_MODE_SFA;
    case mapsnn::NeuronMode::kLinear:
      return MAPSNN_MODE_LINEAR;
    case mapsnn::NeuronMode::kSsp:
      return MAPSNN_MODE_SSP;
  }
  return MAPSNN_MODE_SFA;
}

bool to_format(int format, mapsnn::EventFormat& out) {
  if (format == MAPSNN_FORMAT_NMNIST) {
    out = mapsnn::EventFormat::kNmnist;
    return true;
  }
  if (format == MAPSNN_FORMAT_PORTABLE) {
    out = mapsnn::EventFormat::kPortable;
    return true;
  }
  return false;
}

#define MAPSNN_REQUIRE(cond, what)                                \
  do {                                                            \
    if (!(cond)) return fail(MAPSNN_ERR_INVALID_ARGUMENT, what);  \
  } while (0)

}  // namespace

extern "C" {

const char* mapsnn_version(void) { return "1.0.0"; }

const char* mapsnn_status_name(mapsnn_status status) {
  switch (status) {
    case MAPSNN_OK:
      return "ok";
    case MAPSNN_ERR_INVALID_ARGUMENT:
      return "invalid argument";
    case MAPSNN_ERR_CONFIG:
      return "configuration error";
    case MAPSNN_ERR_IO:
      return "i/o error";
    case MAPSNN_ERR_FORMAT:
      return "format error";
    case MAPSNN_ERR_NUMERIC:
      return "numeric fault";
    case MAPSNN_ERR_INTERNAL:
      return "internal error";
    case MAPSNN_ERR_BUFFER_TOO_SMALL:
      return "buffer too small";
  }
  return "unknown status";
}

const char* mapsnn_last_error(void) { return g_last_error.c_str(); }

mapsnn_status mapsnn_config_load(const char* path, mapsnn_config** out) {
  MAPSNN_REQUIRE(path && out, "path and out must not be null");
  *out = nullptr;
  return guarded([&] { *out = new mapsnn_config{mapsnn::load_config(path)}; });
}

mapsnn_status mapsnn_config_parse(const char* json, const char* base_dir,
                                  mapsnn_config** out) {
  MAPSNN_REQUIRE(json && out, "json and out must not be null");
  *out = nullptr;
  return guarded([&] {
    *out = new mapsnn_config{
        mapsnn::parse_config(json, base_dir ? std::filesystem::path(base_dir)
                                            : std::filesystem::path())};
  });
}

void mapsnn_config_free(mapsnn_config* config) { delete config; }

mapsnn_status mapsnn_config_set_seed(mapsnn_config* config, uint64_t seed) {
  MAPSNN_REQUIRE(config, "config must not be null");
  return guarded([&] { mapsnn::apply_overrides(config->config, seed, std::nullopt); });
}

mapsnn_status mapsnn_config_set_threads(mapsnn_config* config, int threads) {
  MAPSNN_REQUIRE(config, "config must not be null");
  return guarded([&] { mapsnn::apply_overrides(config->config, std::nullopt, threads); });
}

mapsnn_status mapsnn_config_to_json(const mapsnn_config* config, char* buffer,
                                    size_t capacity, size_t* needed) {
  MAPSNN_REQUIRE(config, "config must not be null");
  MAPSNN_REQUIRE(buffer || capacity == 0, "buffer is null but capacity is not 0");
  std::string text;
  const mapsnn_status st = guarded([&] { text = mapsnn::to_json(config->config); });
  if (st != MAPSNN_OK) return st;
  if (needed) *needed = text.size() + 1;
  if (capacity < text.size() + 1) {
    return fail(MAPSNN_ERR_BUFFER_TOO_SMALL, "buffer holds " + std::to_string(capacity) +
                                                 " bytes, need " +
                                                 std::to_string(text.size() + 1));
  }
  std::memcpy(buffer, text.c_str(), text.size() + 1);
  return MAPSNN_OK;
}

mapsnn_status mapsnn_train(const mapsnn_config* config, const mapsnn_run_options* run,
                           mapsnn_train_result* result) {
  MAPSNN_REQUIRE(config, "config must not be null");
  return guarded([&] {
    const mapsnn::TrainSummary s = mapsnn::cmd_train(config->config, run_options(run));
    if (result) {
      result->final_error = s.final_error;
      result->final_loss = s.final_loss;
      result->best_test_error = s.best_test_error;
      result->start_epoch = s.start_epoch;
      result->end_epoch = config->config.train.epochs;
    }
  });
}

mapsnn_status mapsnn_eval(const mapsnn_config* config, const char* checkpoint,
                          const mapsnn_run_options* run, double* error_rate,
                          double* loss) {
  MAPSNN_REQUIRE(config && checkpoint, "config and checkpoint must not be null");
  return guarded([&] {
    const mapsnn::EvalResult r = mapsnn::cmd_eval(config->config, checkpoint, run_options(run));
    if (error_rate) *error_rate = r.error_rate;
    if (loss) *loss = r.loss;
  });
}

mapsnn_status mapsnn_sweep_dt(const mapsnn_config* config, const double* dts,
                              size_t num_dts, int parallel, const mapsnn_run_options* run,
                              mapsnn_sweep_cell* cells, size_t capacity, size_t* count) {
  MAPSNN_REQUIRE(config, "config must not be null");
  MAPSNN_REQUIRE(dts || num_dts == 0, "dts is null but num_dts is not 0");
  MAPSNN_REQUIRE(cells || capacity == 0, "cells is null but capacity is not 0");
  std::vector<mapsnn::SweepCell> out;
  const mapsnn_status st = guarded([&] {
    const std::vector<double> list =
        dts ? std::vector<double>(dts, dts + num_dts) : mapsnn::kDefaultSweepDts;
    out = mapsnn::cmd_sweep_dt(config->config, list, run_options(run), parallel != 0);
  });
  if (st != MAPSNN_OK) return st;
  if (count) *count = out.size();
  for (std::size_t i = 0; i < std::min(capacity, out.size()); ++i) {
    cells[i] = {out[i].dt,
                out[i].pattern == mapsnn::SpikePattern::kSsp ? MAPSNN_PATTERN_SSP
                                                             : MAPSNN_PATTERN_MSP,
                from_mode(out[i].mode),
                out[i].steps,
                out[i].final_error,
                out[i].final_loss};
  }
  if (capacity < out.size() && cells) {
    return fail(MAPSNN_ERR_BUFFER_TOO_SMALL, "sweep produced " + std::to_string(out.size()) +
                                                 " cells");
  }
  return MAPSNN_OK;
}

mapsnn_status mapsnn_compare_sfa(const mapsnn_config* config, const mapsnn_run_options* run,
                                 mapsnn_sfa_result* result) {
  MAPSNN_REQUIRE(config, "config must not be null");
  return guarded([&] {
    const mapsnn::SfaComparison c = mapsnn::cmd_compare_sfa(config->config, run_options(run));
    if (result) {
      *result = {c.runs.first.final_error, c.runs.second.final_error, c.sfa_spikes,
                 c.linear_spikes, c.ratio};
    }
  });
}

mapsnn_status mapsnn_compare_plasticity(const mapsnn_config* config,
                                        const mapsnn_run_options* run,
                                        mapsnn_plasticity_result* result) {
  MAPSNN_REQUIRE(config, "config must not be null");
  return guarded([&] {
    const mapsnn::PlasticityComparison c =
        mapsnn::cmd_compare_plasticity(config->config, run_options(run));
    if (result) {
      *result = {c.half_epoch,           c.trainable_loss_half,
                 c.frozen_loss_half,     c.trainable_loss_final,
                 c.frozen_loss_final,    c.runs.first.final_error,
                 c.runs.second.final_error};
    }
  });
}

void mapsnn_trace_options_default(mapsnn_trace_options* options) {
  if (!options) return;
  const mapsnn::TraceOptions d;
  options->mode = from_mode(d.mode);
  options->dt = d.dt;
  options->window_ms = d.window_ms;
  options->schedule = nullptr;
  options->v_threshold = d.v_threshold;
  options->tau_decay = d.tau_decay;
  options->q = d.q;
  options->s_max = d.s_max;
  options->kernel_a = d.kernel_a;
  options->kernel_b = d.kernel_b;
  options->kernel_delay = d.kernel_delay;
  options->kernel_size = d.kernel_size;
}

mapsnn_status mapsnn_trace_neuron(const mapsnn_trace_options* options,
                                  const mapsnn_run_options* run, double* total_spikes) {
  MAPSNN_REQUIRE(options, "options must not be null");
  mapsnn::TraceOptions o;
  MAPSNN_REQUIRE(to_mode(options->mode, o.mode), "unknown neuron mode");
  return guarded([&] {
    o.dt = options->dt;
    o.window_ms = options->window_ms;
    if (options->schedule) o.schedule = mapsnn::parse_schedule(options->schedule);
    o.v_threshold = options->v_threshold;
    o.tau_decay = options->tau_decay;
    o.q = options->q;
    o.s_max = options->s_max;
    o.kernel_a = options->kernel_a;
    o.kernel_b = options->kernel_b;
    o.kernel_delay = options->kernel_delay;
    o.kernel_size = options->kernel_size;
    const auto rows = mapsnn::cmd_trace_neuron(o, run_options(run));
    if (total_spikes) *total_spikes = mapsnn::total_spikes(rows);
  });
}

mapsnn_status mapsnn_gradcheck(uint64_t seed, int count, const mapsnn_run_options* run,
                               int* passed, double* max_rel_error) {
  return guarded([&] {
    const auto reports = mapsnn::cmd_gradcheck(seed, count, run_options(run));
    bool ok = true;
    double worst = 0.0;
    for (const auto& r : reports) {
      ok = ok && r.passed();
      for (const auto& g : r.groups) {
        if (g.status == mapsnn::CheckStatus::kPass || g.status == mapsnn::CheckStatus::kFail) {
          worst = std::max(worst, g.max_rel_error);
        }
      }
    }
    if (passed) *passed = ok ? 1 : 0;
    if (max_rel_error) *max_rel_error = worst;
  });
}

mapsnn_status mapsnn_convert_check(const char* const* files, size_t num_files,
                                   mapsnn_format format, int merge_polarity,
                                   const mapsnn_run_options* run, size_t* failures) {
  MAPSNN_REQUIRE(files || num_files == 0, "files is null but num_files is not 0");
  mapsnn::EventFormat f;
  MAPSNN_REQUIRE(to_format(format, f), "unknown event format");
  return guarded([&] {
    std::vector<std::filesystem::path> paths;
    for (size_t i = 0; i < num_files; ++i) {
      if (!files[i]) throw mapsnn::ConfigError("file path " + std::to_string(i) + " is null");
      paths.emplace_back(files[i]);
    }
    const auto results = mapsnn::cmd_convert_check(paths, f, run_options(run), merge_polarity);
    if (failures) {
      *failures = static_cast<size_t>(
          std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.ok; }));
    }
  });
}

mapsnn_status mapsnn_convert_check_manifest(const char* manifest, mapsnn_format format,
                                            int merge_polarity, const mapsnn_run_options* run,
                                            size_t* checked, size_t* failures) {
  MAPSNN_REQUIRE(manifest, "manifest must not be null");
  mapsnn::EventFormat f;
  MAPSNN_REQUIRE(to_format(format, f), "unknown event format");
  return guarded([&] {
    std::vector<std::filesystem::path> paths;
    for (const auto& e : mapsnn::read_manifest(manifest)) paths.push_back(e.path);
    const auto results = mapsnn::cmd_convert_check(paths, f, run_options(run), merge_polarity);
    if (checked) *checked = results.size();
    if (failures) {
      *failures = static_cast<size_t>(
          std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.ok; }));
    }
  });
}

mapsnn_status mapsnn_model_load(const char* checkpoint, mapsnn_model** out) {
  MAPSNN_REQUIRE(checkpoint && out, "checkpoint and out must not be null");
  *out = nullptr;
  return guarded([&] {
    mapsnn::Checkpoint ck = mapsnn::load_checkpoint(checkpoint);
    *out = new mapsnn_model{std::move(ck.state.net)};
  });
}

void mapsnn_model_free(mapsnn_model* model) { delete model; }

mapsnn_status mapsnn_model_shape(const mapsnn_model* model, int* input_width, int* steps,
                                 int* num_classes) {
  MAPSNN_REQUIRE(model, "model must not be null");
  const mapsnn::NetworkSpec& spec = model->net.spec();
  if (input_width) *input_width = spec.input_width();
  if (steps) *steps = spec.steps;
  if (num_classes) *num_classes = spec.num_classes();
  return MAPSNN_OK;
}

mapsnn_status mapsnn_model_forward(const mapsnn_model* model, const int32_t* counts,
                                   size_t num_counts, double* logits, size_t capacity,
                                   int* predicted) {
  MAPSNN_REQUIRE(model && counts, "model and counts must not be null");
  const mapsnn::NetworkSpec& spec = model->net.spec();
  const auto steps = static_cast<std::size_t>(spec.steps);
  const auto units = static_cast<std::size_t>(spec.input_width());
  if (num_counts != steps * units) {
    return fail(MAPSNN_ERR_CONFIG, "input has " + std::to_string(num_counts) +
                                       " counts, the model expects " +
                                       std::to_string(steps) + " x " + std::to_string(units));
  }
  const auto classes = static_cast<std::size_t>(spec.num_classes());
  MAPSNN_REQUIRE(logits || capacity == 0, "logits is null but capacity is not 0");
  if (capacity < classes) {
    return fail(MAPSNN_ERR_BUFFER_TOO_SMALL,
                "logits buffer holds " + std::to_string(capacity) + ", need " +
                    std::to_string(classes));
  }
  return guarded([&] {
    mapsnn::SpikeTensor input(steps, units, spec.dt);
    for (std::size_t i = 0; i < num_counts; ++i) {
      if (counts[i] < 0) throw mapsnn::ConfigError("spike counts must be non-negative");
      input.counts[i] = counts[i];
    }
    const mapsnn::ForwardResult r = model->net.forward(input, false);
    std::copy(r.logits.begin(), r.logits.end(), logits);
    if (predicted) *predicted = mapsnn::predict(r.logits);
  });
}

}  // extern "C"
