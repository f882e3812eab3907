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

// mapsnn command-line tool. Talks to the engine only through the C API.
//
// Exit status: 0 on success, 2 for usage or configuration errors, 1 for any
// other failure (including a failed gradient check or unparseable files in
// convert-check).

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mapsnn/mapsnn.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::optional<int> threads;
  bool quiet = false;
};

// Thrown after a failed C API call; carries the exit status.
struct Failure {
  int exit_code;
};

void check(mapsnn_status st) {
  if (st == MAPSNN_OK) return;
  std::fprintf(stderr, "mapsnn: %s: %s\n", mapsnn_status_name(st), mapsnn_last_error());
  throw Failure{st == MAPSNN_ERR_CONFIG || st == MAPSNN_ERR_INVALID_ARGUMENT ? kExitUsage
                                                                            : kExitFailure};
}

using ConfigPtr = std::unique_ptr<mapsnn_config, decltype(&mapsnn_config_free)>;

ConfigPtr load(const Globals& g) {
  if (g.config.empty()) {
    std::fprintf(stderr, "mapsnn: --config is required for this command\n");
    throw Failure{kExitUsage};
  }
  mapsnn_config* raw = nullptr;
  check(mapsnn_config_load(g.config.c_str(), &raw));
  ConfigPtr cfg(raw, mapsnn_config_free);
  if (g.seed) check(mapsnn_config_set_seed(cfg.get(), *g.seed));
  if (g.threads) check(mapsnn_config_set_threads(cfg.get(), *g.threads));
  return cfg;
}

nlohmann::json config_json(const mapsnn_config* cfg) {
  std::size_t needed = 0;
  mapsnn_config_to_json(cfg, nullptr, 0, &needed);
  std::string text(needed, '\0');
  check(mapsnn_config_to_json(cfg, text.data(), text.size(), &needed));
  text.resize(needed - 1);
  return nlohmann::json::parse(text);
}

mapsnn_run_options run_options(const Globals& g) { return {g.out.c_str(), g.quiet ? 0 : 1}; }

const char* mode_name(mapsnn_mode m) {
  switch (m) {
    case MAPSNN_MODE_SFA:
      return "sfa";
    case MAPSNN_MODE_LINEAR:
      return "linear";
    case MAPSNN_MODE_SSP:
      return "ssp";
  }
  return "?";
}

int run_train(const Globals& g) {
  ConfigPtr cfg = load(g);
  const mapsnn_run_options run = run_options(g);
  mapsnn_train_result r{};
  check(mapsnn_train(cfg.get(), &run, &r));
  std::printf("final test error %.4f (loss %.4f, best %.4f)\n", r.final_error, r.final_loss,
              r.best_test_error);
  return 0;
}

int run_eval(const Globals& g, std::string checkpoint) {
  ConfigPtr cfg = load(g);
  if (checkpoint.empty()) {
    const std::string name = config_json(cfg.get())["output"]["checkpoint"];
    checkpoint = (std::filesystem::path(g.out) / name).string();
  }
  const mapsnn_run_options run = run_options(g);
  double error = 0.0, loss = 0.0;
  check(mapsnn_eval(cfg.get(), checkpoint.c_str(), &run, &error, &loss));
  std::printf("test error %.4f (loss %.4f)\n", error, loss);
  return 0;
}

int run_sweep(const Globals& g, const std::vector<double>& dts, bool parallel) {
  ConfigPtr cfg = load(g);
  const mapsnn_run_options run = run_options(g);
  std::vector<mapsnn_sweep_cell> cells(2 * dts.size());
  std::size_t count = 0;
  check(mapsnn_sweep_dt(cfg.get(), dts.data(), dts.size(), parallel ? 1 : 0, &run,
                        cells.data(), cells.size(), &count));
  std::printf("%8s %8s %8s %6s %12s\n", "dt", "pattern", "mode", "steps", "final_error");
  for (std::size_t i = 0; i < count; ++i) {
    const mapsnn_sweep_cell& c = cells[i];
    std::printf("%8g %8s %8s %6d %12.4f\n", c.dt,
                c.pattern == MAPSNN_PATTERN_SSP ? "ssp" : "msp", mode_name(c.mode), c.steps,
                c.final_error);
  }
  return 0;
}

int run_compare_sfa(const Globals& g) {
  ConfigPtr cfg = load(g);
  const mapsnn_run_options run = run_options(g);
  mapsnn_sfa_result r{};
  check(mapsnn_compare_sfa(cfg.get(), &run, &r));
  std::printf("sfa error %.4f, linear error %.4f\n", r.sfa_error, r.linear_error);
  std::printf("spikes sfa %.0f, linear %.0f, linear/sfa ratio %.4f\n", r.sfa_spikes,
              r.linear_spikes, r.ratio);
  return 0;
}

int run_compare_plasticity(const Globals& g) {
  ConfigPtr cfg = load(g);
  const mapsnn_run_options run = run_options(g);
  mapsnn_plasticity_result r{};
  check(mapsnn_compare_plasticity(cfg.get(), &run, &r));
  std::printf("train loss at epoch %d: trainable %.4f, frozen %.4f\n", r.half_epoch,
              r.trainable_loss_half, r.frozen_loss_half);
  std::printf("final train loss: trainable %.4f, frozen %.4f\n", r.trainable_loss_final,
              r.frozen_loss_final);
  std::printf("final test error: trainable %.4f, frozen %.4f\n", r.trainable_error,
              r.frozen_error);
  return 0;
}

int run_trace(const Globals& g, mapsnn_trace_options o, const std::string& mode,
              const std::string& schedule) {
  if (mode == "sfa") {
    o.mode = MAPSNN_MODE_SFA;
  } else if (mode == "linear") {
    o.mode = MAPSNN_MODE_LINEAR;
  } else {
    o.mode = MAPSNN_MODE_SSP;
  }
  o.schedule = schedule.c_str();
  const mapsnn_run_options run = run_options(g);
  double total = 0.0;
  check(mapsnn_trace_neuron(&o, &run, &total));
  std::printf("total spikes %.0f\n", total);
  return 0;
}

int run_gradcheck(const Globals& g, int count) {
  const mapsnn_run_options run = run_options(g);
  int passed = 0;
  double worst = 0.0;
  check(mapsnn_gradcheck(g.seed.value_or(0), count, &run, &passed, &worst));
  std::printf("gradcheck %s: %d network(s), max relative error %.3e\n",
              passed ? "passed" : "FAILED", count, worst);
  return passed ? 0 : kExitFailure;
}

int run_convert_check(const Globals& g, const std::vector<std::string>& files,
                      const std::string& manifest, const std::string& format,
                      bool merge_polarity) {
  const mapsnn_format f = format == "nmnist" ? MAPSNN_FORMAT_NMNIST : MAPSNN_FORMAT_PORTABLE;
  const mapsnn_run_options run = run_options(g);
  std::size_t checked = 0, failures = 0;
  if (!manifest.empty()) {
    check(mapsnn_convert_check_manifest(manifest.c_str(), f, merge_polarity ? 1 : 0, &run,
                                        &checked, &failures));
  } else {
    if (files.empty()) {
      std::fprintf(stderr, "mapsnn: convert-check needs files or --manifest\n");
      return kExitUsage;
    }
    std::vector<const char*> ptrs;
    for (const std::string& s : files) ptrs.push_back(s.c_str());
    check(mapsnn_convert_check(ptrs.data(), ptrs.size(), f, merge_polarity ? 1 : 0, &run,
                               &failures));
    checked = files.size();
  }
  std::printf("%zu file(s) checked, %zu failed\n", checked, failures);
  return failures == 0 ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MAP-SNN: multiple-spike-pattern spiking network training engine"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(mapsnn_version()));

  Globals g;
  app.add_option("--config", g.config, "Experiment config (JSON)")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "Override train.seed");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("-q,--quiet", g.quiet, "Suppress progress lines on stderr");

  auto* train = app.add_subcommand("train", "Train a model; writes metrics CSV + checkpoint");

  std::string checkpoint;
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the test split");
  eval->add_option("--checkpoint", checkpoint,
                   "Checkpoint (default: output.checkpoint inside --out)");

  std::vector<double> dts = {1.0, 2.0, 4.0, 8.0};
  bool parallel = false;
  auto* sweep = app.add_subcommand("sweep-dt", "Train SSP and MSP models per step length");
  sweep->add_option("--dts", dts, "Comma-separated step lengths in ms")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep->add_flag("--parallel", parallel, "Train cells concurrently");

  auto* sfa = app.add_subcommand("compare-sfa", "Train SFA and Linear twins");
  auto* plast =
      app.add_subcommand("compare-plasticity", "Train trainable- and frozen-kernel twins");

  mapsnn_trace_options trace_opts;
  mapsnn_trace_options_default(&trace_opts);
  std::string trace_mode = "sfa";
  std::string schedule;
  auto* trace = app.add_subcommand("trace-neuron", "Simulate one neuron; writes trace.csv");
  trace->add_option("--mode", trace_mode, "sfa, linear or ssp")
      ->check(CLI::IsMember({"sfa", "linear", "ssp"}))
      ->capture_default_str();
  trace->add_option("--dt", trace_opts.dt, "Step length (ms)")->capture_default_str();
  trace->add_option("--window-ms", trace_opts.window_ms, "Simulated window (ms)")
      ->capture_default_str();
  trace->add_option("--schedule", schedule,
                    "Input current density as VALUE@DURATION_MS,...; each step receives "
                    "VALUE * dt");
  trace->add_option("--v-threshold", trace_opts.v_threshold)->capture_default_str();
  trace->add_option("--tau-decay", trace_opts.tau_decay)->capture_default_str();
  trace->add_option("--q", trace_opts.q)->capture_default_str();
  trace->add_option("--s-max", trace_opts.s_max)->capture_default_str();
  trace->add_option("--kernel-a", trace_opts.kernel_a)->capture_default_str();
  trace->add_option("--kernel-b", trace_opts.kernel_b)->capture_default_str();
  trace->add_option("--kernel-delay", trace_opts.kernel_delay)->capture_default_str();
  trace->add_option("--kernel-size", trace_opts.kernel_size)->capture_default_str();

  int gc_count = 3;
  auto* gradcheck =
      app.add_subcommand("gradcheck", "Finite-difference check of the backward pass");
  gradcheck->add_option("--count", gc_count, "Number of random micro-networks")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::vector<std::string> files;
  std::string manifest;
  std::string format = "portable";
  bool merge_polarity = false;
  auto* convert = app.add_subcommand("convert-check", "Parse event files and report");
  convert->add_option("files", files, "Event files");
  convert->add_option("--manifest", manifest, "filename,label manifest to check instead");
  convert->add_option("--format", format, "portable or nmnist")
      ->check(CLI::IsMember({"portable", "nmnist"}))
      ->capture_default_str();
  convert->add_flag("--merge-polarity", merge_polarity, "N-MNIST: fold both polarities");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*train) return run_train(g);
    if (*eval) return run_eval(g, checkpoint);
    if (*sweep) return run_sweep(g, dts, parallel);
    if (*sfa) return run_compare_sfa(g);
    if (*plast) return run_compare_plasticity(g);
    if (*trace) return run_trace(g, trace_opts, trace_mode, schedule);
    if (*gradcheck) return run_gradcheck(g, gc_count);
    if (*convert) return run_convert_check(g, files, manifest, format, merge_polarity);
  } catch (const Failure& f) {
    return f.exit_code;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "mapsnn: %s\n", e.what());
    return kExitFailure;
  }
  return kExitUsage;
}
