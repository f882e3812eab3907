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

#include "mapsnn/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "mapsnn/checkpoint.hpp"
#include "mapsnn/error.hpp"
#include "mapsnn/synapse.hpp"
#include "mapsnn/synthetic.hpp"

namespace mapsnn {

namespace fs = std::filesystem;

namespace {

std::string fmt(const char* format, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, x);
  return buf;
}

class CsvFile {
 public:
  explicit CsvFile(const fs::path& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot write " + path.string());
  }
  void line(const std::string& text) {
    out_ << text << '\n';
    out_.flush();
    if (!out_) throw IoError("write failed on " + path_.string());
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());
}

// Quotes a CSV field when it contains a delimiter or quote.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void log_line(const RunOptions& run, const std::string& text) {
  if (run.log) *run.log << text << '\n' << std::flush;
}

std::string describe(const EpochMetrics& m) {
  std::string s = "epoch " + std::to_string(m.epoch) + " " + m.split +
                  " error=" + fmt("%.4f", m.error_rate) + " loss=" + fmt("%.4f", m.loss);
  double spikes = 0.0;
  for (double x : m.spikes) spikes += x;
  return s + " spikes=" + fmt("%.0f", spikes);
}

struct Streams {
  std::vector<LabeledStream> train;
  std::vector<LabeledStream> test;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

Streams load_streams(const ExperimentConfig& c) {
  Streams s;
  switch (c.source) {
    case DataSource::kSynthetic: {
      SyntheticTaskSpec spec = c.synthetic;
      spec.seed = c.effective_data_seed();
      SyntheticDataset ds = generate_synthetic(spec);
      s.train = std::move(ds.train);
      s.test = std::move(ds.test);
      break;
    }
    case DataSource::kNmnist:
    case DataSource::kPortable: {
      const EventFormat format =
          c.source == DataSource::kNmnist ? EventFormat::kNmnist : EventFormat::kPortable;
      const NmnistOptions options{c.nmnist_merge_polarity};
      s.train = load_manifest(resolve(c.base_dir, c.train_manifest), format, options);
      s.test = load_manifest(resolve(c.base_dir, c.test_manifest), format, options);
      break;
    }
  }
  return s;
}

void check_fit(const ExperimentConfig& c, const Dataset& d, const char* split) {
  if (d.size() == 0) return;
  if (static_cast<int>(d.num_units) != c.network.input_width()) {
    throw ConfigError(std::string(split) + " data has " + std::to_string(d.num_units) +
                      " input units but network.widths[0] = " +
                      std::to_string(c.network.input_width()));
  }
  for (int label : d.labels) {
    if (label >= c.network.num_classes()) {
      throw ConfigError(std::string(split) + " data has label " + std::to_string(label) +
                        " but the network has " +
                        std::to_string(c.network.num_classes()) + " output units");
    }
  }
}

DataSplits bin_streams(const ExperimentConfig& c, const Streams& s) {
  const auto steps = static_cast<std::size_t>(c.network.steps);
  DataSplits d{bin_dataset(s.train, c.network.dt, steps, c.pattern),
               bin_dataset(s.test, c.network.dt, steps, c.pattern)};
  check_fit(c, d.train, "train");
  check_fit(c, d.test, "test");
  return d;
}

void check_compatible(const NetworkSpec& have, const NetworkSpec& want) {
  if (have.widths != want.widths || have.dt != want.dt || have.steps != want.steps ||
      have.mode != want.mode || have.s_max != want.s_max ||
      have.kernel_size != want.kernel_size) {
    throw ConfigError("checkpoint network does not match the configured network");
  }
}

TrainState fresh_state(const ExperimentConfig& c) {
  TrainState state;
  state.net = Network::initialize(c.network, c.init, c.train.seed, c.effective_kernel_seed());
  state.adam = Adam(c.train.adam, state.net);
  return state;
}

TrainOptions train_options(const ExperimentConfig& c) {
  TrainOptions o = c.train;
  o.kernel_trainable = c.kernel_trainable;
  return o;
}

TrainSummary summarize(std::vector<EpochMetrics> rows, const TrainState& state,
                       int start_epoch) {
  TrainSummary s;
  s.start_epoch = start_epoch;
  s.best_test_error = state.best_test_error;
  for (const EpochMetrics& m : rows) {
    if (m.split == "test") {
      s.final_error = m.error_rate;
      s.final_loss = m.loss;
      s.final_test_spikes = m.spikes;
    }
  }
  s.rows = std::move(rows);
  return s;
}

// Trains one model in memory; used by the comparison drivers.
TrainSummary train_in_memory(const ExperimentConfig& c, const DataSplits& data,
                             const RunOptions& run, const std::string& tag) {
  TrainState state = fresh_state(c);
  TrainHooks hooks;
  hooks.record_wall_time = c.record_wall_time;
  hooks.on_metrics = [&](const EpochMetrics& m) { log_line(run, tag + " " + describe(m)); };
  std::vector<EpochMetrics> rows =
      train(state, data.train, data.test, train_options(c), hooks);
  return summarize(std::move(rows), state, 0);
}

void write_metrics(const fs::path& path, const std::vector<EpochMetrics>& rows,
                   std::size_t layers) {
  CsvFile csv(path);
  csv.line(metrics_header(layers));
  for (const EpochMetrics& m : rows) csv.line(metrics_row(m));
}

void write_twin_csv(const fs::path& path, const std::string& first_name,
                    const TrainSummary& first, const std::string& second_name,
                    const TrainSummary& second, std::size_t layers) {
  CsvFile csv(path);
  csv.line("variant," + metrics_header(layers));
  for (const EpochMetrics& m : first.rows) csv.line(first_name + "," + metrics_row(m));
  for (const EpochMetrics& m : second.rows) csv.line(second_name + "," + metrics_row(m));
}

double sum(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s;
}

// Train loss at `epoch`, or the epoch-0 test loss when nothing was trained.
double loss_at(const TrainSummary& s, int epoch) {
  for (const EpochMetrics& m : s.rows) {
    if (m.epoch == epoch && (m.split == "train" || epoch == 0)) return m.loss;
  }
  throw Error("no metrics recorded for epoch " + std::to_string(epoch));
}

}  // namespace

void apply_overrides(ExperimentConfig& config, std::optional<std::uint64_t> seed,
                     std::optional<int> threads) {
  if (seed) config.train.seed = *seed;
  if (threads) {
    if (*threads < 1) throw ConfigError("--threads must be at least 1");
    config.train.threads = *threads;
  }
}

DataSplits load_data(const ExperimentConfig& config) {
  config.validate();
  return bin_streams(config, load_streams(config));
}

TrainSummary cmd_train(const ExperimentConfig& config, const RunOptions& run) {
  DataSplits data = load_data(config);
  const TrainOptions options = train_options(config);

  TrainState state;
  if (!config.resume_from.empty()) {
    Checkpoint ck = load_checkpoint(resolve(run.out_dir, config.resume_from));
    check_compatible(ck.state.net.spec(), config.network);
    if (ck.options.seed != options.seed || ck.options.batch != options.batch) {
      throw ConfigError("checkpoint was trained with a different seed or batch size");
    }
    state = std::move(ck.state);
    if (state.epoch > options.epochs) {
      throw ConfigError("checkpoint is at epoch " + std::to_string(state.epoch) +
                        ", beyond train.epochs");
    }
  } else {
    state = fresh_state(config);
  }
  const int start_epoch = state.epoch;

  // Rows written before the checkpoint are kept so a resumed run ends with
  // the same CSV as an uninterrupted one.
  const fs::path csv_path = run.out_dir / config.csv;
  std::vector<std::string> kept;
  if (start_epoch > 0) {
    std::ifstream in(csv_path);
    std::string line;
    if (in && std::getline(in, line)) {
      while (std::getline(in, line)) {
        int epoch = 0;
        std::istringstream field(line.substr(0, line.find(',')));
        if (!(field >> epoch)) throw FormatError(csv_path.string() + ": malformed row");
        if (epoch <= start_epoch) kept.push_back(line);
      }
    }
  }

  ensure_dir(run.out_dir);
  if (csv_path.has_parent_path()) ensure_dir(csv_path.parent_path());
  CsvFile csv(csv_path);
  csv.line(metrics_header(state.net.layers().size()));
  for (const std::string& line : kept) csv.line(line);

  TrainHooks hooks;
  hooks.record_wall_time = config.record_wall_time;
  hooks.on_metrics = [&](const EpochMetrics& m) {
    csv.line(metrics_row(m));
    log_line(run, describe(m));
  };
  if (!config.checkpoint.empty()) {
    const fs::path ckpt = run.out_dir / config.checkpoint;
    hooks.on_best = [&, ckpt](const TrainState& s) { save_checkpoint(ckpt, s, options); };
  }
  std::vector<EpochMetrics> rows = train(state, data.train, data.test, options, hooks);
  return summarize(std::move(rows), state, start_epoch);
}

EvalResult cmd_eval(const ExperimentConfig& config, const fs::path& checkpoint,
                    const RunOptions& run) {
  DataSplits data = load_data(config);
  Checkpoint ck = load_checkpoint(checkpoint);
  check_compatible(ck.state.net.spec(), config.network);
  const EvalResult r = evaluate(ck.state.net, data.test, config.train.threads);

  ensure_dir(run.out_dir);
  CsvFile csv(run.out_dir / "eval.csv");
  std::string header = "split,samples,error_rate,loss";
  std::string row = "test," + std::to_string(data.test.size()) + fmt(",%.6f", r.error_rate) +
                    fmt(",%.9f", r.loss);
  for (std::size_t n = 0; n < r.spikes.size(); ++n) {
    header += ",spikes_layer_" + std::to_string(n);
    row += fmt(",%.17g", r.spikes[n]);
  }
  csv.line(header);
  csv.line(row);
  log_line(run, "test error " + fmt("%.4f", r.error_rate) + " loss " + fmt("%.4f", r.loss));
  return r;
}

std::vector<SweepCell> cmd_sweep_dt(const ExperimentConfig& config,
                                    const std::vector<double>& dts, const RunOptions& run,
                                    bool parallel) {
  config.validate();
  if (dts.empty()) throw ConfigError("sweep-dt needs at least one dt");
  for (double dt : dts) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      throw ConfigError("sweep-dt values must be positive, got " + fmt("%g", dt));
    }
  }
  const double window = config.network.steps * config.network.dt;
  const NeuronMode msp_mode =
      config.network.mode == NeuronMode::kSsp ? NeuronMode::kLinear : config.network.mode;

  struct Job {
    ExperimentConfig config;
    SweepCell cell;
    DataSplits data;
    TrainSummary result;
  };
  const Streams streams = load_streams(config);
  std::vector<Job> jobs;
  for (double dt : dts) {
    for (SpikePattern pattern : {SpikePattern::kSsp, SpikePattern::kMsp}) {
      Job job;
      job.config = config;
      ExperimentConfig& c = job.config;
      c.network.dt = dt;
      c.network.steps = std::max(1, static_cast<int>(std::lround(window / dt)));
      c.pattern = pattern;
      c.network.mode = pattern == SpikePattern::kSsp ? NeuronMode::kSsp : msp_mode;
      c.validate();
      job.cell = {dt, pattern, c.network.mode, c.network.steps, 0.0, 0.0};
      job.data = bin_streams(c, streams);
      jobs.push_back(std::move(job));
    }
  }

  auto cell_name = [](const SweepCell& cell) {
    return "dt" + fmt("%g", cell.dt) + "_" + std::string(to_string(cell.pattern));
  };
  auto run_job = [&](Job& job) {
    job.result = train_in_memory(job.config, job.data, run, cell_name(job.cell));
    job.cell.final_error = job.result.final_error;
    job.cell.final_loss = job.result.final_loss;
  };
  if (parallel) {
    // Cells share nothing, so each gets its own thread.
    std::vector<std::exception_ptr> errors(jobs.size());
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      pool.emplace_back([&, i] {
        try {
          run_job(jobs[i]);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  } else {
    for (Job& job : jobs) run_job(job);
  }

  ensure_dir(run.out_dir);
  std::vector<SweepCell> cells;
  CsvFile summary(run.out_dir / "sweep_dt.csv");
  summary.line("dt,pattern,mode,steps,final_error,final_loss");
  for (const Job& job : jobs) {
    const SweepCell& c = job.cell;
    write_metrics(run.out_dir / ("sweep_" + cell_name(c) + ".csv"), job.result.rows,
                  job.config.network.num_layers());
    summary.line(fmt("%g", c.dt) + "," + std::string(to_string(c.pattern)) + "," +
                 std::string(to_string(c.mode)) + "," + std::to_string(c.steps) +
                 fmt(",%.6f", c.final_error) + fmt(",%.9f", c.final_loss));
    cells.push_back(c);
  }
  return cells;
}

double error_spread(const std::vector<SweepCell>& cells, SpikePattern pattern) {
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (const SweepCell& c : cells) {
    if (c.pattern != pattern) continue;
    lo = any ? std::min(lo, c.final_error) : c.final_error;
    hi = any ? std::max(hi, c.final_error) : c.final_error;
    any = true;
  }
  return hi - lo;
}

SfaComparison cmd_compare_sfa(const ExperimentConfig& config, const RunOptions& run) {
  ExperimentConfig sfa = config;
  sfa.network.mode = NeuronMode::kSfa;
  if (sfa.pattern == SpikePattern::kSsp) sfa.pattern = SpikePattern::kMsp;
  ExperimentConfig linear = sfa;
  linear.network.mode = NeuronMode::kLinear;
  const DataSplits data = load_data(sfa);
  linear.validate();

  SfaComparison out;
  out.runs.first = train_in_memory(sfa, data, run, "sfa");
  out.runs.second = train_in_memory(linear, data, run, "linear");
  out.sfa_spikes = sum(out.runs.first.final_test_spikes);
  out.linear_spikes = sum(out.runs.second.final_test_spikes);
  out.ratio = out.sfa_spikes > 0.0 ? out.linear_spikes / out.sfa_spikes
                                   : std::numeric_limits<double>::infinity();

  ensure_dir(run.out_dir);
  const std::size_t layers = sfa.network.num_layers();
  write_twin_csv(run.out_dir / "compare_sfa.csv", "sfa", out.runs.first, "linear",
                 out.runs.second, layers);
  CsvFile summary(run.out_dir / "compare_sfa_summary.csv");
  summary.line("sfa_error,linear_error,sfa_spikes,linear_spikes,ratio");
  summary.line(fmt("%.6f", out.runs.first.final_error) +
               fmt(",%.6f", out.runs.second.final_error) + fmt(",%.17g", out.sfa_spikes) +
               fmt(",%.17g", out.linear_spikes) + fmt(",%.6f", out.ratio));
  log_line(run, "linear/sfa spike ratio " + fmt("%.4f", out.ratio));
  return out;
}

PlasticityComparison cmd_compare_plasticity(const ExperimentConfig& config,
                                            const RunOptions& run) {
  ExperimentConfig trainable = config;
  trainable.kernel_trainable = true;
  ExperimentConfig frozen = config;
  frozen.kernel_trainable = false;
  const DataSplits data = load_data(trainable);

  PlasticityComparison out;
  out.runs.first = train_in_memory(trainable, data, run, "trainable");
  out.runs.second = train_in_memory(frozen, data, run, "frozen");
  const int epochs = config.train.epochs;
  out.half_epoch = epochs / 2;
  out.trainable_loss_half = loss_at(out.runs.first, out.half_epoch);
  out.frozen_loss_half = loss_at(out.runs.second, out.half_epoch);
  out.trainable_loss_final = loss_at(out.runs.first, epochs);
  out.frozen_loss_final = loss_at(out.runs.second, epochs);

  ensure_dir(run.out_dir);
  const std::size_t layers = config.network.num_layers();
  write_twin_csv(run.out_dir / "compare_plasticity.csv", "trainable", out.runs.first,
                 "frozen", out.runs.second, layers);
  CsvFile summary(run.out_dir / "compare_plasticity_summary.csv");
  summary.line("variant,half_epoch,train_loss_half,train_loss_final,final_error");
  summary.line("trainable," + std::to_string(out.half_epoch) +
               fmt(",%.9f", out.trainable_loss_half) +
               fmt(",%.9f", out.trainable_loss_final) +
               fmt(",%.6f", out.runs.first.final_error));
  summary.line("frozen," + std::to_string(out.half_epoch) +
               fmt(",%.9f", out.frozen_loss_half) + fmt(",%.9f", out.frozen_loss_final) +
               fmt(",%.6f", out.runs.second.final_error));
  return out;
}

std::vector<ScheduleSegment> parse_schedule(std::string_view text) {
  std::vector<ScheduleSegment> out;
  if (text.empty()) return out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    const std::string item(text.substr(pos, end - pos));
    const std::size_t at = item.find('@');
    ScheduleSegment seg;
    try {
      if (at == std::string::npos) throw std::invalid_argument("missing @");
      std::size_t used = 0;
      seg.value = std::stod(item.substr(0, at), &used);
      if (used != at) throw std::invalid_argument("value");
      const std::string dur = item.substr(at + 1);
      seg.duration_ms = std::stod(dur, &used);
      if (used != dur.size()) throw std::invalid_argument("duration");
    } catch (const std::logic_error&) {
      throw ConfigError("invalid schedule entry '" + item +
                        "' (expected VALUE@DURATION_MS)");
    }
    if (!std::isfinite(seg.value) || !(seg.duration_ms > 0.0) ||
        !std::isfinite(seg.duration_ms)) {
      throw ConfigError("invalid schedule entry '" + item +
                        "' (finite value and positive duration required)");
    }
    out.push_back(seg);
    pos = end + 1;
  }
  return out;
}

void TraceOptions::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("trace: dt must be positive");
  if (!(window_ms > 0.0) || !std::isfinite(window_ms)) {
    throw ConfigError("trace: window must be positive");
  }
  if (!(v_threshold >= kThresholdMin)) throw ConfigError("trace: v_threshold too small");
  if (!(tau_decay >= kTauDecayMin && tau_decay <= kTauDecayMax)) {
    throw ConfigError("trace: tau_decay outside its admissible range");
  }
  if (mode == NeuronMode::kSfa && !(q >= kQMin && q <= kQMax)) {
    throw ConfigError("trace: q outside its admissible range");
  }
  if (s_max < 1) throw ConfigError("trace: s_max must be at least 1");
  if (kernel_size < 1) throw ConfigError("trace: kernel size must be at least 1");
  if (!(kernel_a >= kKernelRateMin) || !(kernel_b >= kKernelRateMin) ||
      !(kernel_delay >= 0.0)) {
    throw ConfigError("trace: kernel rates must be positive and the delay non-negative");
  }
}

std::vector<TraceRow> trace_neuron(const TraceOptions& o) {
  o.validate();
  const auto steps = static_cast<std::size_t>(std::max(1L, std::lround(o.window_ms / o.dt)));
  const std::vector<double> taps =
      sample_kernel(o.kernel_a, o.kernel_b, o.kernel_delay, o.kernel_size, o.dt);

  // Segment boundaries in steps, so float drift in cumulative ms never
  // shifts a switch.
  std::vector<std::pair<std::size_t, double>> switches;
  double elapsed = 0.0;
  for (const ScheduleSegment& seg : o.schedule) {
    elapsed += seg.duration_ms;
    switches.emplace_back(static_cast<std::size_t>(std::lround(elapsed / o.dt)), seg.value);
  }

  std::vector<TraceRow> rows(steps);
  std::vector<double> s_hist(steps, 0.0);
  double v = 0.0, u = 0.0;
  std::size_t seg = 0;
  for (std::size_t t = 0; t < steps; ++t) {
    while (seg < switches.size() && t >= switches[seg].first) ++seg;
    const double density = seg < switches.size() ? switches[seg].second : 0.0;
    TraceRow& r = rows[t];
    r.t = static_cast<double>(t) * o.dt;
    r.i = density * o.dt;
    v = membrane_update(v, u, o.tau_decay, r.i);
    if (!std::isfinite(v)) throw NumericFault("non-finite membrane potential", 0, int(t));
    r.v = v;
    r.n_star = spike_intensity(o.mode, v, o.v_threshold, o.q);
    r.s = spike_count(o.mode, r.n_star, v, o.v_threshold, o.q, o.s_max, false);
    u = consumed_potential(o.mode, r.s, v, o.v_threshold, o.q);
    r.u = u;
    s_hist[t] = r.s;
    r.o = convolve_spikes(s_hist, t, taps);
  }
  return rows;
}

double total_spikes(const std::vector<TraceRow>& rows) {
  double s = 0.0;
  for (const TraceRow& r : rows) s += r.s;
  return s;
}

std::vector<TraceRow> cmd_trace_neuron(const TraceOptions& options, const RunOptions& run,
                                       const std::string& csv_name) {
  std::vector<TraceRow> rows = trace_neuron(options);
  ensure_dir(run.out_dir);
  CsvFile csv(run.out_dir / csv_name);
  csv.line("t,I,v,n_star,s,u,o");
  for (const TraceRow& r : rows) {
    csv.line(fmt("%.6f", r.t) + fmt(",%.17g", r.i) + fmt(",%.17g", r.v) +
             fmt(",%.17g", r.n_star) + fmt(",%.17g", r.s) + fmt(",%.17g", r.u) +
             fmt(",%.17g", r.o));
  }
  log_line(run, "total spikes " + fmt("%.0f", total_spikes(rows)));
  return rows;
}

std::vector<GradcheckReport> cmd_gradcheck(std::uint64_t seed, int count,
                                           const RunOptions& run,
                                           const GradcheckOptions& options) {
  if (count < 1) throw ConfigError("gradcheck count must be at least 1");
  static constexpr NeuronMode kModes[] = {NeuronMode::kSfa, NeuronMode::kLinear,
                                          NeuronMode::kSsp};
  std::vector<GradcheckReport> reports;
  for (int i = 0; i < count; ++i) {
    reports.push_back(gradcheck(kModes[i % 3], seed + static_cast<std::uint64_t>(i), options));
    log_line(run, format_report(reports.back()));
  }
  ensure_dir(run.out_dir);
  CsvFile csv(run.out_dir / "gradcheck.csv");
  csv.line("seed,mode,group,count,max_abs_grad,max_rel_error,status");
  for (const GradcheckReport& r : reports) {
    for (const GradcheckGroup& g : r.groups) {
      csv.line(std::to_string(r.seed) + "," + std::string(to_string(r.mode)) + "," +
               std::string(group_name(g.kind)) + "," + std::to_string(g.count) +
               fmt(",%.6e", g.max_abs_grad) + fmt(",%.6e", g.max_rel_error) + "," +
               std::string(to_string(g.status)));
    }
  }
  return reports;
}

std::vector<ConvertCheckResult> cmd_convert_check(const std::vector<fs::path>& files,
                                                  EventFormat format, const RunOptions& run,
                                                  bool merge_polarity) {
  std::vector<ConvertCheckResult> out;
  for (const fs::path& f : files) {
    ConvertCheckResult r;
    r.file = f;
    try {
      const EventStream s = load_events(f, format, NmnistOptions{merge_polarity});
      r.ok = true;
      r.events = s.events.size();
      r.units = s.num_units;
      r.duration_us = s.duration_us;
    } catch (const Error& e) {
      r.detail = e.what();
    }
    log_line(run, f.string() + ": " + (r.ok ? "ok" : "error: " + r.detail));
    out.push_back(std::move(r));
  }
  ensure_dir(run.out_dir);
  CsvFile csv(run.out_dir / "convert_check.csv");
  csv.line("file,format,status,events,units,duration_us,detail");
  const std::string fmt_name = format == EventFormat::kNmnist ? "nmnist" : "portable";
  for (const ConvertCheckResult& r : out) {
    csv.line(csv_field(r.file.string()) + "," + fmt_name + "," + (r.ok ? "ok" : "error") +
             "," + std::to_string(r.events) + "," + std::to_string(r.units) + "," +
             std::to_string(r.duration_us) + "," + csv_field(r.detail));
  }
  return out;
}

}  // namespace mapsnn
