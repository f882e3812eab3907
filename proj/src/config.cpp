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

#include "mapsnn/config.hpp"

#include <cmath>
#include <limits>
#include <set>

#include <json.hpp>

#include "mapsnn/error.hpp"
#include "mapsnn/events.hpp"

namespace mapsnn {

namespace {

using json = nlohmann::json;

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return nullptr;
    return &*it;
  }

  const json& require(const std::string& key) {
    const json* v = get(key);
    if (!v) throw ConfigError(where(key) + ": required key is missing");
    return *v;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = get(key)) {
      if (!v->is_number()) throw ConfigError(where(key) + ": expected a number");
      out = v->get<double>();
      if (!std::isfinite(out)) throw ConfigError(where(key) + ": must be finite");
    }
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer()) throw ConfigError(where(key) + ": expected an integer");
      const auto x = v->get<std::int64_t>();
      if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
        throw ConfigError(where(key) + ": out of range");
      }
      out = static_cast<int>(x);
    }
  }

  void seed(const std::string& key, std::optional<std::uint64_t>& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_unsigned()) {
        throw ConfigError(where(key) + ": expected a non-negative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = get(key)) {
      if (!v->is_boolean()) throw ConfigError(where(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = get(key)) {
      if (!v->is_string()) throw ConfigError(where(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }

  // Parses an enum-valued string through `parse`, which throws on unknown
  // names; the message gets the key prepended.
  template <class T, class Parse>
  void choice(const std::string& key, T& out, Parse parse) {
    std::string name;
    string(key, name);
    if (name.empty() && !has(key)) return;
    try {
      out = parse(name);
    } catch (const ConfigError& e) {
      throw ConfigError(where(key) + ": " + e.what());
    }
  }

  Section child(const std::string& key) {
    seen_.insert(key);
    return Section(j_.at(key), where(key));
  }

  std::string where(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(where(it.key()) + ": unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

DataSource parse_source(std::string_view name) {
  if (name == "synthetic") return DataSource::kSynthetic;
  if (name == "nmnist") return DataSource::kNmnist;
  if (name == "portable") return DataSource::kPortable;
  throw ConfigError("unknown data source '" + std::string(name) +
                    "' (expected synthetic, nmnist or portable)");
}

Readout parse_readout(std::string_view name) {
  if (name == "spike_count_sum") return Readout::kSpikeCountSum;
  throw ConfigError("unknown readout '" + std::string(name) +
                    "' (expected spike_count_sum)");
}

void parse_network(Section s, ExperimentConfig& c) {
  const json& widths = s.require("widths");
  if (!widths.is_array()) throw ConfigError("network.widths: expected an array");
  c.network.widths.clear();
  for (const json& w : widths) {
    if (!w.is_number_integer() || w.get<std::int64_t>() < 1 ||
        w.get<std::int64_t>() > (1 << 20)) {
      throw ConfigError("network.widths: expected positive integers");
    }
    c.network.widths.push_back(w.get<int>());
  }
  s.number("dt", c.network.dt);
  s.integer("T", c.network.steps);
  s.choice("mode", c.network.mode, parse_neuron_mode);
  s.choice("pattern", c.pattern, parse_spike_pattern);
  s.choice("readout", c.network.readout, parse_readout);
  s.integer("s_max", c.network.s_max);
  if (s.get("init")) {
    Section init = s.child("init");
    init.number("v_threshold", c.init.v_threshold);
    init.number("tau_decay", c.init.tau_decay);
    init.number("q", c.init.q);
    init.number("jitter", c.init.jitter);
    init.boolean("center_weights", c.init.center_weights);
    init.finish();
  }
  s.finish();
}

void parse_synapse(Section s, ExperimentConfig& c) {
  s.integer("kernel_size", c.network.kernel_size);
  s.boolean("trainable", c.kernel_trainable);
  s.seed("seed", c.kernel_seed);
  s.finish();
}

void parse_train(Section s, ExperimentConfig& c) {
  s.number("lr", c.train.adam.lr);
  s.number("beta1", c.train.adam.beta1);
  s.number("beta2", c.train.adam.beta2);
  s.number("eps", c.train.adam.eps);
  s.integer("batch", c.train.batch);
  s.integer("epochs", c.train.epochs);
  std::optional<std::uint64_t> seed;
  s.seed("seed", seed);
  if (seed) c.train.seed = *seed;
  s.integer("threads", c.train.threads);
  s.string("resume_from", c.resume_from);
  s.finish();
}

void parse_synthetic(Section s, ExperimentConfig& c) {
  SyntheticTaskSpec& t = c.synthetic;
  s.choice("task", t.task, parse_synthetic_task);
  s.integer("num_classes", t.num_classes);
  s.integer("num_units", t.num_units);
  s.number("duration_ms", t.duration_ms);
  s.seed("seed", c.data_seed);
  s.integer("train_samples", t.train_samples);
  s.integer("test_samples", t.test_samples);
  s.choice("layout", t.layout, parse_rate_layout);
  s.number("rate_low_hz", t.rate_low_hz);
  s.number("rate_high_hz", t.rate_high_hz);
  s.integer("group_size", t.group_size);
  s.number("burst_rate_hz", t.burst_rate_hz);
  s.number("burst_ms", t.burst_ms);
  s.number("gap_ms", t.gap_ms);
  s.number("onset_ms", t.onset_ms);
  s.number("jitter_ms", t.jitter_ms);
  s.number("noise_rate_hz", t.noise_rate_hz);
  s.finish();
}

void parse_data(Section s, ExperimentConfig& c) {
  s.choice("source", c.source, parse_source);
  if (!s.has("source")) throw ConfigError("data.source: required key is missing");
  if (s.get("synthetic")) parse_synthetic(s.child("synthetic"), c);
  s.string("train_manifest", c.train_manifest);
  s.string("test_manifest", c.test_manifest);
  s.boolean("nmnist_merge_polarity", c.nmnist_merge_polarity);
  s.finish();
}

void parse_output(Section s, ExperimentConfig& c) {
  s.string("csv", c.csv);
  s.string("checkpoint", c.checkpoint);
  s.boolean("record_wall_time", c.record_wall_time);
  s.finish();
}

}  // namespace

std::string_view to_string(DataSource source) {
  switch (source) {
    case DataSource::kSynthetic:
      return "synthetic";
    case DataSource::kNmnist:
      return "nmnist";
    case DataSource::kPortable:
      return "portable";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  network.validate();
  train.validate();
  if (network.mode == NeuronMode::kSsp && pattern == SpikePattern::kMsp) {
    throw ConfigError(
        "network.mode 'ssp' emits at most one spike per step and needs "
        "network.pattern 'ssp'");
  }
  const double q_floor = network.mode == NeuronMode::kSfa ? kQMin : 1.0;
  if (!(init.v_threshold >= kThresholdMin) || !(init.tau_decay >= kTauDecayMin) ||
      !(init.tau_decay <= kTauDecayMax) || !(init.q >= q_floor) || !(init.q <= kQMax)) {
    throw ConfigError("network.init: a neuron parameter lies outside its admissible range");
  }
  if (!(init.jitter >= 0.0 && init.jitter < 1.0)) {
    throw ConfigError("network.init.jitter must lie in [0, 1)");
  }

  switch (source) {
    case DataSource::kSynthetic: {
      synthetic.validate();
      if (network.input_width() != synthetic.num_units) {
        throw ConfigError("network.widths[0] = " + std::to_string(network.input_width()) +
                          " does not match data.synthetic.num_units = " +
                          std::to_string(synthetic.num_units));
      }
      if (network.num_classes() != synthetic.num_classes) {
        throw ConfigError("network output width " + std::to_string(network.num_classes()) +
                          " does not match data.synthetic.num_classes = " +
                          std::to_string(synthetic.num_classes));
      }
      break;
    }
    case DataSource::kNmnist: {
      const int units = static_cast<int>(nmnist_merge_polarity ? kNmnistPixels
                                                               : 2 * kNmnistPixels);
      if (network.input_width() != units) {
        throw ConfigError("network.widths[0] = " + std::to_string(network.input_width()) +
                          " does not match the " + std::to_string(units) +
                          " N-MNIST input units");
      }
      [[fallthrough]];
    }
    case DataSource::kPortable:
      if (train_manifest.empty() || test_manifest.empty()) {
        throw ConfigError("data.train_manifest and data.test_manifest are required for '" +
                          std::string(to_string(source)) + "' data");
      }
      break;
  }
  if (csv.empty()) throw ConfigError("output.csv must not be empty");
}

ExperimentConfig parse_config(std::string_view json_text,
                              const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  c.base_dir = base_dir;
  Section root(j, "");
  root.require("network");
  parse_network(root.child("network"), c);
  if (root.get("synapse")) parse_synapse(root.child("synapse"), c);
  if (root.get("train")) parse_train(root.child("train"), c);
  root.require("data");
  parse_data(root.child("data"), c);
  if (root.get("output")) parse_output(root.child("output"), c);
  root.finish();
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes;
  try {
    bytes = read_file(path);
  } catch (const IoError& e) {
    throw ConfigError(e.what());
  }
  return parse_config(std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                       bytes.size()),
                      path.parent_path());
}

std::string to_json(const ExperimentConfig& c) {
  json j;
  j["network"] = {{"widths", c.network.widths},
                  {"dt", c.network.dt},
                  {"T", c.network.steps},
                  {"mode", std::string(to_string(c.network.mode))},
                  {"pattern", std::string(to_string(c.pattern))},
                  {"readout", "spike_count_sum"},
                  {"s_max", c.network.s_max},
                  {"init",
                   {{"v_threshold", c.init.v_threshold},
                    {"tau_decay", c.init.tau_decay},
                    {"q", c.init.q},
                    {"jitter", c.init.jitter},
                    {"center_weights", c.init.center_weights}}}};
  j["synapse"] = {{"kernel_size", c.network.kernel_size},
                  {"trainable", c.kernel_trainable},
                  {"seed", c.effective_kernel_seed()}};
  j["train"] = {{"lr", c.train.adam.lr},      {"beta1", c.train.adam.beta1},
                {"beta2", c.train.adam.beta2}, {"eps", c.train.adam.eps},
                {"batch", c.train.batch},      {"epochs", c.train.epochs},
                {"seed", c.train.seed},        {"threads", c.train.threads}};
  if (!c.resume_from.empty()) j["train"]["resume_from"] = c.resume_from;
  json data = {{"source", std::string(to_string(c.source))}};
  if (c.source == DataSource::kSynthetic) {
    const SyntheticTaskSpec& t = c.synthetic;
    data["synthetic"] = {{"task", std::string(to_string(t.task))},
                         {"num_classes", t.num_classes},
                         {"num_units", t.num_units},
                         {"duration_ms", t.duration_ms},
                         {"seed", c.effective_data_seed()},
                         {"train_samples", t.train_samples},
                         {"test_samples", t.test_samples},
                         {"layout", std::string(to_string(t.layout))},
                         {"rate_low_hz", t.rate_low_hz},
                         {"rate_high_hz", t.rate_high_hz},
                         {"group_size", t.group_size},
                         {"burst_rate_hz", t.burst_rate_hz},
                         {"burst_ms", t.burst_ms},
                         {"gap_ms", t.gap_ms},
                         {"onset_ms", t.onset_ms},
                         {"jitter_ms", t.jitter_ms},
                         {"noise_rate_hz", t.noise_rate_hz}};
  } else {
    data["train_manifest"] = c.train_manifest;
    data["test_manifest"] = c.test_manifest;
    data["nmnist_merge_polarity"] = c.nmnist_merge_polarity;
  }
  j["data"] = std::move(data);
  j["output"] = {{"csv", c.csv},
                 {"checkpoint", c.checkpoint},
                 {"record_wall_time", c.record_wall_time}};
  return j.dump(2);
}

}  // namespace mapsnn
