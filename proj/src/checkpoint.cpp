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

#include "mapsnn/checkpoint.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>

#include <json.hpp>

#include "mapsnn/error.hpp"
#include "mapsnn/events.hpp"

namespace mapsnn {

namespace {

using json = nlohmann::json;

constexpr char kMagic[7] = {'M', 'A', 'P', 'C', 'K', 'P', 'T'};

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u32(std::uint32_t v) { bytes(&v, sizeof v); }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }
  void group(const std::string& name, const std::vector<double>& values) {
    str(name);
    u64(values.size());
    bytes(values.data(), values.size() * sizeof(double));
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  void bytes(void* p, std::size_t n) {
    if (n > in_.size() - pos_) throw FormatError("checkpoint is truncated");
    std::memcpy(p, in_.data() + pos_, n);
    pos_ += n;
  }
  std::uint32_t u32() {
    std::uint32_t v;
    bytes(&v, sizeof v);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    bytes(&v, sizeof v);
    return v;
  }
  std::string str() {
    const std::uint32_t n = u32();
    if (n > in_.size() - pos_) throw FormatError("checkpoint is truncated");
    std::string s(reinterpret_cast<const char*>(in_.data() + pos_), n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == in_.size(); }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::string layer_group(std::size_t n, GroupKind kind) {
  return "layer" + std::to_string(n) + "." + std::string(group_name(kind));
}

json metadata(const TrainState& state, const TrainOptions& options) {
  const NetworkSpec& spec = state.net.spec();
  json j;
  j["network"] = {{"widths", spec.widths},
                  {"dt", spec.dt},
                  {"T", spec.steps},
                  {"mode", std::string(to_string(spec.mode))},
                  {"readout", "spike_count_sum"},
                  {"s_max", spec.s_max},
                  {"kernel_size", spec.kernel_size}};
  j["train"] = {{"lr", options.adam.lr},
                {"beta1", options.adam.beta1},
                {"beta2", options.adam.beta2},
                {"eps", options.adam.eps},
                {"batch", options.batch},
                {"epochs", options.epochs},
                {"seed", options.seed},
                {"kernel_trainable", options.kernel_trainable}};
  j["epoch"] = state.epoch;
  j["adam_step"] = state.adam.steps();
  // JSON has no infinity; null stands for "no test error recorded yet".
  if (std::isfinite(state.best_test_error)) {
    j["best_test_error"] = state.best_test_error;
  } else {
    j["best_test_error"] = nullptr;
  }
  return j;
}

}  // namespace

std::vector<std::uint8_t> serialize_checkpoint(const TrainState& state,
                                               const TrainOptions& options) {
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kCheckpointVersion);
  w.str(metadata(state, options).dump());

  const auto& layers = state.net.layers();
  const std::size_t groups = layers.size() * std::size(kAllGroupKinds);
  w.u32(static_cast<std::uint32_t>(3 * groups));
  for (std::size_t n = 0; n < layers.size(); ++n) {
    for (GroupKind kind : kAllGroupKinds) {
      w.group(layer_group(n, kind), group_values(layers[n], kind));
    }
  }
  const GradBuffers& m = state.adam.first_moment();
  const GradBuffers& v = state.adam.second_moment();
  for (std::size_t n = 0; n < layers.size(); ++n) {
    for (GroupKind kind : kAllGroupKinds) {
      w.group("adam.m." + layer_group(n, kind), group_values(m.layers[n], kind));
      w.group("adam.v." + layer_group(n, kind), group_values(v.layers[n], kind));
    }
  }
  return w.take();
}

Checkpoint parse_checkpoint(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  char magic[7];
  r.bytes(magic, sizeof magic);
  if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw FormatError("not a checkpoint (bad magic)");
  }
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }

  Checkpoint ck;
  json meta;
  try {
    meta = json::parse(r.str());
    const json& net = meta.at("network");
    NetworkSpec spec;
    spec.widths = net.at("widths").get<std::vector<int>>();
    spec.dt = net.at("dt").get<double>();
    spec.steps = net.at("T").get<int>();
    spec.mode = parse_neuron_mode(net.at("mode").get<std::string>());
    spec.s_max = net.at("s_max").get<int>();
    spec.kernel_size = net.at("kernel_size").get<int>();
    spec.validate();

    const json& tr = meta.at("train");
    ck.options.adam.lr = tr.at("lr").get<double>();
    ck.options.adam.beta1 = tr.at("beta1").get<double>();
    ck.options.adam.beta2 = tr.at("beta2").get<double>();
    ck.options.adam.eps = tr.at("eps").get<double>();
    ck.options.batch = tr.at("batch").get<int>();
    ck.options.epochs = tr.at("epochs").get<int>();
    ck.options.seed = tr.at("seed").get<std::uint64_t>();
    ck.options.kernel_trainable = tr.at("kernel_trainable").get<bool>();
    ck.state.epoch = meta.at("epoch").get<int>();
    const json& best = meta.at("best_test_error");
    ck.state.best_test_error =
        best.is_null() ? std::numeric_limits<double>::infinity() : best.get<double>();

    // Shapes come from the spec; values are filled in below.
    ck.state.net = Network::initialize(spec, {}, 0, 0);
  } catch (const json::exception& e) {
    throw FormatError(std::string("checkpoint metadata: ") + e.what());
  }

  std::map<std::string, std::vector<double>> groups;
  const std::uint32_t count = r.u32();
  for (std::uint32_t g = 0; g < count; ++g) {
    std::string name = r.str();
    const std::uint64_t n = r.u64();
    if (n > bytes.size() / sizeof(double)) throw FormatError("checkpoint is truncated");
    std::vector<double> values(n);
    r.bytes(values.data(), n * sizeof(double));
    groups[std::move(name)] = std::move(values);
  }
  if (!r.done()) throw FormatError("checkpoint has trailing bytes");

  auto take = [&](const std::string& name, std::vector<double>& into) {
    auto it = groups.find(name);
    if (it == groups.end()) throw FormatError("checkpoint lacks group " + name);
    if (it->second.size() != into.size()) {
      throw FormatError("checkpoint group " + name + " has " +
                        std::to_string(it->second.size()) + " values, expected " +
                        std::to_string(into.size()));
    }
    into = std::move(it->second);
  };
  Network& net = ck.state.net;
  GradBuffers m = net.zero_grads();
  GradBuffers v = net.zero_grads();
  for (std::size_t n = 0; n < net.layers().size(); ++n) {
    for (GroupKind kind : kAllGroupKinds) {
      const std::string name = layer_group(n, kind);
      take(name, group_values(net.layers()[n], kind));
      take("adam.m." + name, group_values(m.layers[n], kind));
      take("adam.v." + name, group_values(v.layers[n], kind));
    }
  }
  ck.state.adam = Adam(ck.options.adam, net);
  ck.state.adam.restore(meta.at("adam_step").get<std::uint64_t>(), std::move(m),
                        std::move(v));
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const TrainState& state,
                     const TrainOptions& options) {
  const std::vector<std::uint8_t> bytes = serialize_checkpoint(state, options);
  // Write-then-rename so a crash never leaves a half-written checkpoint.
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  write_file(tmp, bytes);
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move checkpoint into place at " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  try {
    return parse_checkpoint(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace mapsnn
