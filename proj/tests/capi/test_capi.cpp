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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "mapsnn/mapsnn.h"

namespace fs = std::filesystem;

namespace {

const char* kConfig = R"({
  "network": {"widths": [8, 6, 2], "T": 16, "mode": "linear"},
  "train": {"lr": 0.003, "batch": 8, "epochs": 2, "seed": 1},
  "data": {"source": "synthetic",
           "synthetic": {"num_units": 8, "duration_ms": 16, "train_samples": 16,
                         "test_samples": 8, "layout": "disjoint",
                         "rate_low_hz": 0, "rate_high_hz": 400}}
})";

fs::path scratch(const char* name) {
  auto p = fs::temp_directory_path() / "mapsnn_capi" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct Config {
  mapsnn_config* ptr = nullptr;
  explicit Config(const char* json = kConfig) {
    REQUIRE(mapsnn_config_parse(json, nullptr, &ptr) == MAPSNN_OK);
  }
  ~Config() { mapsnn_config_free(ptr); }
};

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(mapsnn_version()) == "1.0.0");
  CHECK(std::string(mapsnn_status_name(MAPSNN_OK)) == "ok");
  CHECK(std::string(mapsnn_status_name(MAPSNN_ERR_FORMAT)) == "format error");
  CHECK(std::string(mapsnn_status_name(static_cast<mapsnn_status>(99))) == "unknown status");
}

TEST_CASE("config errors map to status codes") {
  mapsnn_config* c = nullptr;
  CHECK(mapsnn_config_parse(R"({"network": {"widths": [8, 2], "T": 4, "nope": 1},
                               "data": {"source": "synthetic"}})",
                            nullptr, &c) == MAPSNN_ERR_CONFIG);
  CHECK(c == nullptr);
  CHECK(std::string(mapsnn_last_error()).find("network.nope") != std::string::npos);
  CHECK(mapsnn_config_parse(nullptr, nullptr, &c) == MAPSNN_ERR_INVALID_ARGUMENT);
  CHECK(mapsnn_config_load("/nonexistent/config.json", &c) == MAPSNN_ERR_CONFIG);
  mapsnn_config_free(nullptr);
}

TEST_CASE("config JSON uses the two-call buffer protocol") {
  Config c;
  size_t needed = 0;
  CHECK(mapsnn_config_to_json(c.ptr, nullptr, 0, &needed) == MAPSNN_ERR_BUFFER_TOO_SMALL);
  REQUIRE(needed > 1);
  std::string buf(needed, '\0');
  CHECK(mapsnn_config_to_json(c.ptr, buf.data(), buf.size(), &needed) == MAPSNN_OK);
  CHECK(buf.find("\"widths\"") != std::string::npos);
  CHECK(mapsnn_config_set_threads(c.ptr, 0) == MAPSNN_ERR_CONFIG);
  CHECK(mapsnn_config_set_seed(c.ptr, 5) == MAPSNN_OK);
}

TEST_CASE("train, eval and model forward agree") {
  Config c;
  const fs::path dir = scratch("train");
  const std::string out = dir.string();
  mapsnn_run_options run{out.c_str(), 0};
  mapsnn_train_result r{};
  REQUIRE(mapsnn_train(c.ptr, &run, &r) == MAPSNN_OK);
  CHECK(r.end_epoch == 2);
  CHECK(r.start_epoch == 0);
  CHECK(fs::exists(dir / "metrics.csv"));

  const std::string ckpt = (dir / "model.ckpt").string();
  double err = -1.0, loss = -1.0;
  REQUIRE(mapsnn_eval(c.ptr, ckpt.c_str(), &run, &err, &loss) == MAPSNN_OK);
  CHECK(err == r.best_test_error);
  CHECK(std::isfinite(loss));

  mapsnn_model* m = nullptr;
  REQUIRE(mapsnn_model_load(ckpt.c_str(), &m) == MAPSNN_OK);
  int width = 0, steps = 0, classes = 0;
  CHECK(mapsnn_model_shape(m, &width, &steps, &classes) == MAPSNN_OK);
  CHECK(width == 8);
  CHECK(classes == 2);
  std::vector<int32_t> counts(static_cast<size_t>(width * steps), 0);
  double logits[2] = {0, 0};
  int predicted = -1;
  CHECK(mapsnn_model_forward(m, counts.data(), counts.size(), logits, 2, &predicted) == MAPSNN_OK);
  CHECK(predicted == 0);  // silent input, tie at zero
  CHECK(mapsnn_model_forward(m, counts.data(), counts.size(), logits, 1, nullptr) ==
        MAPSNN_ERR_BUFFER_TOO_SMALL);
  CHECK(mapsnn_model_forward(m, counts.data(), 3, logits, 2, nullptr) == MAPSNN_ERR_CONFIG);
  counts[0] = -1;
  CHECK(mapsnn_model_forward(m, counts.data(), counts.size(), logits, 2, nullptr) ==
        MAPSNN_ERR_CONFIG);
  mapsnn_model_free(m);

  CHECK(mapsnn_model_load((dir / "metrics.csv").string().c_str(), &m) == MAPSNN_ERR_FORMAT);
  CHECK(mapsnn_model_load((dir / "absent").string().c_str(), &m) == MAPSNN_ERR_IO);
}

TEST_CASE("sweep reports its cell count") {
  Config c;
  const std::string out = scratch("sweep").string();
  mapsnn_run_options run{out.c_str(), 0};
  const double dts[] = {1.0, 2.0};
  size_t count = 0;
  CHECK(mapsnn_sweep_dt(c.ptr, dts, 2, 0, &run, nullptr, 0, &count) == MAPSNN_OK);
  CHECK(count == 4);
  mapsnn_sweep_cell cells[4];
  CHECK(mapsnn_sweep_dt(c.ptr, dts, 2, 1, &run, cells, 4, &count) == MAPSNN_OK);
  CHECK(cells[2].dt == 2.0);
  CHECK(cells[2].steps == 8);
  mapsnn_sweep_cell one[1];
  CHECK(mapsnn_sweep_dt(c.ptr, dts, 2, 0, &run, one, 1, &count) == MAPSNN_ERR_BUFFER_TOO_SMALL);
}

TEST_CASE("trace reproduces the eight-spike case") {
  mapsnn_trace_options o;
  mapsnn_trace_options_default(&o);
  o.mode = MAPSNN_MODE_LINEAR;
  o.dt = 8.0;
  o.window_ms = 8.0;
  o.schedule = "1@8";
  const std::string out = scratch("trace").string();
  mapsnn_run_options run{out.c_str(), 0};
  double spikes = 0.0;
  CHECK(mapsnn_trace_neuron(&o, &run, &spikes) == MAPSNN_OK);
  CHECK(spikes == 8.0);
  o.schedule = "oops";
  CHECK(mapsnn_trace_neuron(&o, &run, &spikes) == MAPSNN_ERR_CONFIG);
  o.schedule = nullptr;
  o.mode = static_cast<mapsnn_mode>(7);
  CHECK(mapsnn_trace_neuron(&o, &run, &spikes) == MAPSNN_ERR_INVALID_ARGUMENT);
}

TEST_CASE("gradcheck and convert-check through the C API") {
  const std::string out = scratch("checks").string();
  mapsnn_run_options run{out.c_str(), 0};
  int passed = 0;
  double worst = 1.0;
  CHECK(mapsnn_gradcheck(3, 2, &run, &passed, &worst) == MAPSNN_OK);
  CHECK(passed == 1);
  CHECK(worst < 1e-4);

  const std::string good = (fs::path(MAPSNN_FIXTURE_DIR) / "nmnist_10.bin").string();
  const std::string bad = (fs::path(MAPSNN_FIXTURE_DIR) / "nmnist_truncated.bin").string();
  const char* files[] = {good.c_str(), bad.c_str()};
  size_t failures = 0;
  CHECK(mapsnn_convert_check(files, 2, MAPSNN_FORMAT_NMNIST, 0, &run, &failures) == MAPSNN_OK);
  CHECK(failures == 1);
  size_t checked = 0;
  const std::string manifest = (fs::path(MAPSNN_FIXTURE_DIR) / "portable" / "train.csv").string();
  CHECK(mapsnn_convert_check_manifest(manifest.c_str(), MAPSNN_FORMAT_PORTABLE, 0, &run,
                                      &checked, &failures) == MAPSNN_OK);
  CHECK(checked == 24);
  CHECK(failures == 0);
}
