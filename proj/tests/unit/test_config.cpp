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

#include <filesystem>
#include <string>

#include "mapsnn/config.hpp"
#include "mapsnn/error.hpp"

using namespace mapsnn;

namespace {

const char* kMinimal = R"({
  "network": {"widths": [8, 4, 2], "T": 16},
  "data": {"source": "synthetic", "synthetic": {"num_units": 8, "duration_ms": 16}}
})";

std::string with(const std::string& network, const std::string& data) {
  return "{\"network\": " + network + ", \"data\": " + data + "}";
}

void expect_error(const std::string& json, const std::string& needle) {
  try {
    parse_config(json);
    FAIL("expected ConfigError for " << json);
  } catch (const ConfigError& e) {
    INFO(e.what());
    CHECK(std::string(e.what()).find(needle) != std::string::npos);
  }
}

}  // namespace

TEST_CASE("defaults fill every omitted section") {
  const ExperimentConfig c = parse_config(kMinimal);
  CHECK(c.network.dt == 1.0);
  CHECK(c.network.mode == NeuronMode::kSfa);
  CHECK(c.pattern == SpikePattern::kMsp);
  CHECK(c.network.kernel_size == 8);
  CHECK(c.kernel_trainable);
  CHECK(c.train.batch == 32);
  CHECK(c.train.adam.lr == 1e-3);
  CHECK(c.csv == "metrics.csv");
  CHECK(c.init.center_weights);
  CHECK_FALSE(c.kernel_seed.has_value());
}

TEST_CASE("seeds follow train.seed unless given") {
  ExperimentConfig c = parse_config(with(
      R"({"widths": [8, 2], "T": 4})",
      R"({"source": "synthetic", "synthetic": {"num_units": 8, "seed": 9}})"));
  c.train.seed = 4;
  CHECK(c.effective_kernel_seed() == 4);
  CHECK(c.effective_data_seed() == 9);
}

TEST_CASE("unknown keys and wrong types name the key") {
  expect_error(with(R"({"widths": [8, 2], "T": 4, "bogus": 1})",
                    R"({"source": "synthetic", "synthetic": {"num_units": 8}})"),
               "network.bogus: unknown key");
  expect_error(with(R"({"widths": [8, 2], "T": "four"})",
                    R"({"source": "synthetic", "synthetic": {"num_units": 8}})"),
               "network.T");
  expect_error(with(R"({"widths": [8, 2], "T": 4, "mode": "lif"})",
                    R"({"source": "synthetic", "synthetic": {"num_units": 8}})"),
               "lif");
  expect_error("{\"data\": {\"source\": \"synthetic\"}}", "network");
  expect_error("{not json", "JSON");
}

TEST_CASE("SSP neurons need SSP input") {
  expect_error(with(R"({"widths": [8, 2], "T": 4, "mode": "ssp", "pattern": "msp"})",
                    R"({"source": "synthetic", "synthetic": {"num_units": 8}})"),
               "ssp");
  CHECK_NOTHROW(parse_config(
      with(R"({"widths": [8, 2], "T": 4, "mode": "ssp", "pattern": "ssp"})",
           R"({"source": "synthetic", "synthetic": {"num_units": 8}})")));
}

TEST_CASE("widths must fit the data") {
  expect_error(with(R"({"widths": [9, 2], "T": 4})",
                    R"({"source": "synthetic", "synthetic": {"num_units": 8}})"),
               "widths[0]");
  expect_error(with(R"({"widths": [8, 3], "T": 4})",
                    R"({"source": "synthetic", "synthetic": {"num_units": 8}})"),
               "output width");
  expect_error(with(R"({"widths": [1000, 10], "T": 4})",
                    R"({"source": "nmnist", "train_manifest": "a", "test_manifest": "b"})"),
               "widths[0]");
  expect_error(with(R"({"widths": [1156, 10], "T": 4})", R"({"source": "portable"})"),
               "manifest");
}

TEST_CASE("canonical JSON round trips") {
  const ExperimentConfig c = parse_config(kMinimal);
  const std::string text = to_json(c);
  const ExperimentConfig again = parse_config(text);
  CHECK(to_json(again) == text);
  CHECK(again.network.widths == c.network.widths);
}

TEST_CASE("loading resolves data paths against the file") {
  const auto dir = std::filesystem::path(MAPSNN_FIXTURE_DIR).parent_path().parent_path();
  const ExperimentConfig c = load_config(dir / "configs" / "portable_example.json");
  CHECK(c.source == DataSource::kPortable);
  CHECK(c.base_dir == dir / "configs");
  CHECK_THROWS_AS(load_config(dir / "configs" / "missing.json"), ConfigError);
}
