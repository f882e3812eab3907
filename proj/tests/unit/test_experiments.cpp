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
#include <fstream>
#include <sstream>
#include <string>

#include "mapsnn/error.hpp"
#include "mapsnn/experiments.hpp"
#include "test_networks.hpp"

using namespace mapsnn;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny(const std::string& mode = "linear", int epochs = 2,
                      const std::string& rates = "0, \"rate_high_hz\": 400") {
  return parse_config(R"({
    "network": {"widths": [8, 6, 2], "T": 16, "mode": ")" + mode + R"("},
    "train": {"lr": 0.003, "batch": 8, "epochs": )" + std::to_string(epochs) + R"(, "seed": 1},
    "data": {"source": "synthetic",
             "synthetic": {"num_units": 8, "duration_ms": 16, "train_samples": 24,
                           "test_samples": 8, "layout": "disjoint",
                           "rate_low_hz": )" + rates + R"(}}
  })");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunOptions in(const fs::path& dir) {
  RunOptions r;
  r.out_dir = dir;
  return r;
}

}  // namespace

TEST_CASE("trace with no input stays silent") {
  TraceOptions o;
  o.window_ms = 10.0;
  const auto rows = trace_neuron(o);
  REQUIRE(rows.size() == 10);
  for (const TraceRow& r : rows) {
    CHECK(r.v == 0.0);
    CHECK(r.s == 0.0);
    CHECK(r.o == 0.0);
  }
}

TEST_CASE("SSP at dt and Linear MSP at 8 dt fire the same eight spikes") {
  TraceOptions ssp;
  ssp.mode = NeuronMode::kSsp;
  ssp.dt = 1.0;
  ssp.window_ms = 8.0;
  ssp.schedule = parse_schedule("1@8");
  TraceOptions lin = ssp;
  lin.mode = NeuronMode::kLinear;
  lin.dt = 8.0;
  const auto a = trace_neuron(ssp);
  const auto b = trace_neuron(lin);
  CHECK(a.size() == 8);
  CHECK(b.size() == 1);
  CHECK(total_spikes(a) == 8.0);
  CHECK(total_spikes(b) == 8.0);
}

TEST_CASE("SFA adapts under constant drive") {
  TraceOptions sfa;
  sfa.window_ms = 8.0;
  sfa.dt = 8.0;
  sfa.schedule = parse_schedule("1@8");
  // One 8-unit step: 2^s - 1 <= 8 gives s = 3.
  CHECK(total_spikes(trace_neuron(sfa)) == 3.0);
}

TEST_CASE("schedule syntax") {
  const auto s = parse_schedule("0.5@4,2@1.5");
  REQUIRE(s.size() == 2);
  CHECK(s[1].value == 2.0);
  CHECK(s[1].duration_ms == 1.5);
  CHECK(parse_schedule("").empty());
  CHECK_THROWS_AS(parse_schedule("1"), ConfigError);
  CHECK_THROWS_AS(parse_schedule("1@0"), ConfigError);
  CHECK_THROWS_AS(parse_schedule("x@2"), ConfigError);
  CHECK_THROWS_AS(parse_schedule("1@2,"), ConfigError);
  TraceOptions bad;
  bad.tau_decay = 1.0;
  CHECK_THROWS_AS(trace_neuron(bad), ConfigError);
}

TEST_CASE("train reruns are byte-identical and resume matches") {
  // Overlapping rates, so the test error first improves after epoch 0.
  const ExperimentConfig c = tiny("linear", 4, "100, \"rate_high_hz\": 300");
  const fs::path a = testnet::scratch("train_a");
  const fs::path b = testnet::scratch("train_b");
  const TrainSummary sa = cmd_train(c, in(a));
  cmd_train(c, in(b));
  CHECK(slurp(a / "metrics.csv") == slurp(b / "metrics.csv"));
  CHECK(fs::exists(a / "model.ckpt"));
  CHECK(sa.rows.size() == 9);

  // Stop after two epochs, then resume from the best checkpoint.
  const fs::path r = testnet::scratch("train_resume");
  ExperimentConfig half = c;
  half.train.epochs = 2;
  cmd_train(half, in(r));
  ExperimentConfig resume = c;
  resume.resume_from = "model.ckpt";
  const TrainSummary sr = cmd_train(resume, in(r));
  CHECK(sr.start_epoch == 1);
  CHECK(slurp(r / "metrics.csv") == slurp(a / "metrics.csv"));
  CHECK(sr.rows.back().epoch == 4);
}

TEST_CASE("eval reproduces the checkpoint's test error") {
  const ExperimentConfig c = tiny("sfa", 3);
  const fs::path d = testnet::scratch("eval");
  const TrainSummary s = cmd_train(c, in(d));
  const EvalResult e = cmd_eval(c, d / "model.ckpt", in(d));
  CHECK(e.error_rate == s.best_test_error);
  CHECK(fs::exists(d / "eval.csv"));
}

TEST_CASE("a single-dt sweep cell equals a plain training run") {
  const ExperimentConfig c = tiny("linear", 2);
  const fs::path d = testnet::scratch("sweep");
  const auto cells = cmd_sweep_dt(c, {1.0}, in(d));
  REQUIRE(cells.size() == 2);
  const TrainSummary t = cmd_train(c, in(testnet::scratch("sweep_ref")));
  const SweepCell& msp = cells[0].pattern == SpikePattern::kMsp ? cells[0] : cells[1];
  const SweepCell& ssp = cells[0].pattern == SpikePattern::kSsp ? cells[0] : cells[1];
  CHECK(msp.final_error == t.final_error);
  CHECK(msp.final_loss == t.final_loss);
  CHECK(msp.mode == NeuronMode::kLinear);
  CHECK(ssp.mode == NeuronMode::kSsp);
  CHECK(fs::exists(d / "sweep_dt.csv"));

  // Parallel cells produce the same numbers.
  const fs::path pd = testnet::scratch("sweep_par");
  const fs::path sd = testnet::scratch("sweep_seq");
  const auto par = cmd_sweep_dt(c, {1.0, 2.0}, in(pd), true);
  const auto seq = cmd_sweep_dt(c, {1.0, 2.0}, in(sd), false);
  REQUIRE(par.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(par[i].final_loss == seq[i].final_loss);
    CHECK(par[i].steps == seq[i].steps);
  }
  CHECK(par[2].steps == 8);
  CHECK(slurp(pd / "sweep_dt.csv") == slurp(sd / "sweep_dt.csv"));
}

TEST_CASE("plasticity twins coincide before any training") {
  const ExperimentConfig c = tiny("sfa", 0);
  const PlasticityComparison p = cmd_compare_plasticity(c, in(testnet::scratch("plastic")));
  CHECK(p.half_epoch == 0);
  CHECK(p.trainable_loss_final == p.frozen_loss_final);
  CHECK(p.trainable_loss_half == p.frozen_loss_half);
}

TEST_CASE("SFA comparison reports spike totals of both twins") {
  const ExperimentConfig c = tiny("sfa", 1);
  const fs::path d = testnet::scratch("sfa");
  const SfaComparison s = cmd_compare_sfa(c, in(d));
  CHECK(s.sfa_spikes > 0.0);
  CHECK(s.ratio == doctest::Approx(s.linear_spikes / s.sfa_spikes));
  CHECK(fs::exists(d / "compare_sfa_summary.csv"));
}

TEST_CASE("gradcheck driver covers all modes") {
  const auto reports = cmd_gradcheck(0, 3, in(testnet::scratch("gradcheck")));
  REQUIRE(reports.size() == 3);
  CHECK(reports[0].mode == NeuronMode::kSfa);
  CHECK(reports[2].mode == NeuronMode::kSsp);
  for (const auto& r : reports) CHECK(r.passed());
}

TEST_CASE("convert-check reports each file") {
  const fs::path d = testnet::scratch("convert");
  const auto res = cmd_convert_check(
      {testnet::fixture("portable_3.mapevt"), testnet::fixture("nmnist_10.bin")},
      EventFormat::kPortable, in(d));
  REQUIRE(res.size() == 2);
  CHECK(res[0].ok);
  CHECK(res[0].events == 3);
  CHECK(res[0].units == 700);
  CHECK_FALSE(res[1].ok);
  CHECK_FALSE(res[1].detail.empty());
}

TEST_CASE("invalid runs create no output") {
  ExperimentConfig c = tiny();
  c.network.widths = {7, 6, 2};
  const fs::path d = testnet::scratch("noop") / "sub";
  CHECK_THROWS_AS(cmd_train(c, in(d)), ConfigError);
  CHECK_FALSE(fs::exists(d));
  ExperimentConfig r = tiny();
  r.resume_from = "absent.ckpt";
  CHECK_THROWS_AS(cmd_train(r, in(d)), IoError);
}
