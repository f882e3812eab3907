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

#include "mapsnn/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mapsnn/error.hpp"
#include "mapsnn/rng.hpp"

namespace mapsnn {

std::string_view to_string(SyntheticTask task) {
  return task == SyntheticTask::kRatePattern ? "rate_pattern" : "temporal_order";
}

SyntheticTask parse_synthetic_task(std::string_view name) {
  if (name == "rate_pattern") return SyntheticTask::kRatePattern;
  if (name == "temporal_order") return SyntheticTask::kTemporalOrder;
  throw ConfigError("unknown synthetic task '" + std::string(name) +
                    "' (expected rate_pattern or temporal_order)");
}

std::string_view to_string(RateLayout layout) {
  return layout == RateLayout::kRandom ? "random" : "disjoint";
}

RateLayout parse_rate_layout(std::string_view name) {
  if (name == "random") return RateLayout::kRandom;
  if (name == "disjoint") return RateLayout::kDisjoint;
  throw ConfigError("unknown rate layout '" + std::string(name) +
                    "' (expected random or disjoint)");
}

void SyntheticTaskSpec::validate() const {
  auto fail = [](const std::string& what) {
    throw ConfigError("synthetic: " + what);
  };
  if (num_classes < 2) fail("num_classes must be at least 2");
  if (num_units < 1) fail("num_units must be positive");
  if (!(duration_ms > 0.0) || duration_ms > 4.0e6) {
    fail("duration_ms must be in (0, 4e6]");
  }
  if (train_samples < 0 || test_samples < 0) fail("sample counts must be >= 0");
  if (task == SyntheticTask::kRatePattern) {
    if (!(rate_low_hz >= 0.0) || !(rate_high_hz >= rate_low_hz)) {
      fail("rates need 0 <= rate_low_hz <= rate_high_hz");
    }
    if (layout == RateLayout::kDisjoint && num_units < num_classes) {
      fail("disjoint layout needs num_units >= num_classes");
    }
  } else {
    if (num_classes != 2) fail("temporal_order has exactly 2 classes");
    if (group_size < 1 || 2 * group_size > num_units) {
      fail("temporal_order needs 1 <= group_size and 2 * group_size <= num_units");
    }
    if (!(burst_rate_hz >= 0.0) || !(noise_rate_hz >= 0.0)) {
      fail("rates must be non-negative");
    }
    if (!(burst_ms > 0.0) || !(gap_ms >= 0.0) || !(jitter_ms >= 0.0)) {
      fail("burst_ms must be positive, gap_ms and jitter_ms non-negative");
    }
    if (onset_ms - jitter_ms < 0.0 ||
        onset_ms + jitter_ms + gap_ms + burst_ms > duration_ms) {
      fail("both bursts must fit inside [0, duration_ms) for every onset");
    }
  }
}

void append_poisson(std::vector<Event>& events, std::uint32_t unit, double rate_hz,
                    double begin_us, double end_us, std::mt19937_64& rng) {
  if (rate_hz <= 0.0 || end_us <= begin_us) return;
  std::exponential_distribution<double> gap(rate_hz * 1e-6);
  for (double t = begin_us + gap(rng); t < end_us; t += gap(rng)) {
    events.push_back({unit, static_cast<std::uint32_t>(std::floor(t)), 0});
  }
}

std::vector<std::vector<double>> class_rates(const SyntheticTaskSpec& spec) {
  std::vector<std::vector<double>> rates(
      static_cast<std::size_t>(spec.num_classes),
      std::vector<double>(static_cast<std::size_t>(spec.num_units), spec.rate_low_hz));
  if (spec.layout == RateLayout::kRandom) {
    auto rng = make_rng(spec.seed, streams::kPrototype);
    std::uniform_real_distribution<double> uni(spec.rate_low_hz, spec.rate_high_hz);
    for (auto& row : rates) {
      for (double& r : row) r = uni(rng);
    }
  } else {
    const int block = spec.num_units / spec.num_classes;
    for (int c = 0; c < spec.num_classes; ++c) {
      for (int u = c * block; u < (c + 1) * block; ++u) {
        rates[static_cast<std::size_t>(c)][static_cast<std::size_t>(u)] =
            spec.rate_high_hz;
      }
    }
  }
  return rates;
}

namespace {

EventStream finish(std::vector<Event> events, const SyntheticTaskSpec& spec) {
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    return a.t_us != b.t_us ? a.t_us < b.t_us : a.unit < b.unit;
  });
  EventStream s;
  s.events = std::move(events);
  s.num_units = static_cast<std::uint32_t>(spec.num_units);
  s.duration_us = static_cast<std::uint64_t>(std::ceil(spec.duration_ms * 1000.0));
  return s;
}

LabeledStream rate_sample(const SyntheticTaskSpec& spec,
                          const std::vector<std::vector<double>>& rates, int label,
                          std::mt19937_64& rng) {
  std::vector<Event> events;
  const double end_us = spec.duration_ms * 1000.0;
  const auto& row = rates[static_cast<std::size_t>(label)];
  for (std::size_t u = 0; u < row.size(); ++u) {
    append_poisson(events, static_cast<std::uint32_t>(u), row[u], 0.0, end_us, rng);
  }
  return {finish(std::move(events), spec), label};
}

LabeledStream order_sample(const SyntheticTaskSpec& spec, int label,
                           std::mt19937_64& rng) {
  std::vector<Event> events;
  const double end_us = spec.duration_ms * 1000.0;
  std::uniform_real_distribution<double> jitter(-spec.jitter_ms, spec.jitter_ms);
  const double first_us = (spec.onset_ms + jitter(rng)) * 1000.0;
  const double second_us = first_us + spec.gap_ms * 1000.0;
  const double width_us = spec.burst_ms * 1000.0;
  // Class 0 fires G1 first, class 1 fires G2 first.
  const double g1_us = label == 0 ? first_us : second_us;
  const double g2_us = label == 0 ? second_us : first_us;
  for (int u = 0; u < spec.num_units; ++u) {
    const auto unit = static_cast<std::uint32_t>(u);
    append_poisson(events, unit, spec.noise_rate_hz, 0.0, end_us, rng);
    if (u < spec.group_size) {
      append_poisson(events, unit, spec.burst_rate_hz, g1_us, g1_us + width_us, rng);
    } else if (u < 2 * spec.group_size) {
      append_poisson(events, unit, spec.burst_rate_hz, g2_us, g2_us + width_us, rng);
    }
  }
  return {finish(std::move(events), spec), label};
}

std::vector<LabeledStream> make_split(const SyntheticTaskSpec& spec, int count,
                                      std::uint64_t stream,
                                      const std::vector<std::vector<double>>& rates) {
  std::vector<LabeledStream> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    auto rng = make_rng(spec.seed, stream, static_cast<std::uint64_t>(i));
    const int label = i % spec.num_classes;
    out.push_back(spec.task == SyntheticTask::kRatePattern
                      ? rate_sample(spec, rates, label, rng)
                      : order_sample(spec, label, rng));
  }
  return out;
}

}  // namespace

SyntheticDataset generate_synthetic(const SyntheticTaskSpec& spec) {
  spec.validate();
  std::vector<std::vector<double>> rates;
  if (spec.task == SyntheticTask::kRatePattern) rates = class_rates(spec);
  SyntheticDataset ds;
  ds.train = make_split(spec, spec.train_samples, streams::kTrainSamples, rates);
  ds.test = make_split(spec, spec.test_samples, streams::kTestSamples, rates);
  return ds;
}

}  // namespace mapsnn
