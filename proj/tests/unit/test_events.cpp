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

#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mapsnn/error.hpp"
#include "mapsnn/events.hpp"
#include "test_networks.hpp"

using namespace mapsnn;

namespace {

std::vector<Event> read_expected(const char* name) {
  std::ifstream in(testnet::fixture(name));
  REQUIRE(in);
  std::string line;
  std::getline(in, line);  // header
  std::vector<Event> out;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::uint32_t unit = 0, t = 0, pol = 0;
    char c1 = 0, c2 = 0;
    ls >> unit >> c1 >> t >> c2 >> pol;
    out.push_back({unit, t, static_cast<std::uint8_t>(pol)});
  }
  return out;
}

}  // namespace

TEST_CASE("N-MNIST records decode to the reference events") {
  const EventStream s = load_events(testnet::fixture("nmnist_10.bin"), EventFormat::kNmnist);
  CHECK(s.num_units == 2 * kNmnistPixels);
  CHECK(s.events == read_expected("nmnist_10_expected.csv"));
  CHECK(s.duration_us == 8388608);

  NmnistOptions merged;
  merged.merge_polarity = true;
  const EventStream m =
      load_events(testnet::fixture("nmnist_10.bin"), EventFormat::kNmnist, merged);
  CHECK(m.num_units == kNmnistPixels);
  CHECK(m.events == read_expected("nmnist_10_merged_expected.csv"));
}

TEST_CASE("malformed N-MNIST input is a format error") {
  CHECK_THROWS_AS(load_events(testnet::fixture("nmnist_truncated.bin"), EventFormat::kNmnist),
                  FormatError);
  const std::vector<std::uint8_t> off_grid = {34, 0, 0, 0, 1};
  CHECK_THROWS_AS(parse_nmnist(off_grid), FormatError);
  const std::vector<std::uint8_t> empty;
  CHECK(parse_nmnist(empty).events.empty());
  CHECK_THROWS_AS(load_events(testnet::fixture("does_not_exist.bin"), EventFormat::kNmnist),
                  IoError);
}

TEST_CASE("MAPEVT1 golden bytes and round trip") {
  const std::vector<std::uint8_t> bytes = read_file(testnet::fixture("portable_3.mapevt"));
  std::vector<std::uint8_t> golden = {'M', 'A', 'P', 'E', 'V', 'T', '1', 1,
                                      0xBC, 0x02, 0, 0,             // 700 units
                                      3, 0, 0, 0, 0, 0, 0, 0};      // 3 events
  const std::uint8_t records[3][9] = {{0, 0, 0, 0, 0, 0, 0, 0, 0},
                                      {5, 0, 0, 0, 0xE8, 0x03, 0, 0, 0},
                                      {0xBB, 0x02, 0, 0, 0xC4, 0x09, 0, 0, 0}};
  for (const auto& r : records) golden.insert(golden.end(), r, r + 9);
  CHECK(bytes == golden);

  const EventStream s = parse_portable(bytes);
  CHECK(s.num_units == 700);
  REQUIRE(s.events.size() == 3);
  CHECK(s.events[2] == Event{699, 2500, 0});
  CHECK(serialize_portable(s) == bytes);
}

TEST_CASE("MAPEVT1 rejects bad headers and payloads") {
  std::vector<std::uint8_t> bytes = read_file(testnet::fixture("portable_3.mapevt"));
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(parse_portable(bad_magic), FormatError);
  auto bad_version = bytes;
  bad_version[7] = 2;
  CHECK_THROWS_AS(parse_portable(bad_version), FormatError);
  auto short_payload = bytes;
  short_payload.pop_back();
  CHECK_THROWS_AS(parse_portable(short_payload), FormatError);
  auto bad_unit = bytes;
  bad_unit[20 + 18] = 0xBC;  // third record's unit becomes 700
  CHECK_THROWS_AS(parse_portable(bad_unit), FormatError);

  EventStream unsorted;
  unsorted.num_units = 2;
  unsorted.events = {{0, 10, 0}, {1, 5, 0}};
  CHECK_THROWS_AS(serialize_portable(unsorted), FormatError);
}

TEST_CASE("binning conserves in-window events") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    EventStream s;
    s.num_units = 1 + static_cast<std::uint32_t>(rng() % 6);
    const int n = static_cast<int>(rng() % 60);
    std::uint32_t t = 0;
    for (int i = 0; i < n; ++i) {
      t += static_cast<std::uint32_t>(rng() % 700);
      s.events.push_back({static_cast<std::uint32_t>(rng() % s.num_units), t, 0});
    }
    const double dt = 0.5 * static_cast<double>(1 + rng() % 4);
    const std::size_t steps = 1 + rng() % 20;
    const SpikeTensor msp = bin_events(s, dt, steps, SpikePattern::kMsp);
    const SpikeTensor ssp = bin_events(s, dt, steps, SpikePattern::kSsp);
    std::int64_t in_window = 0;
    for (const Event& e : s.events) in_window += e.t_us < dt * 1000.0 * steps ? 1 : 0;
    CHECK(msp.total() == in_window);
    CHECK(msp.dropped == static_cast<std::uint64_t>(n - in_window));
    for (std::size_t i = 0; i < msp.counts.size(); ++i) {
      CHECK(ssp.counts[i] <= msp.counts[i]);
      CHECK(ssp.counts[i] == (msp.counts[i] > 0 ? 1 : 0));
    }
    // Two fine bins add up to one coarse bin.
    const SpikeTensor fine = bin_events(s, dt / 2.0, 2 * steps, SpikePattern::kMsp);
    for (std::size_t b = 0; b < steps; ++b) {
      for (std::size_t u = 0; u < s.num_units; ++u) {
        CHECK(msp.at(b, u) == fine.at(2 * b, u) + fine.at(2 * b + 1, u));
      }
    }
  }
}

TEST_CASE("bin edges are half-open") {
  EventStream s;
  s.num_units = 1;
  s.events = {{0, 999, 0}, {0, 1000, 0}, {0, 2000, 0}};
  const SpikeTensor x = bin_events(s, 1.0, 2, SpikePattern::kMsp);
  CHECK(x.at(0, 0) == 1);
  CHECK(x.at(1, 0) == 1);
  CHECK(x.dropped == 1);
  CHECK_THROWS_AS(bin_events(s, 0.0, 2, SpikePattern::kMsp), ConfigError);
}

TEST_CASE("manifests resolve paths and skip a header row") {
  const auto entries = read_manifest(testnet::fixture("portable/train.csv"));
  REQUIRE(entries.size() == 24);
  CHECK(entries[0].path == testnet::fixture("portable") / "train_00.mapevt");
  CHECK(entries[1].label == 1);
  const auto streams = load_manifest(testnet::fixture("portable/test.csv"), EventFormat::kPortable);
  CHECK(streams.size() == 8);
  const Dataset ds = bin_dataset(streams, 1.0, 16, SpikePattern::kMsp);
  CHECK(ds.num_units == 8);
  CHECK(ds.size() == 8);

  const auto dir = testnet::scratch("manifest");
  std::ofstream(dir / "bad.csv") << "a.mapevt,0\nb.mapevt,x\n";
  CHECK_THROWS_AS(read_manifest(dir / "bad.csv"), FormatError);
  std::ofstream(dir / "neg.csv") << "a.mapevt,-1\n";
  CHECK_THROWS_AS(read_manifest(dir / "neg.csv"), FormatError);
  CHECK_THROWS_AS(read_manifest(dir / "missing.csv"), IoError);
}

TEST_CASE("datasets refuse mixed unit counts") {
  std::vector<LabeledStream> streams(2);
  streams[0].stream.num_units = 4;
  streams[1].stream.num_units = 5;
  CHECK_THROWS_AS(bin_dataset(streams, 1.0, 4, SpikePattern::kMsp), ConfigError);
}
