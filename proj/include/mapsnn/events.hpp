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

// Event streams, their two on-disk formats, and time binning.
//
// N-MNIST AER: 5-byte records
//   byte 0      x (0..33)
//   byte 1      y (0..33)
//   byte 2..4   bit 23 = polarity, bits 22..0 = timestamp in microseconds,
//               big-endian
// unit_id = y * 34 + x, plus 1156 * polarity unless polarities are merged.
//
// MAPEVT1 portable format, little-endian:
//   "MAPEVT1" (7 bytes), version (u8, = 1), num_units (u32), num_events (u64),
//   then num_events records of unit_id (u32), timestamp_us (u32), polarity (u8).

#ifndef MAPSNN_EVENTS_HPP_
#define MAPSNN_EVENTS_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mapsnn/spike_tensor.hpp"

namespace mapsnn {

struct Event {
  std::uint32_t unit = 0;
  std::uint32_t t_us = 0;
  std::uint8_t polarity = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

struct EventStream {
  std::vector<Event> events;  // non-decreasing timestamps
  std::uint32_t num_units = 0;
  std::uint64_t duration_us = 0;

  // Throws FormatError if an invariant does not hold.
  void validate() const;
};

inline constexpr std::uint32_t kNmnistSide = 34;
inline constexpr std::uint32_t kNmnistPixels = kNmnistSide * kNmnistSide;
inline constexpr std::uint8_t kPortableVersion = 1;

struct NmnistOptions {
  bool merge_polarity = false;
};

EventStream parse_nmnist(std::span<const std::uint8_t> bytes,
                         const NmnistOptions& options = {});
EventStream parse_portable(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_portable(const EventStream& stream);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes);

enum class EventFormat { kNmnist, kPortable };
EventStream load_events(const std::filesystem::path& path, EventFormat format,
                        const NmnistOptions& options = {});

// counts[t][u] = events of unit u with timestamp in [t dt, (t + 1) dt);
// clamped to 1 under SSP. Later events are dropped and counted.
SpikeTensor bin_events(const EventStream& stream, double dt_ms,
                       std::size_t steps, SpikePattern pattern);

struct LabeledStream {
  EventStream stream;
  int label = 0;
};

struct ManifestEntry {
  std::filesystem::path path;
  int label = 0;
};

// Parses a "filename,label" CSV (header optional); paths are resolved
// against the manifest's directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest);

// Loads every stream a manifest lists.
std::vector<LabeledStream> load_manifest(const std::filesystem::path& manifest,
                                         EventFormat format,
                                         const NmnistOptions& options = {});

// A binned, labeled dataset ready for the network.
struct Dataset {
  std::vector<SpikeTensor> inputs;
  std::vector<int> labels;
  std::uint32_t num_units = 0;
  std::uint64_t dropped_events = 0;

  std::size_t size() const { return inputs.size(); }
};

Dataset bin_dataset(std::span<const LabeledStream> streams, double dt_ms,
                    std::size_t steps, SpikePattern pattern);

}  // namespace mapsnn

#endif  // MAPSNN_EVENTS_HPP_
