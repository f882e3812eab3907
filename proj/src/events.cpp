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

#include "mapsnn/events.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "mapsnn/error.hpp"

namespace mapsnn {

namespace {

constexpr char kMagic[7] = {'M', 'A', 'P', 'E', 'V', 'T', '1'};
constexpr std::size_t kHeaderBytes = 7 + 1 + 4 + 8;
constexpr std::size_t kRecordBytes = 4 + 4 + 1;

std::uint32_t load_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint64_t load_u64(const std::uint8_t* p) {
  return static_cast<std::uint64_t>(load_u32(p)) |
         (static_cast<std::uint64_t>(load_u32(p + 4)) << 32);
}

void store_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void store_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t duration_of(const std::vector<Event>& events) {
  return events.empty() ? 0 : static_cast<std::uint64_t>(events.back().t_us) + 1;
}

}  // namespace

void EventStream::validate() const {
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (e.unit >= num_units) {
      throw FormatError("event " + std::to_string(i) + ": unit " +
                        std::to_string(e.unit) + " out of range (num_units " +
                        std::to_string(num_units) + ")");
    }
    if (e.polarity > 1) {
      throw FormatError("event " + std::to_string(i) + ": polarity must be 0 or 1");
    }
    if (i > 0 && e.t_us < events[i - 1].t_us) {
      throw FormatError("event " + std::to_string(i) + ": timestamp " +
                        std::to_string(e.t_us) + " precedes " +
                        std::to_string(events[i - 1].t_us));
    }
  }
}

EventStream parse_nmnist(std::span<const std::uint8_t> bytes,
                         const NmnistOptions& options) {
  if (bytes.size() % 5 != 0) {
    throw FormatError("N-MNIST stream of " + std::to_string(bytes.size()) +
                      " bytes ends with a truncated record");
  }
  EventStream stream;
  stream.num_units = options.merge_polarity ? kNmnistPixels : 2 * kNmnistPixels;
  stream.events.reserve(bytes.size() / 5);
  for (std::size_t r = 0; r < bytes.size() / 5; ++r) {
    const std::uint8_t* p = bytes.data() + 5 * r;
    const std::uint32_t x = p[0];
    const std::uint32_t y = p[1];
    if (x >= kNmnistSide || y >= kNmnistSide) {
      throw FormatError("N-MNIST record " + std::to_string(r) + ": coordinate (" +
                        std::to_string(x) + ", " + std::to_string(y) +
                        ") outside the 34x34 grid");
    }
    Event e;
    e.polarity = static_cast<std::uint8_t>(p[2] >> 7);
    e.t_us = (static_cast<std::uint32_t>(p[2] & 0x7F) << 16) |
             (static_cast<std::uint32_t>(p[3]) << 8) | p[4];
    e.unit = y * kNmnistSide + x;
    if (!options.merge_polarity) e.unit += kNmnistPixels * e.polarity;
    stream.events.push_back(e);
  }
  // Recordings are time-ordered in practice; tolerate files that are not.
  std::stable_sort(stream.events.begin(), stream.events.end(),
                   [](const Event& a, const Event& b) { return a.t_us < b.t_us; });
  stream.duration_us = duration_of(stream.events);
  return stream;
}

EventStream parse_portable(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes ||
      std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw FormatError("not a MAPEVT1 file (bad magic)");
  }
  const std::uint8_t version = bytes[7];
  if (version != kPortableVersion) {
    throw FormatError("unsupported MAPEVT1 version " + std::to_string(version));
  }
  EventStream stream;
  stream.num_units = load_u32(bytes.data() + 8);
  const std::uint64_t count = load_u64(bytes.data() + 12);
  const std::uint64_t payload = bytes.size() - kHeaderBytes;
  if (count > payload / kRecordBytes || payload != count * kRecordBytes) {
    throw FormatError("MAPEVT1 header declares " + std::to_string(count) +
                      " events but the payload holds " + std::to_string(payload) +
                      " bytes");
  }
  stream.events.resize(count);
  const std::uint8_t* p = bytes.data() + kHeaderBytes;
  for (std::uint64_t i = 0; i < count; ++i, p += kRecordBytes) {
    stream.events[i] = Event{load_u32(p), load_u32(p + 4), p[8]};
  }
  stream.validate();
  stream.duration_us = duration_of(stream.events);
  return stream;
}

std::vector<std::uint8_t> serialize_portable(const EventStream& stream) {
  stream.validate();
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + kRecordBytes * stream.events.size());
  out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
  out.push_back(kPortableVersion);
  store_u32(out, stream.num_units);
  store_u64(out, stream.events.size());
  for (const Event& e : stream.events) {
    store_u32(out, e.unit);
    store_u32(out, e.t_us);
    out.push_back(e.polarity);
  }
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("error reading " + path.string());
  return bytes;
}

void write_file(const std::filesystem::path& path,
                std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("error writing " + path.string());
}

EventStream load_events(const std::filesystem::path& path, EventFormat format,
                        const NmnistOptions& options) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  try {
    return format == EventFormat::kNmnist ? parse_nmnist(bytes, options)
                                          : parse_portable(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

SpikeTensor bin_events(const EventStream& stream, double dt_ms, std::size_t steps,
                       SpikePattern pattern) {
  if (!(dt_ms > 0.0) || steps == 0) {
    throw ConfigError("bin_events: dt must be positive and T at least 1");
  }
  SpikeTensor tensor(steps, stream.num_units, dt_ms, pattern);
  const double dt_us = dt_ms * 1000.0;
  // Integer division when the step is a whole number of microseconds, so bin
  // edges are exact.
  const bool integral = dt_us == std::floor(dt_us) && dt_us < 4.0e18;
  const auto dt_int = static_cast<std::uint64_t>(dt_us);
  for (const Event& e : stream.events) {
    if (e.unit >= stream.num_units) {
      throw FormatError("bin_events: unit " + std::to_string(e.unit) +
                        " out of range");
    }
    const std::uint64_t bin =
        integral ? e.t_us / dt_int
                 : static_cast<std::uint64_t>(std::floor(e.t_us / dt_us));
    if (bin >= steps) {
      ++tensor.dropped;
      continue;
    }
    std::int32_t& c = tensor.at(bin, e.unit);
    if (pattern == SpikePattern::kSsp) {
      c = 1;
    } else {
      ++c;
    }
  }
  return tensor;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open manifest " + manifest.string());
  const std::filesystem::path base = manifest.parent_path();
  std::vector<ManifestEntry> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) {
      throw FormatError(manifest.string() + ":" + std::to_string(line_no) +
                        ": expected 'filename,label'");
    }
    const std::string name = line.substr(0, comma);
    const std::string label_text = line.substr(comma + 1);
    int label = 0;
    std::istringstream ls(label_text);
    if (!(ls >> label) || !ls.eof()) {
      if (line_no == 1) continue;  // header row
      throw FormatError(manifest.string() + ":" + std::to_string(line_no) +
                        ": label '" + label_text + "' is not an integer");
    }
    if (label < 0) {
      throw FormatError(manifest.string() + ":" + std::to_string(line_no) +
                        ": negative label");
    }
    out.push_back({base / name, label});
  }
  return out;
}

std::vector<LabeledStream> load_manifest(const std::filesystem::path& manifest,
                                         EventFormat format,
                                         const NmnistOptions& options) {
  std::vector<LabeledStream> out;
  for (const ManifestEntry& e : read_manifest(manifest)) {
    out.push_back({load_events(e.path, format, options), e.label});
  }
  return out;
}

Dataset bin_dataset(std::span<const LabeledStream> streams, double dt_ms,
                    std::size_t steps, SpikePattern pattern) {
  Dataset ds;
  if (!streams.empty()) ds.num_units = streams.front().stream.num_units;
  ds.inputs.reserve(streams.size());
  ds.labels.reserve(streams.size());
  for (const LabeledStream& ls : streams) {
    if (ls.stream.num_units != ds.num_units) {
      throw ConfigError("dataset mixes streams with " + std::to_string(ds.num_units) +
                        " and " + std::to_string(ls.stream.num_units) + " units");
    }
    ds.inputs.push_back(bin_events(ls.stream, dt_ms, steps, pattern));
    ds.dropped_events += ds.inputs.back().dropped;
    ds.labels.push_back(ls.label);
  }
  return ds;
}

}  // namespace mapsnn
