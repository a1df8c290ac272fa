// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "tcf/csv.hpp"
#include "tcf/data.hpp"
#include "tcf/error.hpp"

namespace tcf {
namespace {

constexpr std::array<char, 4> kFeatureMagic{'T', 'F', 'V', '1'};

std::uint32_t read_u32_le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void put_u32_le(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

}  // namespace

FrameFeatureSequence load_feature_file(const std::filesystem::path& path,
                                       const std::string& movie_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open feature file " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::string where = path.string() + ": ";

  if (bytes.size() < 4 || std::memcmp(bytes.data(), kFeatureMagic.data(), 4) != 0) {
    throw FormatError(FormatError::Kind::kBadMagic, where + "bad magic (expected TFV1)");
  }
  if (bytes.size() < 12) {
    throw FormatError(FormatError::Kind::kTruncated, where + "truncated header");
  }
  const std::uint32_t n_frames = read_u32_le(p + 4);
  const std::uint32_t dim = read_u32_le(p + 8);
  if (n_frames == 0 || dim == 0) {
    throw FormatError(FormatError::Kind::kBadHeader,
                      where + "empty feature sequence (n_frames=" + std::to_string(n_frames) +
                          ", dim=" + std::to_string(dim) + ")");
  }
  const std::uint64_t count = static_cast<std::uint64_t>(n_frames) * dim;
  const std::uint64_t expected = 12 + count * 4;
  if (bytes.size() < expected) {
    throw FormatError(FormatError::Kind::kTruncated,
                      where + "truncated payload: " + std::to_string(bytes.size()) + " of " +
                          std::to_string(expected) + " bytes");
  }
  if (bytes.size() > expected) {
    throw FormatError(FormatError::Kind::kBadValue,
                      where + std::to_string(bytes.size() - expected) + " trailing bytes");
  }

  std::vector<double> values(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const float f = std::bit_cast<float>(read_u32_le(p + 12 + 4 * i));
    if (!std::isfinite(f)) {
      throw FormatError(FormatError::Kind::kNonFinite,
                        where + "non-finite value at frame " + std::to_string(i / dim) +
                            ", channel " + std::to_string(i % dim));
    }
    values[i] = static_cast<double>(f);
  }
  return {movie_id.empty() ? path.stem().string() : movie_id,
          Tensor2(n_frames, dim, std::move(values))};
}

void write_feature_file(const std::filesystem::path& path, const Tensor2& frames) {
  std::string out(kFeatureMagic.begin(), kFeatureMagic.end());
  put_u32_le(out, static_cast<std::uint32_t>(frames.rows()));
  put_u32_le(out, static_cast<std::uint32_t>(frames.cols()));
  out.reserve(out.size() + frames.size() * 4);
  for (double v : frames.flat()) put_u32_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write feature file " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("failed writing " + path.string());
}

FrameFeatureSequence normalize_length(const FrameFeatureSequence& seq, std::size_t max_frames) {
  if (max_frames == 0) throw ShapeError("normalize_length: max_frames must be >= 1");
  const std::size_t dim = seq.frames.cols();
  Tensor2 out(max_frames, dim);
  const std::size_t keep = std::min(seq.frames.rows(), max_frames);
  std::copy_n(seq.frames.flat().begin(), keep * dim, out.flat().begin());
  return {seq.movie_id, std::move(out)};
}

std::vector<ManifestEntry> load_manifest(const std::filesystem::path& path) {
  csv::Reader reader(path, {"movie_id", "release_ts", "feature_path"});
  std::vector<ManifestEntry> out;
  std::vector<std::string> row;
  while (reader.next(row)) {
    if (row[0].empty()) reader.fail("empty movie_id");
    if (row[2].empty()) reader.fail("empty feature_path");
    out.push_back({row[0], reader.parse_int(row[1], "release_ts"), row[2]});
  }
  return out;
}

void write_manifest(const std::filesystem::path& path, std::span<const ManifestEntry> entries) {
  std::string out = "movie_id,release_ts,feature_path\n";
  for (const auto& e : entries) {
    out += e.movie_id + "," + std::to_string(e.release_ts) + "," + e.feature_path + "\n";
  }
  csv::write_file(path, out);
}

std::vector<AttendanceRecord> load_attendance(const std::filesystem::path& path) {
  csv::Reader reader(path, {"user_id", "movie_id", "timestamp"});
  std::vector<AttendanceRecord> out;
  std::vector<std::string> row;
  while (reader.next(row)) {
    if (row[0].empty() || row[1].empty()) reader.fail("empty user_id or movie_id");
    const std::int64_t ts = reader.parse_int(row[2], "timestamp");
    if (ts < 0) reader.fail("negative timestamp " + row[2]);
    out.push_back({row[0], row[1], ts});
  }
  return out;
}

void write_attendance(const std::filesystem::path& path,
                      std::span<const AttendanceRecord> records) {
  std::string out = "user_id,movie_id,timestamp\n";
  for (const auto& r : records) {
    out += r.user_id + "," + r.movie_id + "," + std::to_string(r.timestamp) + "\n";
  }
  csv::write_file(path, out);
}

}  // namespace tcf
