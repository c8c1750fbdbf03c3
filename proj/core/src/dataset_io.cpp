/*
 Copyright 2026 The egcsi Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

     http://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include "egcsi/dataset_io.hpp"

#include <limits>
#include <string>

#include "binary_io.hpp"
#include "egcsi/errors.hpp"
#include "json_convert.hpp"

namespace egcsi {
namespace {

using detail::json;

constexpr char kDatasetMagic[] = "EGCSIDS1";
constexpr char kFeedbackMagic[] = "EGCSIFB1";
constexpr int kFormatVersion = 1;

void put_header(detail::ByteWriter& w, const char* magic, const json& header) {
  w.put_string(std::string(magic, 8));
  const std::string text = header.dump();
  w.put_u64(text.size());
  w.put_string(text);
}

json get_header(detail::ByteReader& r, const char* magic, const char* what) {
  if (r.get_string(8) != std::string(magic, 8)) throw FormatError(std::string(what) + ": bad magic");
  const std::uint64_t len = r.get_u64();
  if (len > r.remaining()) throw FormatError(std::string(what) + ": header length exceeds file size");
  const std::string text = r.get_string(static_cast<std::size_t>(len));
  json h;
  try {
    h = json::parse(text);
  } catch (const json::parse_error&) {
    throw FormatError(std::string(what) + ": malformed header");
  }
  if (!h.is_object() || h.value("version", -1) != kFormatVersion)
    throw FormatError(std::string(what) + ": unsupported version");
  return h;
}

template <typename F>
auto header_field(const char* what, F&& f) {
  try {
    return f();
  } catch (const json::exception&) {
    throw FormatError(std::string(what) + ": missing or mistyped header field");
  } catch (const ConfigError& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::vector<std::uint8_t> serialize_dataset(const Dataset& ds) {
  ds.system.validate();
  json h{{"format", "egcsi-dataset"},
         {"version", kFormatVersion},
         {"source", ds.source},
         {"env_id", ds.env_id},
         {"system", detail::to_json(ds.system)},
         {"environment", ds.environment ? detail::to_json(*ds.environment) : json(nullptr)},
         {"seed", ds.seed},
         {"sample_count", ds.samples.size()},
         {"n_tx", ds.system.n_tx},
         {"n_sc", ds.system.n_sc},
         {"layout", "row-major interleaved re/im float64 little-endian"}};
  detail::ByteWriter w;
  put_header(w, kDatasetMagic, h);
  for (const auto& s : ds.samples) {
    if (s.entries.rows() != ds.system.n_tx || s.entries.cols() != ds.system.n_sc)
      throw DimensionError("dataset sample shape does not match the system configuration");
    for (int r = 0; r < ds.system.n_tx; ++r)
      for (int c = 0; c < ds.system.n_sc; ++c) {
        w.put_f64(s.entries(r, c).real());
        w.put_f64(s.entries(r, c).imag());
      }
  }
  return std::move(w.bytes());
}

Dataset deserialize_dataset(std::span<const std::uint8_t> bytes) {
  constexpr const char* what = "dataset";
  detail::ByteReader r(bytes);
  const json h = get_header(r, kDatasetMagic, what);
  Dataset ds;
  std::uint64_t count = 0;
  header_field(what, [&] {
    ds.source = h.at("source").get<std::string>();
    ds.env_id = h.at("env_id").get<std::string>();
    ds.system = detail::system_from_json(h.at("system"));
    if (!h.at("environment").is_null()) ds.environment = detail::environment_from_json(h.at("environment"));
    ds.seed = h.at("seed").get<std::uint64_t>();
    count = h.at("sample_count").get<std::uint64_t>();
    return 0;
  });
  if (ds.source != "synthetic" && ds.source != "external") throw FormatError("dataset: unknown source");
  const std::size_t per_sample = static_cast<std::size_t>(ds.system.n_tx) * ds.system.n_sc * 16;
  if (count > std::numeric_limits<std::size_t>::max() / per_sample || r.remaining() != count * per_sample)
    throw FormatError("dataset: payload length does not match sample_count");
  ds.samples.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    ChannelMatrix m;
    m.entries.resize(ds.system.n_tx, ds.system.n_sc);
    for (int row = 0; row < ds.system.n_tx; ++row)
      for (int c = 0; c < ds.system.n_sc; ++c) {
        const double re = r.get_f64();
        const double im = r.get_f64();
        m.entries(row, c) = cplx(re, im);
      }
    ds.samples.push_back(std::move(m));
  }
  return ds;
}

void save_dataset(const std::filesystem::path& path, const Dataset& ds) {
  detail::write_file_atomic(path, serialize_dataset(ds));
}

Dataset load_dataset(const std::filesystem::path& path) { return deserialize_dataset(detail::read_file(path)); }

std::vector<std::uint8_t> serialize_feedback_file(const FeedbackFile& f) {
  json h{{"format", "egcsi-feedback"},
         {"version", kFormatVersion},
         {"env_id", f.env_id},
         {"pipeline", detail::to_json(f.pipeline)},
         {"codec", f.codec},
         {"payload_bits", f.payload_bits},
         {"seed", f.seed},
         {"message_count", f.messages.size()}};
  detail::ByteWriter w;
  put_header(w, kFeedbackMagic, h);
  for (const auto& m : f.messages) {
    if (m.size() > std::numeric_limits<std::uint32_t>::max()) throw FormatError("feedback message too long");
    w.put_u32(static_cast<std::uint32_t>(m.size()));
    w.put_bytes(m);
  }
  return std::move(w.bytes());
}

FeedbackFile deserialize_feedback_file(std::span<const std::uint8_t> bytes) {
  constexpr const char* what = "feedback file";
  detail::ByteReader r(bytes);
  const json h = get_header(r, kFeedbackMagic, what);
  FeedbackFile f;
  std::uint64_t count = 0;
  header_field(what, [&] {
    f.env_id = h.at("env_id").get<std::string>();
    f.pipeline = detail::pipeline_from_json(h.at("pipeline"));
    f.codec = h.at("codec").get<std::string>();
    f.payload_bits = h.at("payload_bits").get<std::size_t>();
    f.seed = h.at("seed").get<std::uint64_t>();
    count = h.at("message_count").get<std::uint64_t>();
    return 0;
  });
  if (count > r.remaining() / 4) throw FormatError("feedback file: message_count exceeds file size");
  f.messages.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint32_t n = r.get_u32();
    const auto b = r.get_bytes(n);
    f.messages.emplace_back(b.begin(), b.end());
  }
  if (r.remaining() != 0) throw FormatError("feedback file: trailing bytes");
  return f;
}

void save_feedback_file(const std::filesystem::path& path, const FeedbackFile& f) {
  detail::write_file_atomic(path, serialize_feedback_file(f));
}

FeedbackFile load_feedback_file(const std::filesystem::path& path) {
  return deserialize_feedback_file(detail::read_file(path));
}

}  // namespace egcsi
