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
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "egcsi/channel_synth.hpp"
#include "egcsi/feedback_pipeline.hpp"

namespace egcsi {

// Dataset container: 8-byte magic "EGCSIDS1", u64 little-endian header
// length, UTF-8 JSON header, then per sample n_tx * n_sc complex entries
// in row-major order as interleaved little-endian float64 (re, im).
// Ground-truth paths are not stored.

std::vector<std::uint8_t> serialize_dataset(const Dataset& ds);
/// Throws FormatError for a bad magic, header or payload length.
Dataset deserialize_dataset(std::span<const std::uint8_t> bytes);
/// Atomic write; throws IoError (for example when the directory is missing).
void save_dataset(const std::filesystem::path& path, const Dataset& ds);
Dataset load_dataset(const std::filesystem::path& path);

/// Encoded feedback for a batch of channels, as written by `encode`.
struct FeedbackFile {
  std::string env_id;
  PipelineConfig pipeline;
  std::string codec;
  std::size_t payload_bits = 0;
  std::uint64_t seed = 0;
  /// One serialized FeedbackMessage per channel.
  std::vector<std::vector<std::uint8_t>> messages;
};

// Feedback container: magic "EGCSIFB1", u64 header length, JSON header,
// then per message a u32 byte count followed by the message bytes.

std::vector<std::uint8_t> serialize_feedback_file(const FeedbackFile& f);
FeedbackFile deserialize_feedback_file(std::span<const std::uint8_t> bytes);
void save_feedback_file(const std::filesystem::path& path, const FeedbackFile& f);
FeedbackFile load_feedback_file(const std::filesystem::path& path);

}  // namespace egcsi
