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
#include <map>
#include <span>
#include <vector>

#include "egcsi/alignment.hpp"
#include "egcsi/angular_delay.hpp"
#include "egcsi/bits.hpp"
#include "egcsi/channel_synth.hpp"
#include "egcsi/codec.hpp"
#include "egcsi/decoupling.hpp"

namespace egcsi {

/// Configuration shared out-of-band by the UE and the BS.
struct PipelineConfig {
  SystemConfig system;
  CodebookConfig codebook;
  DecouplingOptions decoupling;
};

/// Precomputed transforms and codebooks for one PipelineConfig. Immutable
/// after construction and safe to share across threads.
class FeedbackContext {
public:
  explicit FeedbackContext(const PipelineConfig& cfg);

  const PipelineConfig& config() const { return cfg_; }
  const Transforms& transforms() const { return transforms_; }
  const Codebooks& codebooks() const { return codebooks_; }

private:
  PipelineConfig cfg_;
  Transforms transforms_;
  Codebooks codebooks_;
};

struct FeedbackRecord {
  AlignmentMetadata metadata;
  BitString payload;
};

/// Per-channel feedback: one record per decoupled path component.
struct FeedbackMessage {
  std::vector<FeedbackRecord> records;
  /// Serialized width of one metadata record, fixed by the codebooks.
  std::size_t metadata_bits = 0;

  std::size_t r_hat() const { return records.size(); }
  /// q = sum of metadata and payload bits; excludes the R-hat header.
  std::size_t total_bits() const;
};

/// Field widths of the wire format, derived from the shared configuration.
struct MessageLayout {
  int angular_bits = 0;
  int delay_bits = 0;
  int phase_bits = 0;
  std::size_t payload_bits = 0;

  std::size_t metadata_bits() const { return static_cast<std::size_t>(angular_bits + delay_bits + phase_bits); }
  std::size_t record_bits() const { return metadata_bits() + payload_bits; }
};

MessageLayout message_layout(const FeedbackContext& ctx, const Codec& codec);

/// Number of bits in the R-hat header that precedes the records.
inline constexpr int kRHatHeaderBits = 8;

/// Wire format: 8-bit R-hat, then R-hat records of (n_star, m_star,
/// beta_index, codec payload), MSB first, zero-padded to a whole byte.
BitString serialize_bits(const FeedbackMessage& msg, const MessageLayout& layout);
std::vector<std::uint8_t> serialize(const FeedbackMessage& msg, const MessageLayout& layout);
/// Throws MalformedBitstreamError, tagged with the record index where one applies.
FeedbackMessage deserialize(std::span<const std::uint8_t> bytes, const MessageLayout& layout,
                            const Codebooks& books);

struct EncodeResult {
  FeedbackMessage message;
  DecouplingResult decoupling;
  std::vector<AlignedComponent> aligned;
};

/// Angular-delay transform, decoupling, per-component alignment and
/// compression. Throws ZeroNormError for an all-zero channel.
EncodeResult eg_encode_detailed(const ChannelMatrix& h, const FeedbackContext& ctx, const Codec& codec);
FeedbackMessage eg_encode(const ChannelMatrix& h, const FeedbackContext& ctx, const Codec& codec);

/// Sum of the recovered path components. Throws MalformedBitstreamError for
/// an empty message or a record the codec or codebooks reject.
ChannelMatrix eg_decode(const FeedbackMessage& msg, const FeedbackContext& ctx, const Codec& codec);

/// Aligned components of a channel, the training input for EG codecs.
std::vector<AlignedComponent> aligned_components(const ChannelMatrix& h, const FeedbackContext& ctx,
                                                 DecouplingResult* decoupling = nullptr);

/// Floor reported for a perfect reconstruction.
inline constexpr double kNmseFloorDb = -300.0;

/// ||h_hat - h||^2 / ||h||^2. Throws ZeroNormError when ||h|| = 0.
double nmse_ratio(const ChannelMatrix& h_true, const ChannelMatrix& h_hat);
/// 10 log10 of nmse_ratio, floored at kNmseFloorDb.
double nmse_db(const ChannelMatrix& h_true, const ChannelMatrix& h_hat);
/// Ratio to dB with the same floor.
double ratio_to_db(double ratio);
/// Mean of the per-sample ratios, then converted to dB.
double batch_nmse_db(std::span<const double> ratios);

struct ReconstructionReport {
  ChannelMatrix h_hat;
  double nmse_db = 0.0;
  std::size_t r_hat = 0;
  std::size_t bits_used = 0;
  std::vector<double> per_path_energy;
};

ReconstructionReport reconstruct_and_report(const ChannelMatrix& h, const FeedbackContext& ctx, const Codec& codec);

struct OverheadReport {
  double mean_bits = 0.0;
  double mean_r_hat = 0.0;
  /// R-hat value -> number of messages.
  std::map<std::size_t, std::size_t> r_hat_histogram;
};

OverheadReport overhead_report(std::span<const FeedbackMessage> messages);

}  // namespace egcsi
