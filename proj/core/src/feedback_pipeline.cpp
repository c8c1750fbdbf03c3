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
#include "egcsi/feedback_pipeline.hpp"

#include <cmath>
#include <string>

#include "egcsi/errors.hpp"

namespace egcsi {

FeedbackContext::FeedbackContext(const PipelineConfig& cfg)
    : cfg_(cfg), transforms_(cfg.system), codebooks_(cfg.system, cfg.codebook) {
  cfg_.decoupling.validate();
}

std::size_t FeedbackMessage::total_bits() const {
  std::size_t q = 0;
  for (const auto& r : records) q += metadata_bits + r.payload.size();
  return q;
}

MessageLayout message_layout(const FeedbackContext& ctx, const Codec& codec) {
  const auto& sys = ctx.config().system;
  if (codec.n_tx() != sys.n_tx || codec.n_sc() != sys.n_sc)
    throw DimensionError("codec dimensions do not match the system configuration");
  MessageLayout l;
  l.angular_bits = ctx.codebooks().angular_index_bits();
  l.delay_bits = ctx.codebooks().delay_index_bits();
  l.phase_bits = ctx.codebooks().config().phase_bits;
  l.payload_bits = codec.payload_bits();
  return l;
}

BitString serialize_bits(const FeedbackMessage& msg, const MessageLayout& layout) {
  if (msg.records.empty()) throw MalformedBitstreamError("message has no records");
  if (msg.records.size() >= (std::size_t{1} << kRHatHeaderBits))
    throw MalformedBitstreamError("R-hat does not fit the header");
  BitString out;
  out.append(msg.records.size(), kRHatHeaderBits);
  for (std::size_t i = 0; i < msg.records.size(); ++i) {
    const auto& r = msg.records[i];
    const auto idx = static_cast<std::ptrdiff_t>(i);
    if (r.payload.size() != layout.payload_bits)
      throw MalformedBitstreamError("payload length does not match the codec", idx);
    if (r.metadata.n_star < 0 || r.metadata.n_star >= (1 << layout.angular_bits) || r.metadata.m_star < 0 ||
        r.metadata.m_star >= (1 << layout.delay_bits) || r.metadata.beta_index < 0 ||
        r.metadata.beta_index >= (1 << layout.phase_bits))
      throw MalformedBitstreamError("metadata does not fit its field widths", idx);
    out.append(static_cast<std::uint64_t>(r.metadata.n_star), layout.angular_bits);
    out.append(static_cast<std::uint64_t>(r.metadata.m_star), layout.delay_bits);
    out.append(static_cast<std::uint64_t>(r.metadata.beta_index), layout.phase_bits);
    out.append(r.payload);
  }
  return out;
}

std::vector<std::uint8_t> serialize(const FeedbackMessage& msg, const MessageLayout& layout) {
  return serialize_bits(msg, layout).to_bytes();
}

FeedbackMessage deserialize(std::span<const std::uint8_t> bytes, const MessageLayout& layout,
                            const Codebooks& books) {
  if (bytes.empty()) throw MalformedBitstreamError("empty message");
  const std::size_t r_hat = bytes[0];
  if (r_hat == 0) throw MalformedBitstreamError("R-hat of zero is not allowed");
  const std::size_t bit_count = kRHatHeaderBits + r_hat * layout.record_bits();
  const std::size_t expected_bytes = (bit_count + 7) / 8;
  if (bytes.size() != expected_bytes)
    throw MalformedBitstreamError("message is " + std::to_string(bytes.size()) + " bytes, expected " +
                                  std::to_string(expected_bytes) + " for R-hat " + std::to_string(r_hat));
  const BitString bits = BitString::from_bytes(bytes, bytes.size() * 8);
  for (std::size_t i = bit_count; i < bits.size(); ++i)
    if (bits[i]) throw MalformedBitstreamError("nonzero padding bits");

  FeedbackMessage msg;
  msg.metadata_bits = layout.metadata_bits();
  msg.records.reserve(r_hat);
  std::size_t pos = kRHatHeaderBits;
  for (std::size_t i = 0; i < r_hat; ++i) {
    FeedbackRecord rec;
    try {
      rec.metadata = read_metadata(bits, pos, books);
    } catch (const MalformedBitstreamError& e) {
      throw MalformedBitstreamError(e.what(), static_cast<std::ptrdiff_t>(i));
    }
    pos += layout.metadata_bits();
    rec.payload = bits.slice(pos, layout.payload_bits);
    pos += layout.payload_bits;
    msg.records.push_back(std::move(rec));
  }
  return msg;
}

std::vector<AlignedComponent> aligned_components(const ChannelMatrix& h, const FeedbackContext& ctx,
                                                 DecouplingResult* decoupling) {
  if (!(h.entries.squaredNorm() > 0.0)) throw ZeroNormError("zero channel cannot be fed back");
  const AngularDelayMatrix ht = to_angular_delay(h, ctx.transforms());
  DecouplingResult dec = decouple(ht, ctx.config().decoupling);
  std::vector<AlignedComponent> out;
  out.reserve(dec.components.size());
  for (const auto& c : dec.components) out.push_back(align(c, ctx.transforms(), ctx.codebooks()));
  if (decoupling) *decoupling = std::move(dec);
  return out;
}

EncodeResult eg_encode_detailed(const ChannelMatrix& h, const FeedbackContext& ctx, const Codec& codec) {
  const MessageLayout layout = message_layout(ctx, codec);
  EncodeResult res;
  res.aligned = aligned_components(h, ctx, &res.decoupling);
  res.message.metadata_bits = layout.metadata_bits();
  res.message.records.reserve(res.aligned.size());
  for (const auto& a : res.aligned) res.message.records.push_back({a.metadata, codec.encode(a.entries)});
  return res;
}

FeedbackMessage eg_encode(const ChannelMatrix& h, const FeedbackContext& ctx, const Codec& codec) {
  return eg_encode_detailed(h, ctx, codec).message;
}

ChannelMatrix eg_decode(const FeedbackMessage& msg, const FeedbackContext& ctx, const Codec& codec) {
  if (msg.records.empty()) throw MalformedBitstreamError("message has no records");
  const auto& sys = ctx.config().system;
  ChannelMatrix h;
  h.entries = CMatrix::Zero(sys.n_tx, sys.n_sc);
  for (std::size_t i = 0; i < msg.records.size(); ++i) {
    const auto& rec = msg.records[i];
    try {
      const CMatrix aligned = codec.decode(rec.payload);
      h.entries += recover(aligned, rec.metadata, ctx.transforms(), ctx.codebooks());
    } catch (const MalformedBitstreamError& e) {
      throw MalformedBitstreamError(e.what(), static_cast<std::ptrdiff_t>(i));
    }
  }
  return h;
}

double nmse_ratio(const ChannelMatrix& h_true, const ChannelMatrix& h_hat) {
  const double denom = h_true.entries.squaredNorm();
  if (!(denom > 0.0)) throw ZeroNormError("nmse: zero-norm reference channel");
  if (h_hat.entries.rows() != h_true.entries.rows() || h_hat.entries.cols() != h_true.entries.cols())
    throw DimensionError("nmse: shape mismatch");
  return (h_hat.entries - h_true.entries).squaredNorm() / denom;
}

double ratio_to_db(double ratio) {
  if (!(ratio > 0.0)) return kNmseFloorDb;
  return std::max(kNmseFloorDb, 10.0 * std::log10(ratio));
}

double nmse_db(const ChannelMatrix& h_true, const ChannelMatrix& h_hat) {
  return ratio_to_db(nmse_ratio(h_true, h_hat));
}

double batch_nmse_db(std::span<const double> ratios) {
  if (ratios.empty()) throw ConfigError("batch_nmse_db: empty batch");
  double sum = 0.0;
  for (double r : ratios) sum += r;
  return ratio_to_db(sum / static_cast<double>(ratios.size()));
}

ReconstructionReport reconstruct_and_report(const ChannelMatrix& h, const FeedbackContext& ctx, const Codec& codec) {
  const MessageLayout layout = message_layout(ctx, codec);
  const EncodeResult enc = eg_encode_detailed(h, ctx, codec);
  const auto wire = serialize(enc.message, layout);
  const FeedbackMessage received = deserialize(wire, layout, ctx.codebooks());

  ReconstructionReport rep;
  rep.h_hat = eg_decode(received, ctx, codec);
  rep.nmse_db = nmse_db(h, rep.h_hat);
  rep.r_hat = received.r_hat();
  rep.bits_used = received.total_bits();
  for (const auto& c : enc.decoupling.components) rep.per_path_energy.push_back(c.sigma * c.sigma);
  return rep;
}

OverheadReport overhead_report(std::span<const FeedbackMessage> messages) {
  if (messages.empty()) throw ConfigError("overhead_report: empty batch");
  OverheadReport rep;
  double bits = 0.0;
  double r = 0.0;
  for (const auto& m : messages) {
    bits += static_cast<double>(m.total_bits());
    r += static_cast<double>(m.r_hat());
    ++rep.r_hat_histogram[m.r_hat()];
  }
  rep.mean_bits = bits / static_cast<double>(messages.size());
  rep.mean_r_hat = r / static_cast<double>(messages.size());
  return rep;
}

}  // namespace egcsi
