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
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "egcsi/bits.hpp"
#include "egcsi/types.hpp"

namespace egcsi {

enum class CodecKind { passthrough, topk, linear_pca };

std::string to_string(CodecKind kind);
/// Accepts "passthrough", "topk" and "linear_pca". Throws ConfigError otherwise.
CodecKind codec_kind_from_string(const std::string& name);

/// Parameters and learned state of one compressor/decompressor pair.
///
/// Feature layout for an n_tx x n_sc complex matrix: the real parts in
/// row-major order followed by the imaginary parts in row-major order.
///
///  * passthrough: raw float64 features, 64 bits each; diagnostic only.
///  * topk: the codeword_len largest-magnitude entries as
///    (index, re, im), the values quantized on a symmetric range learned
///    from training data (lo/hi hold one entry).
///  * linear_pca: mean plus codeword_len principal directions; each
///    coefficient is clamped to its observed training range and quantized
///    with element_bits bits.
struct CodecSpec {
  CodecKind kind = CodecKind::linear_pca;
  int codeword_len = 8;
  int element_bits = 6;
  int n_tx = 32;
  int n_sc = 32;
  bool trained = false;
  RVector mean;
  RMatrix basis;
  RVector lo;
  RVector hi;

  int feature_dim() const { return 2 * n_tx * n_sc; }
  /// Bits produced per encoded component.
  std::size_t payload_bits() const;
  void validate() const;
};

struct Codeword {
  RVector values;
  BitString bits;
};

RVector to_features(const CMatrix& m);
CMatrix from_features(const RVector& f, int rows, int cols);

/// Mid-rise uniform quantizer: 2^bits cells spanning [lo, hi], inputs
/// clamped to the range, reconstruction at cell centers. When lo == hi the
/// single value lo is reproduced exactly.
std::uint64_t quantize_index(double x, double lo, double hi, int bits);
double dequantize_index(std::uint64_t index, double lo, double hi, int bits);
BitString quantize_uniform(const RVector& x, const RVector& lo, const RVector& hi, int bits);
RVector dequantize_uniform(const BitString& bits, const RVector& lo, const RVector& hi, int element_bits);

/// Fits a codec to training features, one sample per row.
///
/// linear_pca: the principal directions of the centered data (eigenvectors
/// of its scatter matrix, sign-normalized so the largest-magnitude entry of
/// each direction is positive), with quantizer ranges set to the observed
/// coefficient [min, max]. topk: the symmetric value range of the retained
/// entries. passthrough: nothing to learn.
CodecSpec train_codec(CodecKind kind, const RMatrix& features, int codeword_len, int element_bits, int n_tx,
                      int n_sc);

Codeword encode(const CodecSpec& spec, const CMatrix& aligned);
CMatrix decode(const CodecSpec& spec, const BitString& bits);

/// linear_pca projection and reconstruction without quantization.
CMatrix reconstruct_unquantized(const CodecSpec& spec, const CMatrix& aligned);

/// Codec interface consumed by the feedback pipeline. Implementations must
/// be immutable after construction and produce payload_bits() bits per call.
class Codec {
public:
  virtual ~Codec() = default;
  virtual std::string name() const = 0;
  virtual std::size_t payload_bits() const = 0;
  virtual int n_tx() const = 0;
  virtual int n_sc() const = 0;
  virtual BitString encode(const CMatrix& aligned) const = 0;
  virtual CMatrix decode(const BitString& bits) const = 0;
};

/// Codec backed by a CodecSpec (passthrough, topk, linear_pca).
class SpecCodec final : public Codec {
public:
  explicit SpecCodec(CodecSpec spec);

  const CodecSpec& spec() const { return spec_; }
  std::string name() const override { return to_string(spec_.kind); }
  std::size_t payload_bits() const override { return spec_.payload_bits(); }
  int n_tx() const override { return spec_.n_tx; }
  int n_sc() const override { return spec_.n_sc; }
  BitString encode(const CMatrix& aligned) const override;
  CMatrix decode(const BitString& bits) const override;

private:
  CodecSpec spec_;
};

/// Untrained passthrough spec for the given dimensions.
CodecSpec passthrough_spec(int n_tx, int n_sc);

std::vector<std::uint8_t> serialize_codec(const CodecSpec& spec);
CodecSpec deserialize_codec(std::span<const std::uint8_t> bytes);
void save_codec(const std::filesystem::path& path, const CodecSpec& spec);
CodecSpec load_codec(const std::filesystem::path& path);

}  // namespace egcsi
