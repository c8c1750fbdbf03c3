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
#include "egcsi/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include <lapacke.h>

#include "binary_io.hpp"
#include "egcsi/errors.hpp"

namespace egcsi {

namespace {

constexpr char kCodecMagic[] = "EGCSICDC";
constexpr std::uint32_t kCodecVersion = 1;

// Indices of the k largest-magnitude entries (ties to the lower index),
// returned in ascending index order.
std::vector<int> top_k_indices(const CMatrix& m, int k) {
  const auto cols = static_cast<int>(m.cols());
  std::vector<int> idx(static_cast<std::size_t>(m.size()));
  std::iota(idx.begin(), idx.end(), 0);
  auto mag = [&](int i) { return std::norm(m(i / cols, i % cols)); };
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return mag(a) > mag(b); });
  idx.resize(static_cast<std::size_t>(k));
  std::sort(idx.begin(), idx.end());
  return idx;
}

void check_shape(const CodecSpec& spec, const CMatrix& m) {
  if (m.rows() != spec.n_tx || m.cols() != spec.n_sc) throw DimensionError("codec: component shape mismatch");
}

void require_trained(const CodecSpec& spec) {
  if (spec.kind != CodecKind::passthrough && !spec.trained)
    throw UntrainedCodecError(to_string(spec.kind) + " codec used before training");
}

// Top `count` eigenpairs of a symmetric matrix (lower triangle referenced),
// in descending eigenvalue order.
void top_eigenpairs(RMatrix& sym, int count, RVector& values, RMatrix& vectors) {
  const auto n = static_cast<lapack_int>(sym.rows());
  const lapack_int il = n - count + 1;
  lapack_int found = 0;
  RVector w(n);
  RMatrix z(n, count);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(count));
  const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, sym.data(), n, 0.0, 0.0, il, n, 0.0,
                                         &found, w.data(), z.data(), n, support.data());
  if (info != 0 || found != count) throw Error("eigensolver failed (info " + std::to_string(info) + ")");
  values.resize(count);
  vectors.resize(n, count);
  for (int i = 0; i < count; ++i) {
    values(i) = w(count - 1 - i);
    vectors.col(i) = z.col(count - 1 - i);
  }
}

}  // namespace

std::string to_string(CodecKind kind) {
  switch (kind) {
    case CodecKind::passthrough:
      return "passthrough";
    case CodecKind::topk:
      return "topk";
    case CodecKind::linear_pca:
      return "linear_pca";
  }
  return "unknown";
}

CodecKind codec_kind_from_string(const std::string& name) {
  if (name == "passthrough") return CodecKind::passthrough;
  if (name == "topk") return CodecKind::topk;
  if (name == "linear_pca") return CodecKind::linear_pca;
  throw ConfigError("unknown codec kind: " + name);
}

std::size_t CodecSpec::payload_bits() const {
  const auto m = static_cast<std::size_t>(codeword_len);
  const auto q = static_cast<std::size_t>(element_bits);
  switch (kind) {
    case CodecKind::passthrough:
      return 64 * static_cast<std::size_t>(feature_dim());
    case CodecKind::topk:
      return m * (static_cast<std::size_t>(bits_for(static_cast<std::uint64_t>(n_tx) * n_sc)) + 2 * q);
    case CodecKind::linear_pca:
      return m * q;
  }
  return 0;
}

void CodecSpec::validate() const {
  if (n_tx < 1 || n_sc < 1) throw ConfigError("codec: dimensions must be >= 1");
  if (kind == CodecKind::passthrough) return;
  if (element_bits < 1 || element_bits > 30) throw ConfigError("codec: element_bits must lie in [1, 30]");
  if (codeword_len < 1) throw ConfigError("codec: codeword_len must be >= 1");
  if (kind == CodecKind::topk && codeword_len > n_tx * n_sc)
    throw ConfigError("codec: topk codeword_len exceeds the number of entries");
  if (kind == CodecKind::linear_pca && codeword_len > feature_dim())
    throw ConfigError("codec: codeword_len exceeds the feature dimension");
  if (!trained) return;
  const Eigen::Index ranges = kind == CodecKind::topk ? 1 : codeword_len;
  if (lo.size() != ranges || hi.size() != ranges) throw FormatError("codec: quantizer range size mismatch");
  if ((hi.array() < lo.array()).any()) throw FormatError("codec: quantizer range inverted");
  if (kind == CodecKind::linear_pca &&
      (mean.size() != feature_dim() || basis.rows() != feature_dim() || basis.cols() != codeword_len))
    throw FormatError("codec: learned state has the wrong shape");
}

RVector to_features(const CMatrix& m) {
  const Eigen::Index n = m.size();
  RVector f(2 * n);
  Eigen::Index i = 0;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c, ++i) {
      f(i) = m(r, c).real();
      f(n + i) = m(r, c).imag();
    }
  return f;
}

CMatrix from_features(const RVector& f, int rows, int cols) {
  const Eigen::Index n = static_cast<Eigen::Index>(rows) * cols;
  if (f.size() != 2 * n) throw DimensionError("from_features: feature length mismatch");
  CMatrix m(rows, cols);
  Eigen::Index i = 0;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c, ++i) m(r, c) = {f(i), f(n + i)};
  return m;
}

std::uint64_t quantize_index(double x, double lo, double hi, int bits) {
  if (!(hi > lo)) return 0;
  const std::uint64_t levels = std::uint64_t{1} << bits;
  const double step = (hi - lo) / static_cast<double>(levels);
  const double cell = std::floor((std::clamp(x, lo, hi) - lo) / step);
  if (!(cell > 0.0)) return 0;
  return std::min(static_cast<std::uint64_t>(cell), levels - 1);
}

double dequantize_index(std::uint64_t index, double lo, double hi, int bits) {
  if (!(hi > lo)) return lo;
  const double step = (hi - lo) / static_cast<double>(std::uint64_t{1} << bits);
  return lo + (static_cast<double>(index) + 0.5) * step;
}

BitString quantize_uniform(const RVector& x, const RVector& lo, const RVector& hi, int bits) {
  if (lo.size() != x.size() || hi.size() != x.size()) throw DimensionError("quantize_uniform: range size mismatch");
  BitString out;
  for (Eigen::Index i = 0; i < x.size(); ++i) out.append(quantize_index(x(i), lo(i), hi(i), bits), bits);
  return out;
}

RVector dequantize_uniform(const BitString& bits, const RVector& lo, const RVector& hi, int element_bits) {
  if (lo.size() != hi.size()) throw DimensionError("dequantize_uniform: range size mismatch");
  if (bits.size() != static_cast<std::size_t>(lo.size()) * static_cast<std::size_t>(element_bits))
    throw MalformedBitstreamError("codeword length does not match M * Q_f");
  RVector out(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    const auto idx = bits.read(static_cast<std::size_t>(i) * static_cast<std::size_t>(element_bits), element_bits);
    out(i) = dequantize_index(idx, lo(i), hi(i), element_bits);
  }
  return out;
}

CodecSpec passthrough_spec(int n_tx, int n_sc) {
  CodecSpec spec;
  spec.kind = CodecKind::passthrough;
  spec.codeword_len = 2 * n_tx * n_sc;
  spec.element_bits = 64;
  spec.n_tx = n_tx;
  spec.n_sc = n_sc;
  spec.trained = true;
  return spec;
}

CodecSpec train_codec(CodecKind kind, const RMatrix& features, int codeword_len, int element_bits, int n_tx,
                      int n_sc) {
  if (kind == CodecKind::passthrough) return passthrough_spec(n_tx, n_sc);

  CodecSpec spec;
  spec.kind = kind;
  spec.codeword_len = codeword_len;
  spec.element_bits = element_bits;
  spec.n_tx = n_tx;
  spec.n_sc = n_sc;
  spec.validate();
  if (features.rows() == 0) throw ConfigError("train_codec: empty training set");
  if (features.cols() != spec.feature_dim()) throw DimensionError("train_codec: feature dimension mismatch");
  if (!features.allFinite()) throw NonFiniteError("train_codec: non-finite training data");

  if (kind == CodecKind::topk) {
    double amp = 0.0;
    for (Eigen::Index s = 0; s < features.rows(); ++s) {
      const CMatrix m = from_features(features.row(s).transpose(), n_tx, n_sc);
      const auto cols = static_cast<int>(m.cols());
      for (int i : top_k_indices(m, codeword_len)) {
        const cplx v = m(i / cols, i % cols);
        amp = std::max({amp, std::abs(v.real()), std::abs(v.imag())});
      }
    }
    spec.lo = RVector::Constant(1, -amp);
    spec.hi = RVector::Constant(1, amp);
    spec.trained = true;
    return spec;
  }

  // linear_pca
  spec.mean = features.colwise().mean().transpose();
  const RMatrix centered = features.rowwise() - spec.mean.transpose();
  RMatrix scatter = RMatrix::Zero(spec.feature_dim(), spec.feature_dim());
  scatter.selfadjointView<Eigen::Lower>().rankUpdate(centered.transpose());
  RVector eigenvalues;
  top_eigenpairs(scatter, codeword_len, eigenvalues, spec.basis);

  for (int i = 0; i < codeword_len; ++i) {
    Eigen::Index arg = 0;
    spec.basis.col(i).cwiseAbs().maxCoeff(&arg);
    if (spec.basis(arg, i) < 0.0) spec.basis.col(i) *= -1.0;
  }

  const RMatrix coeffs = centered * spec.basis;
  spec.lo = coeffs.colwise().minCoeff().transpose();
  spec.hi = coeffs.colwise().maxCoeff().transpose();
  spec.trained = true;
  return spec;
}

Codeword encode(const CodecSpec& spec, const CMatrix& aligned) {
  spec.validate();
  require_trained(spec);
  check_shape(spec, aligned);
  Codeword cw;
  switch (spec.kind) {
    case CodecKind::passthrough: {
      cw.values = to_features(aligned);
      for (Eigen::Index i = 0; i < cw.values.size(); ++i) cw.bits.append(std::bit_cast<std::uint64_t>(cw.values(i)), 64);
      break;
    }
    case CodecKind::topk: {
      const auto cols = static_cast<int>(aligned.cols());
      const int index_bits = bits_for(static_cast<std::uint64_t>(spec.n_tx) * spec.n_sc);
      const auto idx = top_k_indices(aligned, spec.codeword_len);
      cw.values.resize(3 * spec.codeword_len);
      for (std::size_t j = 0; j < idx.size(); ++j) {
        const cplx v = aligned(idx[j] / cols, idx[j] % cols);
        cw.values.segment(3 * static_cast<Eigen::Index>(j), 3) << idx[j], v.real(), v.imag();
        cw.bits.append(static_cast<std::uint64_t>(idx[j]), index_bits);
        cw.bits.append(quantize_index(v.real(), spec.lo(0), spec.hi(0), spec.element_bits), spec.element_bits);
        cw.bits.append(quantize_index(v.imag(), spec.lo(0), spec.hi(0), spec.element_bits), spec.element_bits);
      }
      break;
    }
    case CodecKind::linear_pca: {
      cw.values = spec.basis.transpose() * (to_features(aligned) - spec.mean);
      cw.bits = quantize_uniform(cw.values, spec.lo, spec.hi, spec.element_bits);
      break;
    }
  }
  return cw;
}

CMatrix decode(const CodecSpec& spec, const BitString& bits) {
  spec.validate();
  require_trained(spec);
  if (bits.size() != spec.payload_bits())
    throw MalformedBitstreamError("codec payload has " + std::to_string(bits.size()) + " bits, expected " +
                                  std::to_string(spec.payload_bits()));
  switch (spec.kind) {
    case CodecKind::passthrough: {
      RVector f(spec.feature_dim());
      for (Eigen::Index i = 0; i < f.size(); ++i) f(i) = std::bit_cast<double>(bits.read(64 * static_cast<std::size_t>(i), 64));
      return from_features(f, spec.n_tx, spec.n_sc);
    }
    case CodecKind::topk: {
      const int index_bits = bits_for(static_cast<std::uint64_t>(spec.n_tx) * spec.n_sc);
      const std::size_t stride = static_cast<std::size_t>(index_bits) + 2 * static_cast<std::size_t>(spec.element_bits);
      CMatrix m = CMatrix::Zero(spec.n_tx, spec.n_sc);
      for (int j = 0; j < spec.codeword_len; ++j) {
        std::size_t pos = static_cast<std::size_t>(j) * stride;
        const auto idx = bits.read(pos, index_bits);
        if (idx >= static_cast<std::uint64_t>(spec.n_tx) * spec.n_sc)
          throw MalformedBitstreamError("topk entry index out of range");
        pos += static_cast<std::size_t>(index_bits);
        const double re = dequantize_index(bits.read(pos, spec.element_bits), spec.lo(0), spec.hi(0), spec.element_bits);
        pos += static_cast<std::size_t>(spec.element_bits);
        const double im = dequantize_index(bits.read(pos, spec.element_bits), spec.lo(0), spec.hi(0), spec.element_bits);
        const auto i = static_cast<int>(idx);
        m(i / spec.n_sc, i % spec.n_sc) = {re, im};
      }
      return m;
    }
    case CodecKind::linear_pca: {
      const RVector c = dequantize_uniform(bits, spec.lo, spec.hi, spec.element_bits);
      return from_features(spec.mean + spec.basis * c, spec.n_tx, spec.n_sc);
    }
  }
  return {};
}

CMatrix reconstruct_unquantized(const CodecSpec& spec, const CMatrix& aligned) {
  if (spec.kind != CodecKind::linear_pca) throw ConfigError("reconstruct_unquantized: linear_pca only");
  require_trained(spec);
  check_shape(spec, aligned);
  const RVector c = spec.basis.transpose() * (to_features(aligned) - spec.mean);
  return from_features(spec.mean + spec.basis * c, spec.n_tx, spec.n_sc);
}

SpecCodec::SpecCodec(CodecSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  require_trained(spec_);
}

BitString SpecCodec::encode(const CMatrix& aligned) const { return egcsi::encode(spec_, aligned).bits; }

CMatrix SpecCodec::decode(const BitString& bits) const { return egcsi::decode(spec_, bits); }

std::vector<std::uint8_t> serialize_codec(const CodecSpec& spec) {
  spec.validate();
  detail::ByteWriter w;
  w.put_string(std::string(kCodecMagic, 8));
  w.put_u32(kCodecVersion);
  w.put_u32(static_cast<std::uint32_t>(spec.kind));
  w.put_u32(static_cast<std::uint32_t>(spec.codeword_len));
  w.put_u32(static_cast<std::uint32_t>(spec.element_bits));
  w.put_u32(static_cast<std::uint32_t>(spec.n_tx));
  w.put_u32(static_cast<std::uint32_t>(spec.n_sc));
  w.put_u32(static_cast<std::uint32_t>(spec.feature_dim()));
  w.put_u32(spec.trained ? 1U : 0U);
  w.put_u32(static_cast<std::uint32_t>(spec.mean.size()));
  w.put_u32(static_cast<std::uint32_t>(spec.basis.rows()));
  w.put_u32(static_cast<std::uint32_t>(spec.basis.cols()));
  w.put_u32(static_cast<std::uint32_t>(spec.lo.size()));
  for (Eigen::Index i = 0; i < spec.mean.size(); ++i) w.put_f64(spec.mean(i));
  for (Eigen::Index c = 0; c < spec.basis.cols(); ++c)
    for (Eigen::Index r = 0; r < spec.basis.rows(); ++r) w.put_f64(spec.basis(r, c));
  for (Eigen::Index i = 0; i < spec.lo.size(); ++i) w.put_f64(spec.lo(i));
  for (Eigen::Index i = 0; i < spec.hi.size(); ++i) w.put_f64(spec.hi(i));
  return std::move(w.bytes());
}

CodecSpec deserialize_codec(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  if (r.get_string(8) != std::string(kCodecMagic, 8)) throw FormatError("not a codec file (bad magic)");
  if (r.get_u32() != kCodecVersion) throw FormatError("unsupported codec file version");
  CodecSpec spec;
  const std::uint32_t kind = r.get_u32();
  if (kind > static_cast<std::uint32_t>(CodecKind::linear_pca)) throw FormatError("unknown codec kind");
  spec.kind = static_cast<CodecKind>(kind);
  spec.codeword_len = static_cast<int>(r.get_u32());
  spec.element_bits = static_cast<int>(r.get_u32());
  spec.n_tx = static_cast<int>(r.get_u32());
  spec.n_sc = static_cast<int>(r.get_u32());
  if (static_cast<int>(r.get_u32()) != spec.feature_dim()) throw FormatError("codec feature dimension mismatch");
  spec.trained = r.get_u32() != 0;
  const auto n_mean = r.get_u32();
  const auto b_rows = r.get_u32();
  const auto b_cols = r.get_u32();
  const auto n_range = r.get_u32();
  const std::size_t doubles = std::size_t{n_mean} + std::size_t{b_rows} * b_cols + 2 * std::size_t{n_range};
  if (r.remaining() != 8 * doubles) throw FormatError("codec body size does not match header");
  spec.mean.resize(n_mean);
  for (Eigen::Index i = 0; i < spec.mean.size(); ++i) spec.mean(i) = r.get_f64();
  spec.basis.resize(b_rows, b_cols);
  for (Eigen::Index c = 0; c < spec.basis.cols(); ++c)
    for (Eigen::Index row = 0; row < spec.basis.rows(); ++row) spec.basis(row, c) = r.get_f64();
  spec.lo.resize(n_range);
  spec.hi.resize(n_range);
  for (Eigen::Index i = 0; i < spec.lo.size(); ++i) spec.lo(i) = r.get_f64();
  for (Eigen::Index i = 0; i < spec.hi.size(); ++i) spec.hi(i) = r.get_f64();
  spec.validate();
  return spec;
}

void save_codec(const std::filesystem::path& path, const CodecSpec& spec) {
  const auto bytes = serialize_codec(spec);
  detail::write_file_atomic(path, bytes);
}

CodecSpec load_codec(const std::filesystem::path& path) { return deserialize_codec(detail::read_file(path)); }

}  // namespace egcsi
