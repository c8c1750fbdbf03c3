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
#include "egcsi/alignment.hpp"

#include <cmath>
#include <string>

#include "egcsi/errors.hpp"

namespace egcsi {

namespace {

// Entry t of the oversampled codeword exp(j 2 pi index t / size).
CVector oversampled_codeword(int index, int length, int size) {
  CVector w(length);
  for (int t = 0; t < length; ++t) {
    const long long k = (static_cast<long long>(index) * t) % size;
    w(t) = std::exp(kJ * (2.0 * kPi * static_cast<double>(k) / size));
  }
  return w;
}

CVector upa_codeword(int n, const SystemConfig& sys, int oversample) {
  const int size_v = oversample * sys.upa_vertical;
  const CVector h = oversampled_codeword(n / size_v, sys.upa_horizontal, oversample * sys.upa_horizontal);
  const CVector v = oversampled_codeword(n % size_v, sys.upa_vertical, size_v);
  CVector w(sys.n_tx);
  for (int i = 0; i < sys.upa_horizontal; ++i) w.segment(i * sys.upa_vertical, sys.upa_vertical) = h(i) * v;
  return w;
}

int angular_codebook_size(const SystemConfig& sys, const CodebookConfig& cb) {
  if (sys.geometry == ArrayGeometry::upa)
    return cb.oversample_angular * sys.upa_horizontal * cb.oversample_angular * sys.upa_vertical;
  return cb.oversample_angular * sys.n_tx;
}

}  // namespace

void CodebookConfig::validate() const {
  if (oversample_angular < 1 || oversample_delay < 1)
    throw ConfigError("oversampling factors must be >= 1");
  if (phase_bits < 1 || phase_bits > 30) throw ConfigError("phase_bits must lie in [1, 30]");
}

CVector angular_codeword(int n, const SystemConfig& sys, const CodebookConfig& cb) {
  cb.validate();
  const int size = angular_codebook_size(sys, cb);
  if (n < 0 || n >= size) throw ConfigError("angular_codeword: index out of range");
  if (sys.geometry == ArrayGeometry::upa) return upa_codeword(n, sys, cb.oversample_angular);
  return oversampled_codeword(n, sys.n_tx, size);
}

CVector delay_codeword(int m, const SystemConfig& sys, const CodebookConfig& cb) {
  cb.validate();
  const int size = cb.oversample_delay * sys.n_sc;
  if (m < 0 || m >= size) throw ConfigError("delay_codeword: index out of range");
  return oversampled_codeword(m, sys.n_sc, size);
}

Codebooks::Codebooks(const SystemConfig& sys, const CodebookConfig& cb) : sys_(sys), cb_(cb) {
  sys_.validate();
  cb_.validate();
  const int a_size = angular_codebook_size(sys_, cb_);
  const int d_size = cb_.oversample_delay * sys_.n_sc;
  angular_.resize(sys_.n_tx, a_size);
  for (int n = 0; n < a_size; ++n) angular_.col(n) = angular_codeword(n, sys_, cb_);
  delay_.resize(sys_.n_sc, d_size);
  for (int m = 0; m < d_size; ++m) delay_.col(m) = delay_codeword(m, sys_, cb_);
  if (metadata_bits() != joint_metadata_bits()) {
    throw ConfigError("codebook sizes " + std::to_string(a_size) + " and " + std::to_string(d_size) +
                      " give " + std::to_string(metadata_bits()) + " per-field metadata bits but " +
                      std::to_string(joint_metadata_bits()) + " joint bits; use power-of-two sizes");
  }
}

int Codebooks::angular_index_bits() const { return bits_for(static_cast<std::uint64_t>(angular_size())); }
int Codebooks::delay_index_bits() const { return bits_for(static_cast<std::uint64_t>(delay_size())); }

int Codebooks::metadata_bits() const {
  return angular_index_bits() + delay_index_bits() + cb_.phase_bits;
}

int Codebooks::joint_metadata_bits() const {
  return cb_.phase_bits +
         bits_for(static_cast<std::uint64_t>(angular_size()) * static_cast<std::uint64_t>(delay_size()));
}

void Codebooks::check(const AlignmentMetadata& meta) const {
  if (meta.n_star < 0 || meta.n_star >= angular_size())
    throw MalformedBitstreamError("angular peak index out of range");
  if (meta.m_star < 0 || meta.m_star >= delay_size())
    throw MalformedBitstreamError("delay peak index out of range");
  if (meta.beta_index < 0 || meta.beta_index >= (1 << cb_.phase_bits))
    throw MalformedBitstreamError("phase index out of range");
}

PeakPosition scan_peaks(const CMatrix& p_sf, const Codebooks& books) {
  const auto& sys = books.system();
  if (p_sf.rows() != sys.n_tx || p_sf.cols() != sys.n_sc) throw DimensionError("scan_peaks: shape mismatch");
  if (!(p_sf.squaredNorm() > 0.0)) throw ZeroNormError("scan_peaks: zero component");

  const RVector ang = (books.angular().adjoint() * p_sf).rowwise().squaredNorm();
  const RVector del = (p_sf * books.delay()).colwise().squaredNorm().transpose();
  PeakPosition pk;
  for (Eigen::Index n = 1; n < ang.size(); ++n)
    if (ang(n) > ang(pk.n_star)) pk.n_star = static_cast<int>(n);
  for (Eigen::Index m = 1; m < del.size(); ++m)
    if (del(m) > del(pk.m_star)) pk.m_star = static_cast<int>(m);
  return pk;
}

double phase_level(int index, int bits) {
  return -kPi + 2.0 * kPi * index / static_cast<double>(1 << bits);
}

QuantizedPhase quantize_phase(double angle, int bits) {
  if (bits < 1 || bits > 30) throw ConfigError("quantize_phase: bits must lie in [1, 30]");
  const int levels = 1 << bits;
  const double step = 2.0 * kPi / levels;
  // Position relative to the -pi anchor, reduced to [0, 2 pi).
  double rel = std::fmod(angle + kPi, 2.0 * kPi);
  if (rel < 0.0) rel += 2.0 * kPi;
  int k = static_cast<int>(std::floor(rel / step + 0.5));
  if (k >= levels) k -= levels;
  return {phase_level(k, bits), k};
}

CMatrix phase_adjustment(const AlignmentMetadata& meta, const Codebooks& books) {
  books.check(meta);
  const cplx rot = std::exp(-kJ * phase_level(meta.beta_index, books.config().phase_bits));
  return rot * (books.angular().col(meta.n_star).conjugate() * books.delay().col(meta.m_star).transpose());
}

AlignedComponent align(const CMatrix& component_ad, const Transforms& t, const Codebooks& books) {
  const CMatrix p = t.inverse(component_ad);
  if (!(p.squaredNorm() > 0.0)) throw ZeroNormError("align: zero component");
  const PeakPosition pk = scan_peaks(p, books);

  AlignedComponent out;
  out.peak_value = books.angular().col(pk.n_star).dot(p * books.delay().col(pk.m_star));
  const QuantizedPhase q = quantize_phase(std::arg(out.peak_value), books.config().phase_bits);
  out.metadata = {pk.n_star, pk.m_star, q.index};
  out.entries = t.forward(phase_adjustment(out.metadata, books).cwiseProduct(p));
  return out;
}

CMatrix recover(const CMatrix& decoded_aligned, const AlignmentMetadata& meta, const Transforms& t,
                const Codebooks& books) {
  const CMatrix mask = phase_adjustment(meta, books);
  return mask.conjugate().cwiseProduct(t.inverse(decoded_aligned));
}

void write_metadata(BitString& out, const AlignmentMetadata& meta, const Codebooks& books) {
  books.check(meta);
  out.append(static_cast<std::uint64_t>(meta.n_star), books.angular_index_bits());
  out.append(static_cast<std::uint64_t>(meta.m_star), books.delay_index_bits());
  out.append(static_cast<std::uint64_t>(meta.beta_index), books.config().phase_bits);
}

AlignmentMetadata read_metadata(const BitString& in, std::size_t pos, const Codebooks& books) {
  AlignmentMetadata meta;
  meta.n_star = static_cast<int>(in.read(pos, books.angular_index_bits()));
  pos += static_cast<std::size_t>(books.angular_index_bits());
  meta.m_star = static_cast<int>(in.read(pos, books.delay_index_bits()));
  pos += static_cast<std::size_t>(books.delay_index_bits());
  meta.beta_index = static_cast<int>(in.read(pos, books.config().phase_bits));
  books.check(meta);
  return meta;
}

}  // namespace egcsi
