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

#include "egcsi/angular_delay.hpp"
#include "egcsi/bits.hpp"
#include "egcsi/decoupling.hpp"
#include "egcsi/types.hpp"

namespace egcsi {

struct CodebookConfig {
  int oversample_angular = 2;
  int oversample_delay = 2;
  int phase_bits = 2;

  void validate() const;
  bool operator==(const CodebookConfig&) const = default;
};

/// Per-component side information: oversampled peak position and the
/// quantized peak-phase index.
struct AlignmentMetadata {
  int n_star = 0;
  int m_star = 0;
  int beta_index = 0;

  bool operator==(const AlignmentMetadata&) const = default;
};

/// Oversampled DFT codebooks for one (SystemConfig, CodebookConfig) pair.
///
/// Codewords are unnormalized: every entry has unit modulus, so each angular
/// codeword has squared norm n_tx and each delay codeword n_sc. Under the
/// UPA geometry the angular codeword is the Kronecker product of the
/// horizontal and vertical oversampled codewords, with
/// n = n_h * (O_a * upa_vertical) + n_v.
class Codebooks {
public:
  Codebooks(const SystemConfig& sys, const CodebookConfig& cb);

  const SystemConfig& system() const { return sys_; }
  const CodebookConfig& config() const { return cb_; }

  int angular_size() const { return static_cast<int>(angular_.cols()); }
  int delay_size() const { return static_cast<int>(delay_.cols()); }
  /// n_tx x angular_size; column n is codeword n.
  const CMatrix& angular() const { return angular_; }
  /// n_sc x delay_size; column m is codeword m.
  const CMatrix& delay() const { return delay_; }

  int angular_index_bits() const;
  int delay_index_bits() const;
  /// Width of one serialized metadata record (per-dimension fields).
  int metadata_bits() const;
  /// Q_p + ceil(log2(angular_size * delay_size)), the joint-index count.
  int joint_metadata_bits() const;

  void check(const AlignmentMetadata& meta) const;

private:
  SystemConfig sys_;
  CodebookConfig cb_;
  CMatrix angular_;
  CMatrix delay_;
};

/// Codeword n of the angular codebook, entry t = exp(j 2 pi n t / (O_a n_tx)).
CVector angular_codeword(int n, const SystemConfig& sys, const CodebookConfig& cb);
/// Codeword m of the delay codebook, entry k = exp(j 2 pi m k / (O_d n_sc)).
CVector delay_codeword(int m, const SystemConfig& sys, const CodebookConfig& cb);

struct PeakPosition {
  int n_star = 0;
  int m_star = 0;
};

/// Matched-filter scan of a spatial-frequency component. Ties go to the
/// lowest index. Throws ZeroNormError for an all-zero input.
PeakPosition scan_peaks(const CMatrix& p_sf, const Codebooks& books);

struct QuantizedPhase {
  double beta = 0.0;
  int index = 0;
};

/// Nearest level, in circular distance, of {-pi + 2 pi k / 2^bits}.
QuantizedPhase quantize_phase(double angle, int bits);
double phase_level(int index, int bits);

struct AlignedComponent {
  CMatrix entries;
  AlignmentMetadata metadata;
  /// Matched-filter peak value before phase removal (diagnostic).
  cplx peak_value{};
};

/// The masking matrix e^{-j beta} S, S = conj(w_a) w_d^T.
CMatrix phase_adjustment(const AlignmentMetadata& meta, const Codebooks& books);

/// Relocates the component's peak to bin (0, 0) and removes the quantized
/// peak phase. `component_ad` is in the angular-delay domain.
AlignedComponent align(const CMatrix& component_ad, const Transforms& t, const Codebooks& books);
inline AlignedComponent align(const PathComponent& c, const Transforms& t, const Codebooks& books) {
  return align(c.matrix(), t, books);
}

/// Inverse of align: returns the spatial-frequency component.
CMatrix recover(const CMatrix& decoded_aligned, const AlignmentMetadata& meta, const Transforms& t,
                const Codebooks& books);

/// Appends n_star, m_star, beta_index MSB first with per-dimension widths.
void write_metadata(BitString& out, const AlignmentMetadata& meta, const Codebooks& books);
/// Reads one record starting at `pos`; range-checks the indices.
AlignmentMetadata read_metadata(const BitString& in, std::size_t pos, const Codebooks& books);

}  // namespace egcsi
