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

#include <utility>

#include "egcsi/channel_synth.hpp"
#include "egcsi/types.hpp"

namespace egcsi {

/// CSI in the angular-delay domain, F_a * H * F_d^H.
struct AngularDelayMatrix {
  CMatrix entries;
};

/// Unitary DFT matrix with entries exp(-j 2 pi m n / N) / sqrt(N).
CMatrix dft_matrix(int n);

/// Precomputed DFT pair for one SystemConfig; immutable and shareable.
class Transforms {
public:
  explicit Transforms(const SystemConfig& cfg);

  const SystemConfig& config() const { return cfg_; }
  const CMatrix& angular() const { return f_a_; }
  const CMatrix& delay() const { return f_d_; }

  /// F_a * x * F_d^H.
  CMatrix forward(const CMatrix& x) const;
  /// F_a^H * x * F_d.
  CMatrix inverse(const CMatrix& x) const;

private:
  void check_shape(const CMatrix& x) const;

  SystemConfig cfg_;
  CMatrix f_a_;
  CMatrix f_d_;
};

AngularDelayMatrix to_angular_delay(const ChannelMatrix& h, const Transforms& t);
ChannelMatrix to_spatial_frequency(const AngularDelayMatrix& ht, const Transforms& t);
AngularDelayMatrix to_angular_delay(const ChannelMatrix& h, const SystemConfig& cfg);
ChannelMatrix to_spatial_frequency(const AngularDelayMatrix& ht, const SystemConfig& cfg);

/// Integer peak positions and fractional residues of a single ULA path.
/// Rounding is half-up, so residues lie in [-0.5, 0.5).
struct LeakageIndices {
  int i_a = 0;
  int i_d = 0;
  double r_a = 0.0;
  double r_d = 0.0;
};

LeakageIndices leakage_indices(const PathParams& path, const SystemConfig& cfg);

/// D_N(x) = sin(pi x) / sin(pi x / N), with removable singularities at
/// multiples of N replaced by their limits.
double dirichlet_kernel(double x, int n);

/// Closed-form angular-delay entry (m, n) of a single-path ULA channel.
///
/// Magnitude is |gain| * |D_{n_tx}(i_a + r_a - m) D_{n_sc}(i_d + r_d - n)| /
/// sqrt(n_tx * n_sc); the 1/sqrt factor comes from the unitary transforms.
/// The phase is that of the two finite geometric sums.
cplx single_path_ad_element(const PathParams& path, int m, int n, const SystemConfig& cfg);

/// Angular-delay bin (row, col) holding the peak of a single ULA path,
/// with negative indices wrapped modulo the transform size.
std::pair<int, int> single_path_peak_bin(const PathParams& path, const SystemConfig& cfg);

}  // namespace egcsi
