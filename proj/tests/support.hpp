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

// Helpers shared by the unit and acceptance tests.

#include <cmath>
#include <cstdint>

#include "egcsi/angular_delay.hpp"
#include "egcsi/channel_synth.hpp"
#include "egcsi/rng.hpp"
#include "egcsi/types.hpp"

namespace egcsi::testing {

inline CMatrix random_cmatrix(Rng& rng, int rows, int cols) {
  CMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.complex_normal();
  return m;
}

inline double rel_err(const CMatrix& a, const CMatrix& ref) {
  const double d = ref.norm();
  return d > 0.0 ? (a - ref).norm() / d : (a - ref).norm();
}

/// Path whose angular and delay grid positions are i_a + r_a and i_d + r_d.
inline PathParams path_at(double pos_a, double pos_d, const SystemConfig& cfg, cplx gain = 1.0) {
  PathParams p;
  p.gain = gain;
  p.aod_rad = std::asin(2.0 * pos_a / cfg.n_tx);
  p.delay_s = pos_d / (cfg.n_sc * cfg.subcarrier_spacing_hz());
  return p;
}

/// Uniformly random single ULA path inside the valid domain.
inline PathParams random_path(Rng& rng, const SystemConfig& cfg) {
  PathParams p;
  p.gain = rng.complex_normal();
  p.aod_rad = std::asin(rng.uniform(-0.999, 0.999));
  p.delay_s = rng.uniform() * cfg.delay_window_s() * 0.999;
  return p;
}

inline MultipathSet random_multipath(Rng& rng, const SystemConfig& cfg, int paths) {
  MultipathSet s;
  for (int i = 0; i < paths; ++i) s.paths.push_back(random_path(rng, cfg));
  return s;
}

}  // namespace egcsi::testing
