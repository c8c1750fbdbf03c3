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
#include "egcsi/angular_delay.hpp"

#include <cmath>
#include <string>

#include "egcsi/errors.hpp"

namespace egcsi {

namespace {

int wrap(int i, int n) {
  const int r = i % n;
  return r < 0 ? r + n : r;
}

// sum_{t=0}^{n-1} exp(j 2 pi t y / n) = exp(j pi y (n-1)/n) D_n(y).
cplx geometric_sum(double y, int n) {
  return std::exp(kJ * (kPi * y * (n - 1) / n)) * dirichlet_kernel(y, n);
}

}  // namespace

CMatrix dft_matrix(int n) {
  if (n < 1) throw ConfigError("dft_matrix: size must be >= 1");
  CMatrix f(n, n);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      // Reduce the exponent modulo n before scaling to keep the angle small.
      const int k = static_cast<int>((static_cast<long long>(r) * c) % n);
      f(r, c) = scale * std::exp(-kJ * (2.0 * kPi * k / n));
    }
  }
  return f;
}

Transforms::Transforms(const SystemConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  f_a_ = dft_matrix(cfg_.n_tx);
  f_d_ = dft_matrix(cfg_.n_sc);
}

void Transforms::check_shape(const CMatrix& x) const {
  if (x.rows() != cfg_.n_tx || x.cols() != cfg_.n_sc) {
    throw DimensionError("expected " + std::to_string(cfg_.n_tx) + "x" + std::to_string(cfg_.n_sc) +
                         " matrix, got " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
  }
}

CMatrix Transforms::forward(const CMatrix& x) const {
  check_shape(x);
  return f_a_ * x * f_d_.adjoint();
}

CMatrix Transforms::inverse(const CMatrix& x) const {
  check_shape(x);
  return f_a_.adjoint() * x * f_d_;
}

AngularDelayMatrix to_angular_delay(const ChannelMatrix& h, const Transforms& t) {
  return {t.forward(h.entries)};
}

ChannelMatrix to_spatial_frequency(const AngularDelayMatrix& ht, const Transforms& t) {
  return {t.inverse(ht.entries), std::nullopt};
}

AngularDelayMatrix to_angular_delay(const ChannelMatrix& h, const SystemConfig& cfg) {
  return to_angular_delay(h, Transforms(cfg));
}

ChannelMatrix to_spatial_frequency(const AngularDelayMatrix& ht, const SystemConfig& cfg) {
  return to_spatial_frequency(ht, Transforms(cfg));
}

LeakageIndices leakage_indices(const PathParams& path, const SystemConfig& cfg) {
  const double pos_a = cfg.n_tx * std::sin(path.aod_rad) / 2.0;
  const double pos_d = cfg.n_sc * cfg.subcarrier_spacing_hz() * path.delay_s;
  LeakageIndices li;
  li.i_a = static_cast<int>(std::floor(pos_a + 0.5));
  li.i_d = static_cast<int>(std::floor(pos_d + 0.5));
  li.r_a = pos_a - li.i_a;
  li.r_d = pos_d - li.i_d;
  return li;
}

double dirichlet_kernel(double x, int n) {
  const double ratio = x / n;
  const double k = std::round(ratio);
  if (std::abs(ratio - k) < 1e-9) {
    // Limit at x = k n: n cos(pi k n) / cos(pi k).
    const auto ki = static_cast<long long>(k);
    const bool negative = ((ki * n) % 2 != 0) != (ki % 2 != 0);
    return negative ? -static_cast<double>(n) : static_cast<double>(n);
  }
  return std::sin(kPi * x) / std::sin(kPi * ratio);
}

cplx single_path_ad_element(const PathParams& path, int m, int n, const SystemConfig& cfg) {
  if (cfg.geometry != ArrayGeometry::ula)
    throw ConfigError("single_path_ad_element: closed form holds for the ULA geometry only");
  if (m < 0 || m >= cfg.n_tx || n < 0 || n >= cfg.n_sc)
    throw DimensionError("single_path_ad_element: index out of range");
  const LeakageIndices li = leakage_indices(path, cfg);
  const double y_a = li.i_a + li.r_a - m;
  const double y_d = li.i_d + li.r_d - n;
  const cplx angular = geometric_sum(y_a, cfg.n_tx);
  // The delay ramp has negative sign, so its sum is the conjugate form.
  const cplx delay = std::conj(geometric_sum(y_d, cfg.n_sc));
  return path.gain * angular * delay / std::sqrt(static_cast<double>(cfg.n_tx) * cfg.n_sc);
}

std::pair<int, int> single_path_peak_bin(const PathParams& path, const SystemConfig& cfg) {
  const LeakageIndices li = leakage_indices(path, cfg);
  return {wrap(li.i_a, cfg.n_tx), wrap(li.i_d, cfg.n_sc)};
}

}  // namespace egcsi
