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

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace egcsi {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kJ{0.0, 1.0};

enum class ArrayGeometry { ula, upa };

/// Antenna / subcarrier layout shared by transmitter and receiver.
///
/// In UPA mode the antenna index is t = h * upa_vertical + v, and
/// upa_horizontal * upa_vertical must equal n_tx.
struct SystemConfig {
  int n_tx = 32;
  int n_sc = 32;
  double carrier_hz = 2.6e9;
  double bandwidth_hz = 10e6;
  ArrayGeometry geometry = ArrayGeometry::ula;
  int upa_horizontal = 8;
  int upa_vertical = 4;

  double subcarrier_spacing_hz() const { return bandwidth_hz / n_sc; }
  /// Width of the unambiguous delay window, 1 / subcarrier spacing.
  double delay_window_s() const { return 1.0 / subcarrier_spacing_hz(); }

  /// Throws ConfigError when an invariant does not hold.
  void validate() const;

  bool operator==(const SystemConfig&) const = default;
};

}  // namespace egcsi
