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
#include <vector>

#include "egcsi/angular_delay.hpp"
#include "egcsi/svd.hpp"
#include "egcsi/types.hpp"

namespace egcsi {

/// Rank-1 term sigma * u * v^H of the angular-delay SVD.
struct PathComponent {
  double sigma = 0.0;
  CVector u;
  CVector v;
  int index = 0;

  CMatrix matrix() const { return sigma * u * v.adjoint(); }
};

struct DecouplingOptions {
  double eta = 0.99;
  /// Ceiling on the number of components. When it binds, the energy
  /// guarantee no longer holds and DecouplingResult::cap_hit is set.
  int max_components = 16;

  void validate() const;
};

struct DecouplingResult {
  std::vector<PathComponent> components;
  double captured_energy_ratio = 0.0;
  double eta = 0.0;
  double total_energy = 0.0;
  bool cap_hit = false;

  std::size_t r_hat() const { return components.size(); }
  /// Sum of the retained component matrices.
  CMatrix reconstruction() const;
};

/// Relative slack on the energy test, absorbing the rounding difference
/// between sum(sigma_i^2) and ||m||_F^2 so that eta = 1 terminates at the
/// numerical rank.
inline constexpr double kEnergySlack = 1e-12;

/// Keeps the smallest number of leading components whose energy reaches
/// eta * ||ht||_F^2. Throws ZeroNormError for an all-zero input.
DecouplingResult decouple(const AngularDelayMatrix& ht, const DecouplingOptions& opts);

}  // namespace egcsi
