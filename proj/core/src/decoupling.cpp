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
#include "egcsi/decoupling.hpp"

#include <algorithm>
#include <cmath>

#include "egcsi/errors.hpp"

namespace egcsi {

void DecouplingOptions::validate() const {
  if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("eta must lie in (0, 1]");
  if (max_components < 1 || max_components > 255)
    throw ConfigError("max_components must lie in [1, 255]");
}

CMatrix DecouplingResult::reconstruction() const {
  if (components.empty()) return {};
  CMatrix sum = CMatrix::Zero(components.front().u.size(), components.front().v.size());
  for (const auto& c : components) sum.noalias() += c.sigma * c.u * c.v.adjoint();
  return sum;
}

DecouplingResult decouple(const AngularDelayMatrix& ht, const DecouplingOptions& opts) {
  opts.validate();
  const double total = ht.entries.squaredNorm();
  if (!std::isfinite(total)) throw NonFiniteError("decouple: non-finite input");
  if (!(total > 0.0)) throw ZeroNormError("decouple: zero-norm angular-delay matrix");

  const SvdResult svd = svd_complex(ht.entries);
  const auto rank = static_cast<int>(svd.singular_values.size());
  const double target = opts.eta * total - kEnergySlack * total;

  int r_hat = rank;
  double captured = 0.0;
  for (int r = 0; r < rank; ++r) {
    captured += svd.singular_values(r) * svd.singular_values(r);
    if (captured >= target) {
      r_hat = r + 1;
      break;
    }
  }

  DecouplingResult out;
  out.eta = opts.eta;
  out.total_energy = total;
  if (r_hat > opts.max_components) {
    r_hat = opts.max_components;
    out.cap_hit = true;
  }
  double kept = 0.0;
  out.components.reserve(static_cast<std::size_t>(r_hat));
  for (int i = 0; i < r_hat; ++i) {
    PathComponent c;
    c.sigma = svd.singular_values(i);
    c.u = svd.u.col(i);
    c.v = svd.v.col(i);
    c.index = i;
    kept += c.sigma * c.sigma;
    out.components.push_back(std::move(c));
  }
  out.captured_energy_ratio = kept / total;
  return out;
}

}  // namespace egcsi
