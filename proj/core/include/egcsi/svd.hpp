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

#include "egcsi/types.hpp"

namespace egcsi {

/// Economy SVD, m = u * diag(singular_values) * v^H.
///
/// For an r x c input with k = min(r, c): u is r x k, v is c x k, both
/// with orthonormal columns, and singular_values is descending. Each pair
/// (u_i, v_i) is phase-normalized so the first entry of u_i with magnitude
/// above 1e-12 is real and nonnegative.
struct SvdResult {
  RVector singular_values;
  CMatrix u;
  CMatrix v;
};

/// One-sided (Hestenes) Jacobi SVD of a complex matrix.
/// Throws NonFiniteError on NaN/Inf input.
SvdResult svd_complex(const CMatrix& m);

}  // namespace egcsi
