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
#include "egcsi/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "egcsi/errors.hpp"

namespace egcsi {

namespace {

constexpr int kMaxSweeps = 80;
constexpr double kOrthTol = 1e-15;

// Plain complex product, without the inf/nan recovery of operator*.
inline cplx mul(cplx x, cplx y) {
  return {x.real() * y.real() - x.imag() * y.imag(), x.real() * y.imag() + x.imag() * y.real()};
}

// Orthogonalizes the columns of a (tall or square) in place and accumulates
// the applied rotations into v, so that a_in = a_out * v^H.
void hestenes(CMatrix& a, CMatrix& v) {
  const Eigen::Index n = a.cols();
  v = CMatrix::Identity(n, n);
  RVector norms(n);
  for (Eigen::Index k = 0; k < n; ++k) norms(k) = a.col(k).squaredNorm();

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double alpha = norms(i);
        const double beta = norms(j);
        if (alpha == 0.0 || beta == 0.0) continue;
        const cplx gamma = a.col(i).dot(a.col(j));
        const double g = std::abs(gamma);
        if (!(g > kOrthTol * std::sqrt(alpha * beta))) continue;
        rotated = true;

        // Rotate a_j by the phase of gamma so the 2x2 problem is real.
        const cplx phase_conj = std::conj(gamma) / g;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;

        double ni = 0.0, nj = 0.0;
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
          const cplx ai = a(r, i);
          const cplx aj = mul(phase_conj, a(r, j));
          a(r, i) = c * ai - s * aj;
          a(r, j) = s * ai + c * aj;
          ni += std::norm(a(r, i));
          nj += std::norm(a(r, j));
        }
        for (Eigen::Index r = 0; r < n; ++r) {
          const cplx vi = v(r, i);
          const cplx vj = mul(phase_conj, v(r, j));
          v(r, i) = c * vi - s * vj;
          v(r, j) = s * vi + c * vj;
        }
        norms(i) = ni;
        norms(j) = nj;
      }
    }
    if (!rotated) break;
  }
}

// Replaces columns of u flagged in `fill` with unit vectors orthogonal to
// every other column, drawn from the canonical basis by Gram-Schmidt.
void complete_basis(CMatrix& u, const std::vector<bool>& fill) {
  const Eigen::Index rows = u.rows();
  Eigen::Index next_basis = 0;
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    if (!fill[static_cast<std::size_t>(k)]) continue;
    while (next_basis < rows) {
      CVector e = CVector::Zero(rows);
      e(next_basis++) = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index j = 0; j < u.cols(); ++j) {
          if (j == k || (fill[static_cast<std::size_t>(j)] && j > k)) continue;
          e -= u.col(j) * u.col(j).dot(e);
        }
      }
      const double nrm = e.norm();
      if (nrm > 1e-6) {
        u.col(k) = e / nrm;
        break;
      }
    }
  }
}

}  // namespace

SvdResult svd_complex(const CMatrix& m) {
  if (!m.allFinite()) throw NonFiniteError("svd_complex: non-finite input");
  if (m.size() == 0) return {RVector(0), CMatrix(m.rows(), 0), CMatrix(m.cols(), 0)};

  const bool wide = m.rows() < m.cols();
  CMatrix a = wide ? CMatrix(m.adjoint()) : m;
  CMatrix v;
  hestenes(a, v);

  const Eigen::Index k = a.cols();
  RVector sigma(k);
  for (Eigen::Index i = 0; i < k; ++i) sigma(i) = a.col(i).norm();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return sigma(x) > sigma(y); });

  const double sigma_max = sigma(order.front());
  const double tiny = std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(a.rows(), a.cols())) *
                      sigma_max;

  SvdResult out;
  out.singular_values.resize(k);
  CMatrix left(a.rows(), k);
  CMatrix right(k, k);
  std::vector<bool> fill(static_cast<std::size_t>(k), false);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::Index src = order[static_cast<std::size_t>(i)];
    out.singular_values(i) = sigma(src);
    right.col(i) = v.col(src);
    if (sigma(src) > tiny && sigma(src) > 0.0) {
      left.col(i) = a.col(src) / sigma(src);
    } else {
      left.col(i).setZero();
      fill[static_cast<std::size_t>(i)] = true;
    }
  }
  complete_basis(left, fill);

  // For wide input m^H = left * S * right^H, hence m = right * S * left^H.
  out.u = wide ? std::move(right) : std::move(left);
  out.v = wide ? std::move(left) : std::move(right);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index r = 0; r < out.u.rows(); ++r) {
      const double mag = std::abs(out.u(r, i));
      if (mag > 1e-12) {
        const cplx rot = std::conj(out.u(r, i)) / mag;
        out.u.col(i) *= rot;
        out.v.col(i) *= rot;
        break;
      }
    }
  }
  return out;
}

}  // namespace egcsi
