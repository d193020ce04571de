// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reference computations that share no code path with the library.

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "ccdeg/fockspace.hpp"

namespace oracle {

inline std::vector<int> orbitals(ccdeg::Mask m, int K) {
  std::vector<int> out;
  for (int p = 0; p < K; ++p)
    if ((m >> p) & 1U) out.push_back(p);
  return out;
}

inline int inversion_parity(const std::vector<int>& v) {
  int inv = 0;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (v[i] > v[j]) ++inv;
  return (inv & 1) ? -1 : 1;
}

// Slater-Condon rules with the sign taken from in-place substitution.
inline double slater_condon(const ccdeg::Integrals& ints, ccdeg::Mask bra, ccdeg::Mask ket) {
  const int K = ints.K;
  const auto occ = orbitals(ket, K);
  const auto only_ket = orbitals(ket & ~bra, K);
  const auto only_bra = orbitals(bra & ~ket, K);
  if (only_ket.size() > 2) return 0.0;
  if (only_ket.empty()) {
    double e = 0.0;
    for (std::size_t i = 0; i < occ.size(); ++i) {
      e += ints.h(occ[i], occ[i]);
      for (std::size_t j = i + 1; j < occ.size(); ++j) e += ints.W(occ[i], occ[j], occ[i], occ[j]);
    }
    return e;
  }
  std::vector<int> sub = occ;
  for (std::size_t k = 0; k < only_ket.size(); ++k)
    *std::find(sub.begin(), sub.end(), only_ket[k]) = only_bra[k];
  const int sign = inversion_parity(sub);
  if (only_ket.size() == 1) {
    const int m = only_ket[0], p = only_bra[0];
    double e = ints.h(p, m);
    for (int n : occ)
      if (n != m) e += ints.W(p, n, m, n);
    return sign * e;
  }
  return sign * ints.W(only_bra[0], only_bra[1], only_ket[0], only_ket[1]);
}

inline Eigen::MatrixXd slater_condon_matrix(const ccdeg::Integrals& ints, const ccdeg::DeterminantSpace& sp) {
  const int n = sp.size();
  Eigen::MatrixXd H(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) H(i, j) = slater_condon(ints, sp.det(i).occ, sp.det(j).occ);
  return H;
}

inline double dimer_ground(double U, double t) { return 0.5 * (U - std::sqrt(U * U + 16.0 * t * t)); }

// Sorted eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.
inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a) {
  const int n = static_cast<int>(a.rows());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = 0.5 * (a(q, q) - a(p, p)) / a(p, q);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

}  // namespace oracle
