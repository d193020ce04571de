// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ccdeg/types.hpp"

namespace ccdeg {

// Orbital indices are 0-based throughout the C++ API. Files and JSON use
// 1-based indices.
using Mask = std::uint64_t;

inline constexpr int kDefaultMaxOrbitals = 24;

struct OrbitalBasis {
  int K = 0;
  int N = 0;

  OrbitalBasis() = default;
  OrbitalBasis(int k, int n, int max_orbitals = kDefaultMaxOrbitals);

  Mask reference() const { return (Mask{1} << N) - 1; }
};

struct Determinant {
  Mask occ = 0;

  bool occupied(int p) const { return (occ >> p) & 1U; }
  int count() const;
  friend bool operator==(Determinant a, Determinant b) { return a.occ == b.occ; }
};

struct SignedDet {
  int sign = 1;
  Determinant det;
};

enum class LadderKind { create, annihilate };

// Phase is (-1)^(occupied orbitals strictly below p).
std::optional<SignedDet> apply_ladder(int p, LadderKind kind, Determinant d);

// X = a+_{A1} a_{I1} ... a+_{Ar} a_{Ir}, applied right to left.
struct Excitation {
  std::vector<int> occ;
  std::vector<int> virt;

  int rank() const { return static_cast<int>(occ.size()); }
  friend bool operator==(const Excitation&, const Excitation&) = default;
};

std::optional<SignedDet> apply_excitation(const Excitation& x, Determinant d);

// Target determinant of x applied to the reference, ignoring the sign.
Mask excited_mask(const Excitation& x, Mask reference);

// Lexicographic (by mask value) list of all N-particle determinants.
class DeterminantSpace {
 public:
  explicit DeterminantSpace(const OrbitalBasis& basis);

  const OrbitalBasis& basis() const { return basis_; }
  int size() const { return static_cast<int>(dets_.size()); }
  Determinant det(int i) const { return Determinant{dets_[i]}; }
  // -1 when the mask is not in the sector.
  int index(Mask m) const;

 private:
  OrbitalBasis basis_;
  std::vector<Mask> dets_;
  std::unordered_map<Mask, int> lookup_;
};

// h_pq and the antisymmetrized W_pq,rs. Two-body part of H is
// sum_{p<q, r<s} W_pq,rs a+_p a+_q a_s a_r, so <pq|H|rs> = W_pq,rs.
struct Integrals {
  int K = 0;
  Eigen::MatrixXd h;
  std::vector<double> w;

  Integrals() = default;
  explicit Integrals(int k);

  double W(int p, int q, int r, int s) const { return w[idx(p, q, r, s)]; }
  // Writes all four antisymmetric partners of (pq|rs).
  void set_antisym(int p, int q, int r, int s, double v);
  // As set_antisym, plus the Hermitian partner (rs|pq).
  void set_pair(int p, int q, int r, int s, double v);

  std::size_t idx(int p, int q, int r, int s) const {
    return ((static_cast<std::size_t>(p) * K + q) * K + r) * K + s;
  }
};

// Matrix of H in the ordered determinant basis. Full sector unless a
// block is extracted explicitly.
using DenseOperator = Eigen::MatrixXd;

DenseOperator hamiltonian_matrix(const Integrals& ints, const DeterminantSpace& space);

// Matrix of a+_p a_q on the sector (used for CAR checks).
Eigen::MatrixXd hopping_matrix(int p, int q, const DeterminantSpace& space);

struct FciResult {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

FciResult fci_solve(const DenseOperator& H);

// Largest |A - A^T| relative to the largest |A|.
double hermiticity_error(const Eigen::MatrixXd& a);

}  // namespace ccdeg
