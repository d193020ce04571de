// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ccdeg/fockspace.hpp"

namespace ccdeg {

struct TruncationScheme {
  enum class Kind { ranks, full, doubles_only };

  Kind kind = Kind::full;
  std::vector<int> ranks;  // sorted, only for Kind::ranks

  static TruncationScheme full() { return {}; }
  static TruncationScheme doubles_only() { return {Kind::doubles_only, {}}; }
  static TruncationScheme up_to(int rho);
  static TruncationScheme of_ranks(std::vector<int> r);
  // "full", "doubles", "sd", "sdt", "ranks:1,2,..."
  static TruncationScheme parse(const std::string& text);

  bool includes(int rank, int N) const;
  std::string name() const;
};

enum class NormKind { ell2, fock };

class AmplitudeSpace {
 public:
  struct Move {
    int from;
    int to;
    int sign;
  };

  AmplitudeSpace(const OrbitalBasis& basis, const TruncationScheme& scheme);
  AmplitudeSpace(std::shared_ptr<const DeterminantSpace> sector, const TruncationScheme& scheme);

  int dim() const { return static_cast<int>(excitations_.size()); }
  const Excitation& excitation(int a) const { return excitations_[a]; }
  const std::vector<Excitation>& excitations() const { return excitations_; }
  int rank(int a) const { return excitations_[a].rank(); }
  int index_of(const Excitation& x) const;

  bool rank_regular() const { return rank_regular_; }
  bool excitation_complete() const { return excitation_complete_; }
  bool is_full() const;

  const OrbitalBasis& basis() const { return sector_->basis(); }
  const TruncationScheme& scheme() const { return scheme_; }
  const DeterminantSpace& sector() const { return *sector_; }
  std::shared_ptr<const DeterminantSpace> sector_ptr() const { return sector_; }

  // X_a Phi0 = phase(a) * e_{det_index(a)}
  int det_index(int a) const { return det_index_[a]; }
  int phase(int a) const { return phase_[a]; }
  // Nonzero matrix elements of X_a on the sector.
  const std::vector<Move>& action(int a) const { return action_[a]; }

 private:
  std::shared_ptr<const DeterminantSpace> sector_;
  TruncationScheme scheme_;
  std::vector<Excitation> excitations_;
  std::map<std::pair<std::vector<int>, std::vector<int>>, int> lookup_;
  std::vector<int> det_index_;
  std::vector<int> phase_;
  std::vector<std::vector<Move>> action_;
  bool rank_regular_ = true;
  bool excitation_complete_ = true;
};

// (sum_a t_a X_a) v
template <class S>
Vec<S> cluster_apply(const AmplitudeSpace& sp, const Vec<S>& t, const Vec<S>& v);
// (sum_a t_a X_a)^dagger v, built from de-excitations
template <class S>
Vec<S> cluster_adjoint_apply(const AmplitudeSpace& sp, const Vec<S>& t, const Vec<S>& v);
template <class S>
Mat<S> cluster_matrix(const AmplitudeSpace& sp, const Vec<S>& t);
template <class S>
Vec<S> exp_apply(const AmplitudeSpace& sp, const Vec<S>& t, const Vec<S>& v);
template <class S>
Mat<S> exp_matrix(const AmplitudeSpace& sp, const Vec<S>& t);
template <class S>
Vec<S> cluster_log(const AmplitudeSpace& full, const Vec<S>& c);

template <class S>
Vec<S> reference_vector(const AmplitudeSpace& sp) {
  Vec<S> v = Vec<S>::Zero(sp.sector().size());
  v(0) = S(1);
  return v;
}

// C Phi0 for C = sum_a c_a X_a.
template <class S>
Vec<S> sector_vector(const AmplitudeSpace& sp, const Vec<S>& c);
// Components <w, X_a Phi0> (bilinear, no conjugation).
template <class S>
Vec<S> components(const AmplitudeSpace& sp, const Vec<S>& w);
// Coefficients c_a of psi / <psi, Phi0> - Phi0.
template <class S>
Vec<S> intermediate_coefficients(const AmplitudeSpace& sp, const Vec<S>& psi);

// Maps between spaces sharing one sector; entries absent in the target are
// dropped, missing ones are zero.
template <class S>
Vec<S> transfer(const AmplitudeSpace& from, const AmplitudeSpace& to, const Vec<S>& t);

template <class S>
double amp_norm(const Vec<S>& t, NormKind kind, const Eigen::VectorXd* eps = nullptr);

// C = max(sqrt(eps_max), 1/sqrt(eps_min)) with |||t||| <= C ||t||.
double norm_equivalence_constant(const Eigen::VectorXd& eps);

}  // namespace ccdeg
