// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ccdeg/cccore.hpp"

namespace ccdeg {

inline constexpr double kRealityTol = 1e-9;
inline constexpr double kDegeneracyBand = 1e-8;
inline constexpr double kRankTol = 1e-8;

// |Im z| <= 1e-9 max(1, |z|)
bool is_real_eigenvalue(const cplx& z);

template <class S>
Eigen::VectorXcd eigenvalues(const Mat<S>& m);

// Sign of det for real matrices; for complex ones the sign of the
// determinant of the realification. 0 when singular.
template <class S>
int det_sign(const Mat<S>& m);

struct IndexReport {
  bool degenerate = false;
  int nu = 0;
  std::optional<int> index;  // empty: unresolved or not claimed
  Eigen::VectorXcd eigvals;  // of the modified Hamiltonian's V-block
  int sgn_det = 0;
  Field field = Field::real;
  cplx energy{};
};

template <class S>
IndexReport index_nondegenerate(const CCProblem& p, const Vec<S>& t);

struct EOMReport {
  Eigen::VectorXcd shifts;
  int nu = 0;
  bool degenerate = false;
};

template <class S>
EOMReport eom_spectrum(const CCProblem& p, const Vec<S>& t);

struct FockSplitReport {
  cplx omega0{};
  Eigen::VectorXcd spectrum;  // of Q(t) + W(t)_V
  double min_gap = 0.0;       // min |lambda - omega0|
  bool nondegenerate = true;
  double identity_error = 0.0;  // |E_CC - Lambda0 - omega0|
};

template <class S>
FockSplitReport fock_splitting_test(const CCProblem& p, const Vec<S>& t);

struct DegenerateOptions {
  double rank_tol = kRankTol;
  std::uint64_t seed = 1;
  int samples_per_dim = 64;
  double sphere_tol = 1e-6;  // relative to the unprojected second derivative
  double perturbation = 1e-6;
  double probe_radius = 0.05;
  int probe_starts = 64;
};

template <class S>
struct DegenerateData {
  int mu = 0;
  Mat<S> WR;  // orthonormal kernel basis of the Jacobian
  Mat<S> WL;  // orthonormal kernel basis of its adjoint
  Mat<S> Q;   // WL WL^dagger
  std::shared_ptr<const AmplitudeSpace> space;
  Mat<S> fluct;  // transformed fluctuation operator at the zero

  bool sphere_ok = false;
  double b_min = 0.0;    // min ||B(r)|| over the sampled sphere
  double b_scale = 0.0;  // max ||A''(r, r)|| / 2 over the same samples
  Vec<S> witness;        // sampled direction with the smallest ||B||

  std::optional<int> index;
  std::string method;  // "mu=1", "perturbed-count", "unresolved"
  int sgn_det_shifted = 0;  // sgn det(J + Q)
  int perturbed_count = -1;
  // Real mu = 1: right-hand side of size `perturbation` along the left
  // kernel with the sign that admits no nearby solutions.
  Vec<S> adverse_rhs;
  Vec<S> favorable_rhs;
  S curvature{};  // <B(r), l> for the first kernel pair

  // B(r) = Q A''(r, r) / 2 in the fluctuation form.
  Vec<S> B(const Vec<S>& r) const;
};

template <class S>
DegenerateData<S> degenerate_index(const CCProblem& p, const Vec<S>& t, const DegenerateOptions& opts = {});

// Distinct Newton solutions of A(t) = rhs with ||t - center||_inf < radius.
template <class S>
std::vector<CCSolution<S>> perturbed_solutions(const CCProblem& p, const Vec<S>& center, const Vec<S>& rhs,
                                               double radius, int starts, std::uint64_t seed);

struct DegreeOptions {
  int boundary_samples = 256;
  double boundary_tol = 1e-8;
  double perturbation = 1e-6;
  int probe_starts = 64;
  std::uint64_t seed = 1;
};

template <class S>
struct DegreeReport {
  int degree = 0;
  std::vector<int> indices;
  double boundary_min = 0.0;
  Vec<S> rhs;
  int perturbed_count = 0;
  bool parity_consistent = true;
};

// `rhs`, when given, replaces the random probe right-hand side.
template <class S>
DegreeReport<S> degree_over_box(const CCProblem& p, const Vec<S>& center, double radius,
                                const std::vector<Vec<S>>& zeros, const DegreeOptions& opts = {},
                                const Vec<S>* rhs = nullptr);

struct RealificationCheck {
  double det_real = 0.0;
  double abs_det_sq = 0.0;
  double rel_err = 0.0;
};

Eigen::MatrixXd realify(const Mat<cplx>& m);
RealificationCheck realification_check(const Mat<cplx>& m);

}  // namespace ccdeg
