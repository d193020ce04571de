// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0
//
// Linear and Kowalski-Piecuch homotopies between truncation levels.
// Everything here works on real amplitudes.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ccdeg/analysis.hpp"

namespace ccdeg {

// Split V1 = V0 + Vang of the problem's amplitude space. Rank splits
// (rho > 0) serve both homotopies; scheme splits only the linear one.
struct SplitSpec {
  int rho = 0;
  std::vector<int> zero;   // indices in V0
  std::vector<int> angle;  // indices in the complement

  Eigen::VectorXd mask0;  // 1 on V0, 0 elsewhere

  Eigen::VectorXd project0(const Eigen::VectorXd& t) const { return t.cwiseProduct(mask0); }
  Eigen::VectorXd project_angle(const Eigen::VectorXd& t) const { return t - project0(t); }
  Eigen::VectorXd gather(const Eigen::VectorXd& t, const std::vector<int>& idx) const;
  Eigen::MatrixXd block(const Eigen::MatrixXd& m, const std::vector<int>& rows, const std::vector<int>& cols) const;
};

// V0 = ranks <= rho; requires 1 <= rho < N and both parts non-empty.
SplitSpec make_split(const CCProblem& p, int rho);
// V0 = amplitudes of p's space that `sub` also contains.
SplitSpec make_subspace_split(const CCProblem& p, const TruncationScheme& sub);

Eigen::VectorXd kp_residual(const CCProblem& p, const SplitSpec& split, const Eigen::VectorXd& t, double lambda);
// Evaluated from the defining pairing instead of the compact form.
Eigen::VectorXd kp_residual_definition(const CCProblem& p, const SplitSpec& split, const Eigen::VectorXd& t,
                                       double lambda);
Eigen::MatrixXd kp_jacobian(const CCProblem& p, const SplitSpec& split, const Eigen::VectorXd& t, double lambda);
// <H e^{T0 + lambda Tang} Phi0, Phi0>
double kp_energy(const CCProblem& p, const SplitSpec& split, const Eigen::VectorXd& t, double lambda);

// G(t, lambda) = H(t) - H(t0 + lambda tang) on the sector.
Eigen::MatrixXd kp_g_operator(const CCProblem& p, const SplitSpec& split, const Eigen::VectorXd& t, double lambda);
// Gamma(t, lambda) from the nested commutator series, so that G = (1 - lambda) Gamma.
DenseOperator gamma_operator(const CCProblem& p, const SplitSpec& split, const Eigen::VectorXd& t, double lambda);

struct KPBlockSpectra {
  Eigen::VectorXcd zero_block;   // sigma(H(t0)_V0) - E_CC(t0)
  Eigen::VectorXcd angle_block;  // sigma(Hhat(t)_Vang) - E_CC(t)
  int nu0 = 0;
  int nu_angle = 0;
  int index = 0;  // (-1)^(nu0 + nu_angle)
  double upper_right = 0.0;  // max |J_{V0, Vang}| at lambda = 0
};

// Block spectra of the lambda = 0 Jacobian at a zero of kp_residual(., 0).
KPBlockSpectra kp_block_spectra(const CCProblem& p, const SplitSpec& split, const Eigen::VectorXd& t);

struct LinearParams {
  double alpha = 1.0;
  Eigen::VectorXd u_perp;  // entries on V0 are ignored
};

// (1 - lambda) [A0(t0) on V0, alpha (t - u) on the complement] + lambda A(t)
Eigen::VectorXd linear_residual(const CCProblem& p, const SplitSpec& split, const Eigen::VectorXd& t, double lambda,
                                const LinearParams& lin);
Eigen::MatrixXd linear_jacobian(const CCProblem& p, const SplitSpec& split, const Eigen::VectorXd& t, double lambda,
                                const LinearParams& lin);

enum class HomotopyKind { kp, linear };

struct Homotopy {
  HomotopyKind kind = HomotopyKind::kp;
  SplitSpec split;
  LinearParams lin;

  Eigen::VectorXd residual(const CCProblem& p, const Eigen::VectorXd& t, double lambda) const;
  Eigen::MatrixXd jacobian(const CCProblem& p, const Eigen::VectorXd& t, double lambda) const;
};

struct PathPoint {
  double lambda = 1.0;
  Eigen::VectorXd t;
  double residual_inf = 0.0;
  double e_kp = 0.0;
  int sgn_det = 0;
  double step = 0.0;
};

struct PathOptions {
  double lambda_end = 0.0;
  double initial_step = 0.05;
  double min_step = 1e-4;
  double max_step = 0.1;
  double corrector_tol = 1e-10;
  int corrector_iter = 20;
  double jump_factor = 0.25;  // max corrector move relative to max(1, ||t||)
};

struct Path {
  std::vector<PathPoint> points;
  bool complete = false;
  // Set on breakdown: lambda of the last accepted point and diagnostics of
  // the failed corrector.
  std::optional<double> breakdown_lambda;
  double breakdown_residual = 0.0;
  double condition = 0.0;  // of the homotopy Jacobian at the last accepted point
  // Midpoints of consecutive accepted points whose determinant signs differ.
  std::vector<double> sign_flips;
  std::string diagnostic;
};

Path trace_path(const CCProblem& p, const Homotopy& h, const CCSolution<double>& start, const PathOptions& opts = {});
// Independent paths on worker threads; order follows `starts`.
std::vector<Path> trace_paths(const CCProblem& p, const Homotopy& h, const std::vector<CCSolution<double>>& starts,
                              const PathOptions& opts = {});

struct KPVerifyReport {
  double lhs = 0.0;  // (E_KP - E) <e^S Phi0, Psi>
  double rhs = 0.0;  // <G Phi0, Pi_ang (e^S)^dagger C_ang Phi0>
  double residual = 0.0;
  double overlap = 0.0;
  double e_kp = 0.0;
  // Psi lies in span{Phi0} + V0; E_KP - E is then expected to vanish.
  bool in_v0 = false;
  double energy_gap = 0.0;
};

inline constexpr double kOverlapTol = 1e-10;

// Requires a full amplitude space and a zero of kp_residual(., lambda).
KPVerifyReport kp_verify(const CCProblem& p, const SplitSpec& split, const Eigen::VectorXd& psi, double energy,
                         const Eigen::VectorXd& t, double lambda, double tol = 1e-8);

struct ErrorEstimateReport {
  double actual = 0.0;       // |E_CC(t0**) - E_CC(t*)|
  double actual_full = 0.0;  // |E_CC(t**) - E_CC(t*)|
  double bound = 0.0;
  double overlap = 0.0;
  double m = 0.0;  // sampled
  int m_samples = 0;
  double c = 0.0;  // norm-equivalence constant
  double projected_norm = 0.0;  // ||Pi_ang (e^{T0**})^dagger Pi_ang e^{T*} Phi0||
  double kappa = 0.0;           // ||t_ang**||
  bool holds = false;           // actual <= bound
};

ErrorEstimateReport energy_error_estimate(const CCProblem& p, const SplitSpec& split, const Eigen::VectorXd& t_kp,
                                          const Eigen::VectorXd& t_fcc, int samples = 256, double tol = 1e-8);

struct ExistenceOptions {
  std::optional<double> alpha;  // default: 0 when coercive, else 2 |gamma_0|
  double eps = 1.0;
  double delta = 0.1;
  int samples = 256;
  NormKind norm = NormKind::ell2;
  std::uint64_t seed = 1;
};

struct KPExistenceReport {
  double Delta = 0.0;
  double gamma0 = 0.0;
  double gamma_alpha = 0.0;
  double alpha = 0.0;
  Eigen::MatrixXd Theta;
  double theta_norm = 0.0;
  double theta0 = 0.0;
  double theta_angle = 0.0;
  double g = 0.0;
  double kappa = 0.0;
  double M_delta = 0.0;
  int samples = 0;
  double eps = 0.0;
  double delta = 0.0;
  double eta = 0.0;
  double kappa_limit = 0.0;  // (2 sqrt(eta) - sqrt 2) / (2 - sqrt 2 + 2 sqrt(eta)) delta
  bool condition_i = false;
  bool condition_ii = false;
  NormKind norm = NormKind::ell2;
};

KPExistenceReport kp_existence_report(const CCProblem& p, const SplitSpec& split, const Eigen::VectorXd& t,
                                      const ExistenceOptions& opts = {});

}  // namespace ccdeg
