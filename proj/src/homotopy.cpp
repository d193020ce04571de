// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0

#include "ccdeg/homotopy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace ccdeg {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double inf_norm(const VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double spectral_norm(const MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return Eigen::JacobiSVD<MatrixXd>(m).singularValues()(0);
}

void check_split(const CCProblem& p, const SplitSpec& split) {
  if (split.mask0.size() != p.dim()) throw ValidationError("split does not match the amplitude space");
}

void check_rank_split(const CCProblem& p, const SplitSpec& split) {
  check_split(p, split);
  if (split.rho < 1) throw ValidationError("the KP homotopy needs a rank split");
}

void check_vector(const CCProblem& p, const VectorXd& t) {
  if (t.size() != p.dim()) throw ValidationError("amplitude vector has wrong dimension");
}

SplitSpec split_from(const CCProblem& p, int rho, const std::vector<char>& in0) {
  SplitSpec s;
  s.rho = rho;
  s.mask0 = VectorXd::Zero(p.dim());
  for (int a = 0; a < p.dim(); ++a) {
    if (in0[a]) {
      s.zero.push_back(a);
      s.mask0(a) = 1.0;
    } else {
      s.angle.push_back(a);
    }
  }
  if (s.zero.empty() || s.angle.empty()) throw ValidationError("split leaves one part empty");
  return s;
}

VectorXd masked(const VectorXd& v, const VectorXd& mask) { return v.cwiseProduct(mask); }

}  // namespace

VectorXd SplitSpec::gather(const VectorXd& t, const std::vector<int>& idx) const {
  VectorXd out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out(i) = t(idx[i]);
  return out;
}

MatrixXd SplitSpec::block(const MatrixXd& m, const std::vector<int>& rows, const std::vector<int>& cols) const {
  MatrixXd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  return out;
}

SplitSpec make_split(const CCProblem& p, int rho) {
  const int N = p.sp().basis().N;
  if (rho < 1 || rho >= N) throw ValidationError("cut rank must satisfy 1 <= rho < N");
  std::vector<char> in0(p.dim());
  for (int a = 0; a < p.dim(); ++a) in0[a] = p.sp().rank(a) <= rho;
  return split_from(p, rho, in0);
}

SplitSpec make_subspace_split(const CCProblem& p, const TruncationScheme& sub) {
  const int N = p.sp().basis().N;
  std::vector<char> in0(p.dim());
  for (int a = 0; a < p.dim(); ++a) in0[a] = sub.includes(p.sp().rank(a), N);
  return split_from(p, 0, in0);
}

VectorXd kp_residual(const CCProblem& p, const SplitSpec& split, const VectorXd& t, double lambda) {
  check_rank_split(p, split);
  check_vector(p, t);
  const VectorXd s = split.project0(t) + lambda * split.project_angle(t);
  return masked(cc_residual<double>(p, s), split.mask0) + cc_residual<double>(p, t) -
         masked(cc_residual<double>(p, t), split.mask0);
}

VectorXd kp_residual_definition(const CCProblem& p, const SplitSpec& split, const VectorXd& t, double lambda) {
  check_rank_split(p, split);
  check_vector(p, t);
  const AmplitudeSpace& sp = p.sp();
  const VectorXd phi = reference_vector<double>(sp);
  const MatrixXd H0 = sim_hamiltonian<double>(p, split.project0(t));
  const VectorXd v0 = H0.col(0) + lambda * (H0 * (exp_apply<double>(sp, split.project_angle(t), phi) - phi));
  const VectorXd r0 = components<double>(sp, v0);
  const VectorXd r1 = cc_residual<double>(p, t);
  return masked(r0, split.mask0) + r1 - masked(r1, split.mask0);
}

MatrixXd kp_jacobian(const CCProblem& p, const SplitSpec& split, const VectorXd& t, double lambda) {
  check_rank_split(p, split);
  check_vector(p, t);
  const VectorXd s = split.project0(t) + lambda * split.project_angle(t);
  const VectorXd scale = split.mask0 + lambda * (VectorXd::Ones(p.dim()) - split.mask0);
  const MatrixXd Js = jacobian<double>(p, s) * scale.asDiagonal();
  MatrixXd J = jacobian<double>(p, t);
  for (int b : split.zero) J.row(b) = Js.row(b);
  return J;
}

double kp_energy(const CCProblem& p, const SplitSpec& split, const VectorXd& t, double lambda) {
  check_split(p, split);
  check_vector(p, t);
  return cc_energy<double>(p, split.project0(t) + lambda * split.project_angle(t));
}

MatrixXd kp_g_operator(const CCProblem& p, const SplitSpec& split, const VectorXd& t, double lambda) {
  check_split(p, split);
  check_vector(p, t);
  const VectorXd s = split.project0(t) + lambda * split.project_angle(t);
  return sim_hamiltonian<double>(p, t) - sim_hamiltonian<double>(p, s);
}

DenseOperator gamma_operator(const CCProblem& p, const SplitSpec& split, const VectorXd& t, double lambda) {
  check_split(p, split);
  check_vector(p, t);
  const AmplitudeSpace& sp = p.sp();
  const VectorXd s = split.project0(t) + lambda * split.project_angle(t);
  const MatrixXd Ta = cluster_matrix<double>(sp, split.project_angle(t));
  const int N = sp.basis().N;
  MatrixXd nested = p.H, sum = MatrixXd::Zero(p.H.rows(), p.H.cols());
  double coef = 1.0;  // (1 - lambda)^(k-1) / k!
  for (int k = 1; k <= 2 * N; ++k) {
    nested = nested * Ta - Ta * nested;
    coef /= k;
    sum += coef * nested;
    coef *= 1.0 - lambda;
  }
  return exp_matrix<double>(sp, -s) * sum * exp_matrix<double>(sp, s);
}

KPBlockSpectra kp_block_spectra(const CCProblem& p, const SplitSpec& split, const VectorXd& t) {
  if (inf_norm(kp_residual(p, split, t, 0.0)) > 1e-6) throw ValidationError("not a zero of the lambda = 0 system");
  const AmplitudeSpace& sp = p.sp();
  const VectorXd t0 = split.project0(t);
  KPBlockSpectra out;

  const MatrixXd H0 = v_block<double>(sp, sim_hamiltonian<double>(p, t0));
  out.zero_block = eigenvalues<double>(split.block(H0, split.zero, split.zero)).array() - cc_energy<double>(p, t0);

  const MatrixXd H1 = sim_hamiltonian<double>(p, t);
  const VectorXd coef = masked(components<double>(sp, VectorXd(H1.col(0))), split.mask0);
  const MatrixXd Hhat = v_block<double>(sp, H1 - cluster_matrix<double>(sp, coef));
  out.angle_block =
      eigenvalues<double>(split.block(Hhat, split.angle, split.angle)).array() - cc_energy<double>(p, t);

  auto count = [](const Eigen::VectorXcd& z) {
    int n = 0;
    for (const cplx& x : z)
      if (is_real_eigenvalue(x) && x.real() < 0.0) ++n;
    return n;
  };
  out.nu0 = count(out.zero_block);
  out.nu_angle = count(out.angle_block);
  out.index = (out.nu0 + out.nu_angle) % 2 ? -1 : 1;
  out.upper_right = split.block(kp_jacobian(p, split, t, 0.0), split.zero, split.angle).cwiseAbs().maxCoeff();
  return out;
}

VectorXd linear_residual(const CCProblem& p, const SplitSpec& split, const VectorXd& t, double lambda,
                         const LinearParams& lin) {
  check_split(p, split);
  check_vector(p, t);
  if (!(lin.alpha > 0.0)) throw ValidationError("linear homotopy needs alpha > 0");
  if (lin.u_perp.size() != p.dim()) throw ValidationError("u_perp has wrong dimension");
  const VectorXd a0 = masked(cc_residual<double>(p, split.project0(t)), split.mask0);
  const VectorXd perp = lin.alpha * split.project_angle(t - lin.u_perp);
  return (1.0 - lambda) * (a0 + perp) + lambda * cc_residual<double>(p, t);
}

MatrixXd linear_jacobian(const CCProblem& p, const SplitSpec& split, const VectorXd& t, double lambda,
                         const LinearParams& lin) {
  check_split(p, split);
  check_vector(p, t);
  if (!(lin.alpha > 0.0)) throw ValidationError("linear homotopy needs alpha > 0");
  const VectorXd& m = split.mask0;
  MatrixXd J0 = m.asDiagonal() * jacobian<double>(p, split.project0(t)) * m.asDiagonal();
  J0.diagonal() += lin.alpha * (VectorXd::Ones(p.dim()) - m);
  return (1.0 - lambda) * J0 + lambda * jacobian<double>(p, t);
}

VectorXd Homotopy::residual(const CCProblem& p, const VectorXd& t, double lambda) const {
  return kind == HomotopyKind::kp ? kp_residual(p, split, t, lambda) : linear_residual(p, split, t, lambda, lin);
}

MatrixXd Homotopy::jacobian(const CCProblem& p, const VectorXd& t, double lambda) const {
  return kind == HomotopyKind::kp ? kp_jacobian(p, split, t, lambda) : linear_jacobian(p, split, t, lambda, lin);
}

Path trace_path(const CCProblem& p, const Homotopy& h, const CCSolution<double>& start, const PathOptions& opts) {
  check_vector(p, start.t);
  if (opts.lambda_end < 0.0 || opts.lambda_end > 1.0) throw ValidationError("lambda_end must lie in [0, 1]");
  if (!(opts.min_step > 0.0) || opts.max_step < opts.min_step) throw ValidationError("invalid step bounds");

  auto point = [&](double lam, const VectorXd& t, double step) {
    PathPoint pt;
    pt.lambda = lam;
    pt.t = t;
    pt.residual_inf = inf_norm(h.residual(p, t, lam));
    pt.e_kp = kp_energy(p, h.split, t, lam);
    pt.sgn_det = det_sign<double>(h.jacobian(p, t, lam));
    pt.step = step;
    return pt;
  };

  Path path;
  path.points.push_back(point(1.0, start.t, 0.0));
  if (path.points.back().residual_inf > 1e-8) throw ValidationError("path start is not a zero at lambda = 1");
  if (opts.lambda_end == 1.0) {
    path.complete = true;
    return path;
  }

  NewtonOptions nopts;
  nopts.tol = opts.corrector_tol;
  nopts.max_iter = opts.corrector_iter;
  double lam = 1.0, step_size = std::clamp(opts.initial_step, opts.min_step, opts.max_step);
  VectorXd t = start.t, t_prev;
  double lam_prev = 1.0;
  bool have_prev = false;
  int successes = 0;

  while (lam > opts.lambda_end) {
    const double step = std::min(step_size, lam - opts.lambda_end);
    const double lam_new = lam - step <= opts.lambda_end + 1e-14 ? opts.lambda_end : lam - step;
    const VectorXd pred = have_prev ? VectorXd(t + (t - t_prev) * ((lam - lam_new) / (lam_prev - lam))) : t;
    const NewtonResult<double> c = damped_newton<double>(
        [&](const VectorXd& x) { return h.residual(p, x, lam_new); },
        [&](const VectorXd& x) { return h.jacobian(p, x, lam_new); }, pred, nopts);
    const bool ok = c.converged && (c.x - pred).norm() <= opts.jump_factor * std::max(1.0, t.norm());
    if (ok) {
      t_prev = t;
      lam_prev = lam;
      have_prev = true;
      t = c.x;
      lam = lam_new;
      path.points.push_back(point(lam, t, step));
      const PathPoint& a = path.points[path.points.size() - 2];
      const PathPoint& b = path.points.back();
      if (a.sgn_det != b.sgn_det) path.sign_flips.push_back(0.5 * (a.lambda + b.lambda));
      if (++successes >= 3) {
        step_size = std::min(2 * step_size, opts.max_step);
        successes = 0;
      }
      continue;
    }
    successes = 0;
    if (step <= opts.min_step * (1 + 1e-12)) {
      path.breakdown_lambda = lam;
      path.breakdown_residual = c.residual_inf;
      const Eigen::VectorXd sv = Eigen::JacobiSVD<MatrixXd>(h.jacobian(p, t, lam)).singularValues();
      path.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
      path.diagnostic = "corrector failed at the minimum step";
      return path;
    }
    step_size = std::max(step / 2, opts.min_step);
  }
  path.complete = true;
  return path;
}

std::vector<Path> trace_paths(const CCProblem& p, const Homotopy& h, const std::vector<CCSolution<double>>& starts,
                              const PathOptions& opts) {
  std::vector<Path> out(starts.size());
  std::vector<std::string> errors(starts.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < starts.size(); i = next++) {
      try {
        out[i] = trace_path(p, h, starts[i], opts);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  const int n = std::min<int>(worker_count(), static_cast<int>(starts.size()));
  std::vector<std::thread> pool;
  for (int i = 1; i < n; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (const std::string& e : errors)
    if (!e.empty()) throw ValidationError(e);
  return out;
}

KPVerifyReport kp_verify(const CCProblem& p, const SplitSpec& split, const VectorXd& psi, double energy,
                         const VectorXd& t, double lambda, double tol) {
  const AmplitudeSpace& sp = p.sp();
  if (!sp.is_full()) throw ValidationError("kp_verify needs the full amplitude space");
  if (psi.size() != sp.sector().size()) throw ValidationError("eigenvector has wrong dimension");
  if (inf_norm(kp_residual(p, split, t, lambda)) > tol) throw ValidationError("point is not a zero of the KP map");

  const VectorXd s = split.project0(t) + lambda * split.project_angle(t);
  KPVerifyReport r;
  r.overlap = exp_apply<double>(sp, s, reference_vector<double>(sp)).dot(psi);
  if (std::abs(r.overlap) <= kOverlapTol * psi.norm())
    throw NumericalError("overlap <e^S Phi0, Psi> vanishes; the KP energy is not tied to this eigenpair");
  r.e_kp = kp_energy(p, split, t, lambda);
  r.lhs = (r.e_kp - energy) * r.overlap;

  const VectorXd angle = VectorXd::Ones(p.dim()) - split.mask0;
  const VectorXd g = components<double>(sp, VectorXd(kp_g_operator(p, split, t, lambda).col(0)));
  const VectorXd c = components<double>(sp, psi);
  const VectorXd w = exp_matrix<double>(sp, s).transpose() * sector_vector<double>(sp, masked(c, angle));
  r.rhs = masked(g, angle).dot(components<double>(sp, w));
  r.residual = std::abs(r.lhs - r.rhs);
  r.in_v0 = masked(c, angle).norm() <= 1e-12 * psi.norm();
  r.energy_gap = r.e_kp - energy;
  return r;
}

ErrorEstimateReport energy_error_estimate(const CCProblem& p, const SplitSpec& split, const VectorXd& t_kp,
                                          const VectorXd& t_fcc, int samples, double tol) {
  const AmplitudeSpace& sp = p.sp();
  if (!sp.is_full()) throw ValidationError("the energy estimate needs the full amplitude space");
  check_vector(p, t_fcc);
  if (samples < 2) throw ValidationError("need at least two samples");
  if (inf_norm(kp_residual(p, split, t_kp, 0.0)) > tol) throw ValidationError("t** is not a zero of the KP map");
  if (inf_norm(cc_residual<double>(p, t_fcc)) > tol) throw ValidationError("t* is not a zero of the CC map");

  const VectorXd phi = reference_vector<double>(sp);
  const VectorXd t0 = split.project0(t_kp), ta = split.project_angle(t_kp);
  const VectorXd angle = VectorXd::Ones(p.dim()) - split.mask0;

  ErrorEstimateReport r;
  r.overlap = exp_apply<double>(sp, t0, phi).dot(exp_apply<double>(sp, t_fcc, phi));
  if (std::abs(r.overlap) <= kOverlapTol)
    throw NumericalError("nonorthogonality condition fails: <e^{T0**} Phi0, e^{T*} Phi0> = 0");

  const VectorXd b = exp_apply<double>(sp, t_fcc, phi);
  const VectorXd w =
      exp_matrix<double>(sp, t0).transpose() * sector_vector<double>(sp, masked(components<double>(sp, b), angle));
  r.projected_norm = masked(components<double>(sp, w), angle).norm();
  r.c = norm_equivalence_constant(p.fock.eps);
  r.kappa = ta.norm();

  const MatrixXd W = p.fock.fluct;
  for (int k = 0; k < samples; ++k) {
    const VectorXd xi = t0 + (static_cast<double>(k) / (samples - 1)) * ta;
    const MatrixXd Wt = sim_transform<double>(p, W, xi);
    const VectorXd w0 = Wt.col(0);
    MatrixXd op(split.angle.size(), p.dim());
    for (int a = 0; a < p.dim(); ++a) {
      VectorXd col = sp.phase(a) * Wt.col(sp.det_index(a));
      col -= cluster_apply<double>(sp, VectorXd::Unit(p.dim(), a), w0);
      op.col(a) = split.gather(components<double>(sp, col), split.angle);
    }
    r.m = std::max(r.m, spectral_norm(op));
  }
  r.m_samples = samples;

  const double e_fcc = cc_energy<double>(p, t_fcc);
  r.actual = std::abs(cc_energy<double>(p, t0) - e_fcc);
  r.actual_full = std::abs(cc_energy<double>(p, t_kp) - e_fcc);
  r.bound = (r.c * r.c + r.m) * r.projected_norm / std::abs(r.overlap) * r.kappa;
  r.holds = r.actual <= r.bound + 1e-12;
  return r;
}

KPExistenceReport kp_existence_report(const CCProblem& p, const SplitSpec& split, const VectorXd& t,
                                      const ExistenceOptions& opts) {
  check_rank_split(p, split);
  check_vector(p, t);
  if (inf_norm(cc_residual<double>(p, t)) > 1e-8) throw ValidationError("t* is not a zero of the CC map");
  if (!(opts.eps > 0.0) || !(opts.delta > 0.0) || opts.samples < 1) throw ValidationError("invalid existence options");
  const int d = p.dim();
  const MatrixXd J = jacobian<double>(p, t);
  {
    const VectorXd sv = Eigen::JacobiSVD<MatrixXd>(J).singularValues();
    if (sv(d - 1) <= kRankTol * sv(0)) throw ValidationError("t* is a degenerate zero");
  }

  VectorXd gdiag = VectorXd::Ones(d);
  if (opts.norm == NormKind::fock) {
    if (p.fock.eps.minCoeff() <= 0.0) throw ValidationError("Fock-weighted norm needs all eps > 0");
    gdiag = p.fock.eps;
  }
  const VectorXd D = gdiag.cwiseSqrt(), Dinv = D.cwiseInverse();
  const MatrixXd Jt = Dinv.asDiagonal() * J * Dinv.asDiagonal();
  const MatrixXd I = MatrixXd::Identity(d, d);

  KPExistenceReport r;
  r.norm = opts.norm;
  r.eps = opts.eps;
  r.delta = opts.delta;
  r.samples = opts.samples;
  r.gamma0 = Eigen::SelfAdjointEigenSolver<MatrixXd>(0.5 * (Jt + Jt.transpose())).eigenvalues()(0);
  r.alpha = opts.alpha ? *opts.alpha : (r.gamma0 > 0.0 ? 0.0 : 2.0 * std::abs(r.gamma0));
  if (r.alpha < 0.0) throw ValidationError("alpha must be nonnegative");
  const MatrixXd Ja = Jt + r.alpha * I;
  r.gamma_alpha = Eigen::SelfAdjointEigenSolver<MatrixXd>(0.5 * (Ja + Ja.transpose())).eigenvalues()(0);

  const MatrixXd Theta = Jt.transpose().fullPivLu().solve(Ja.transpose());
  r.Theta = Dinv.asDiagonal() * Theta * D.asDiagonal();
  r.theta_norm = spectral_norm(Theta);
  const MatrixXd Tm = Theta - I;
  r.theta0 = std::pow(spectral_norm(split.block(Tm, split.zero, split.zero)), 2);
  r.theta_angle = std::pow(spectral_norm(split.block(Tm, split.zero, split.angle)), 2);
  // A diagonal Gram matrix keeps the rank split orthogonal.
  r.g = 0.0;
  r.Delta = spectral_norm(split.block(Jt, split.zero, split.angle));
  r.kappa = D.cwiseProduct(split.project_angle(t)).norm();

  Uniform u(opts.seed);
  auto unit = [&] {
    VectorXd v(d);
    for (int i = 0; i < d; ++i) v(i) = u();
    return VectorXd(v / v.norm());
  };
  for (int k = 0; k < opts.samples; ++k) {
    const VectorXd zeta = k == 0 ? VectorXd::Zero(d) : VectorXd(opts.delta * std::abs(u()) * unit());
    const MatrixXd Ht = sim_hamiltonian<double>(p, t + Dinv.cwiseProduct(zeta));
    const VectorXd uu = Dinv.cwiseProduct(unit());
    MatrixXd m(d, d);
    for (int j = 0; j < d; ++j)
      m.col(j) = Dinv.cwiseProduct(commutator2_apply<double>(p.sp(), Ht, uu, VectorXd(Dinv(j) * VectorXd::Unit(d, j))));
    r.M_delta = std::max(r.M_delta, spectral_norm(m));
  }

  const double num = (1.0 - r.g) * (r.gamma_alpha - 0.5 * r.M_delta * r.theta_norm * r.delta);
  const double den = r.Delta + r.M_delta * r.delta;
  const double ratio = den > 0.0 ? num / den
                                 : (num > 0.0 ? std::numeric_limits<double>::infinity()
                                              : -std::numeric_limits<double>::infinity());
  const double c = 1.0 + 1.0 / r.eps;
  r.eta = ratio - 0.5 * std::max(r.eps + 2 * c * r.theta0, 2 * c * r.theta_angle);
  r.condition_i = r.eta > 0.5;
  if (std::isinf(r.eta) && r.eta > 0) {
    r.kappa_limit = r.delta;
  } else if (r.eta >= 0.0) {
    const double s = std::sqrt(r.eta);
    r.kappa_limit = (2 * s - std::sqrt(2.0)) / (2 - std::sqrt(2.0) + 2 * s) * r.delta;
  }
  r.condition_ii = r.kappa < r.kappa_limit;
  return r;
}

}  // namespace ccdeg
