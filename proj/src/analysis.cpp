// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0

#include "ccdeg/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ccdeg {

namespace {

constexpr double kZeroCheck = 1e-6;

template <class S>
void require_zero(const CCProblem& p, const Vec<S>& t, const char* who) {
  if (t.size() != p.dim()) throw ValidationError(std::string(who) + ": amplitude vector has wrong dimension");
  const double r = cc_residual<S>(p, t).cwiseAbs().maxCoeff();
  if (!(r <= kZeroCheck)) throw ValidationError(std::string(who) + ": amplitudes are not a zero of the CC map");
}

template <class S>
S random_scalar(Uniform& u) {
  if constexpr (std::is_same_v<S, cplx>) {
    const double re = u(), im = u();
    return {re, im};
  } else {
    return u();
  }
}

template <class S>
Vec<S> random_unit(Uniform& u, int n) {
  Vec<S> v(n);
  for (int i = 0; i < n; ++i) v(i) = random_scalar<S>(u);
  const double nv = v.norm();
  if (nv == 0.0) v(0) = S(1);
  else v /= S(nv);
  return v;
}

}  // namespace

bool is_real_eigenvalue(const cplx& z) { return std::abs(z.imag()) <= kRealityTol * std::max(1.0, std::abs(z)); }

template <class S>
Eigen::VectorXcd eigenvalues(const Mat<S>& m) {
  if (m.size() == 0) return {};
  if constexpr (std::is_same_v<S, cplx>) {
    Eigen::ComplexEigenSolver<Mat<cplx>> es(m, false);
    if (es.info() != Eigen::Success) throw NumericalError("eigenvalue solver failed");
    return es.eigenvalues();
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m, false);
    if (es.info() != Eigen::Success) throw NumericalError("eigenvalue solver failed");
    return es.eigenvalues();
  }
}

Eigen::MatrixXd realify(const Mat<cplx>& m) {
  const Eigen::Index n = m.rows();
  Eigen::MatrixXd r(2 * n, 2 * m.cols());
  const Eigen::MatrixXd B = m.real(), C = m.imag();
  r << B, -C, C, B;
  return r;
}

template <class S>
int det_sign(const Mat<S>& m) {
  if (m.size() == 0) return 1;
  Eigen::MatrixXd a;
  if constexpr (std::is_same_v<S, cplx>) a = realify(m);
  else a = m;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const Eigen::MatrixXd& f = lu.matrixLU();
  int sign = lu.permutationP().determinant();
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    const double d = f(i, i);
    if (d == 0.0 || !std::isfinite(d)) return 0;
    if (d < 0) sign = -sign;
  }
  return sign;
}

template <class S>
IndexReport index_nondegenerate(const CCProblem& p, const Vec<S>& t) {
  require_zero<S>(p, t, "index");
  IndexReport rep;
  rep.field = field_of<S>;
  const S E = cc_energy<S>(p, t);
  rep.energy = cplx(E);
  rep.eigvals = eigenvalues<S>(v_block<S>(p.sp(), modified_hamiltonian<S>(p, t)));
  const cplx e(E);
  for (const cplx& z : rep.eigvals) {
    if (std::abs(z - e) <= kDegeneracyBand) rep.degenerate = true;
    else if (is_real_eigenvalue(z) && z.real() < e.real()) ++rep.nu;
  }
  rep.sgn_det = det_sign<S>(jacobian<S>(p, t));
  if (rep.degenerate) return rep;
  if constexpr (std::is_same_v<S, cplx>) {
    if (rep.sgn_det != 1) throw NumericalError("index: realification determinant is not positive");
    rep.index = 1;
  } else {
    const int expected = rep.nu % 2 ? -1 : 1;
    if (rep.sgn_det != expected)
      throw NumericalError("index: (-1)^nu = " + std::to_string(expected) + " but sgn det = " +
                           std::to_string(rep.sgn_det));
    rep.index = expected;
  }
  return rep;
}

template <class S>
EOMReport eom_spectrum(const CCProblem& p, const Vec<S>& t) {
  require_zero<S>(p, t, "eom");
  EOMReport rep;
  rep.shifts = eigenvalues<S>(jacobian<S>(p, t, JacobianForm::at_zero));
  for (const cplx& z : rep.shifts) {
    if (std::abs(z) <= kDegeneracyBand) rep.degenerate = true;
    else if (is_real_eigenvalue(z) && z.real() < 0) ++rep.nu;
  }
  return rep;
}

template <class S>
FockSplitReport fock_splitting_test(const CCProblem& p, const Vec<S>& t) {
  if (!p.sp().rank_regular()) throw ValidationError("fock splitting: amplitude space is not rank-regular");
  require_zero<S>(p, t, "fock splitting");
  const AmplitudeSpace& sp = p.sp();
  const Vec<S> eps = p.fock.eps.template cast<S>();
  const Vec<S> weighted = t.cwiseProduct(eps);
  Mat<S> Qm = v_block<S>(sp, cluster_matrix<S>(sp, weighted));
  Qm.diagonal() += eps;
  const Mat<S> Wt = sim_transform<S>(p, promote<S>(p.fock.fluct), t);
  FockSplitReport rep;
  const S omega0 = Wt(0, 0);
  rep.omega0 = cplx(omega0);
  rep.spectrum = eigenvalues<S>(Mat<S>(Qm + v_block<S>(sp, Wt)));
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (const cplx& z : rep.spectrum) rep.min_gap = std::min(rep.min_gap, std::abs(z - rep.omega0));
  rep.nondegenerate = rep.min_gap > kDegeneracyBand;
  rep.identity_error = std::abs(cplx(cc_energy<S>(p, t)) - (p.fock.fock_diag(0) + rep.omega0));
  return rep;
}

template <class S>
Vec<S> DegenerateData<S>::B(const Vec<S>& r) const {
  return S(0.5) * (Q * commutator2_apply<S>(*space, fluct, r, r));
}

template <class S>
std::vector<CCSolution<S>> perturbed_solutions(const CCProblem& p, const Vec<S>& center, const Vec<S>& rhs,
                                               double radius, int starts, std::uint64_t seed) {
  if (!(radius > 0)) throw ValidationError("perturbed solutions: radius must be positive");
  auto sols = multistart_solve<S>(p, Sampler{seed, radius, starts}, {}, &center, &rhs);
  std::vector<CCSolution<S>> inside;
  for (auto& s : sols)
    if ((s.t - center).cwiseAbs().maxCoeff() < radius) inside.push_back(std::move(s));
  return inside;
}

template <class S>
DegenerateData<S> degenerate_index(const CCProblem& p, const Vec<S>& t, const DegenerateOptions& opts) {
  require_zero<S>(p, t, "degenerate index");
  const Mat<S> J = jacobian<S>(p, t);
  Eigen::JacobiSVD<Mat<S>> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const int d = p.dim();
  DegenerateData<S> out;
  for (int i = 0; i < d; ++i)
    if (sv(i) < opts.rank_tol * sv(0)) ++out.mu;
  if (out.mu == 0) throw ValidationError("degenerate index: the zero is non-degenerate");
  out.WR = svd.matrixV().rightCols(out.mu);
  out.WL = svd.matrixU().rightCols(out.mu);
  out.Q = out.WL * out.WL.adjoint();
  out.space = p.space;
  out.fluct = sim_transform<S>(p, promote<S>(p.fock.fluct), t);
  out.sgn_det_shifted = det_sign<S>(Mat<S>(J + out.Q));

  Uniform u(opts.seed);
  const int samples = out.mu + opts.samples_per_dim * out.mu;
  out.b_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    Vec<S> c = k < out.mu ? Vec<S>(Vec<S>::Unit(out.mu, k)) : random_unit<S>(u, out.mu);
    const Vec<S> r = out.WR * c;
    const Vec<S> full = S(0.5) * commutator2_apply<S>(*out.space, out.fluct, r, r);
    const double b = (out.Q * full).norm();
    out.b_scale = std::max(out.b_scale, full.norm());
    if (b < out.b_min) {
      out.b_min = b;
      out.witness = r;
    }
  }
  out.sphere_ok = out.b_min > opts.sphere_tol * std::max(1.0, out.b_scale);

  Vec<S> l = out.WL.col(0);
  if constexpr (std::is_same_v<S, cplx>) {
    Eigen::Index k;
    l.cwiseAbs().maxCoeff(&k);
    l *= std::conj(l(k)) / std::abs(l(k));
  }
  out.curvature = l.dot(out.B(out.WR.col(0)));
  const double sgn = real_part(out.curvature) < 0 ? -1.0 : 1.0;
  if constexpr (std::is_same_v<S, cplx>) {
    out.favorable_rhs = S(opts.perturbation) * l;
    out.adverse_rhs = out.favorable_rhs;
  } else {
    out.favorable_rhs = (sgn * opts.perturbation) * l;
    out.adverse_rhs = -out.favorable_rhs;
  }

  if (!out.sphere_ok) {
    out.method = "unresolved";
    return out;
  }
  if (out.mu == 1) {
    out.method = "mu=1";
    out.index = field_of<S> == Field::complex ? 2 : 0;
    return out;
  }
  out.method = "perturbed-count";
  const Vec<S> rhs = S(opts.perturbation) * (out.WL * random_unit<S>(u, out.mu));
  out.perturbed_count =
      static_cast<int>(perturbed_solutions<S>(p, t, rhs, opts.probe_radius, opts.probe_starts, opts.seed).size());
  if constexpr (std::is_same_v<S, cplx>) out.index = out.perturbed_count;
  return out;
}

template <class S>
DegreeReport<S> degree_over_box(const CCProblem& p, const Vec<S>& center, double radius,
                                const std::vector<Vec<S>>& zeros, const DegreeOptions& opts, const Vec<S>* rhs) {
  const int d = p.dim();
  if (center.size() != d) throw ValidationError("degree: center has wrong dimension");
  if (!(radius > 0)) throw ValidationError("degree: radius must be positive");
  DegreeReport<S> rep;
  for (const auto& z : zeros) {
    if (!((z - center).cwiseAbs().maxCoeff() < radius)) throw ValidationError("degree: zero outside the box");
    const IndexReport ir = index_nondegenerate<S>(p, z);
    int idx;
    if (!ir.degenerate) {
      idx = *ir.index;
    } else {
      const DegenerateData<S> dd = degenerate_index<S>(p, z);
      if (!dd.index) throw NumericalError("degree: degenerate zero with unresolved index");
      idx = *dd.index;
    }
    rep.indices.push_back(idx);
    rep.degree += idx;
  }

  Uniform u(opts.seed);
  rep.boundary_min = std::numeric_limits<double>::infinity();
  for (int k = 0; k < opts.boundary_samples; ++k) {
    Vec<S> x = center;
    for (int a = 0; a < d; ++a) x(a) += S(radius) * random_scalar<S>(u);
    const int face = std::min(d - 1, static_cast<int>((u() + 1.0) * 0.5 * d));
    const double side = u() < 0 ? -1.0 : 1.0;
    x(face) = center(face) + S(side * radius);
    rep.boundary_min = std::min(rep.boundary_min, cc_residual<S>(p, x).cwiseAbs().maxCoeff());
  }
  if (rep.boundary_min < opts.boundary_tol) throw NumericalError("degree: residual nearly vanishes on the boundary");

  rep.rhs = rhs ? *rhs : Vec<S>(S(opts.perturbation) * random_unit<S>(u, d));
  rep.perturbed_count =
      static_cast<int>(perturbed_solutions<S>(p, center, rep.rhs, radius, opts.probe_starts, opts.seed).size());
  if constexpr (std::is_same_v<S, cplx>) {
    rep.parity_consistent = rep.perturbed_count == rep.degree;
  } else {
    rep.parity_consistent = rep.perturbed_count >= std::abs(rep.degree) && (rep.perturbed_count - rep.degree) % 2 == 0;
  }
  return rep;
}

RealificationCheck realification_check(const Mat<cplx>& m) {
  RealificationCheck c;
  const Eigen::MatrixXd r = realify(m);
  c.det_real = r.size() ? Eigen::FullPivLU<Eigen::MatrixXd>(r).determinant() : 1.0;
  c.abs_det_sq = m.size() ? std::norm(Eigen::FullPivLU<Mat<cplx>>(m).determinant()) : 1.0;
  c.rel_err = std::abs(c.det_real - c.abs_det_sq) / std::max(c.abs_det_sq, std::numeric_limits<double>::min());
  return c;
}

#define CCDEG_INSTANTIATE(S)                                                                                   \
  template Eigen::VectorXcd eigenvalues(const Mat<S>&);                                                        \
  template int det_sign(const Mat<S>&);                                                                        \
  template IndexReport index_nondegenerate(const CCProblem&, const Vec<S>&);                                   \
  template EOMReport eom_spectrum(const CCProblem&, const Vec<S>&);                                            \
  template FockSplitReport fock_splitting_test(const CCProblem&, const Vec<S>&);                               \
  template struct DegenerateData<S>;                                                                           \
  template DegenerateData<S> degenerate_index(const CCProblem&, const Vec<S>&, const DegenerateOptions&);      \
  template std::vector<CCSolution<S>> perturbed_solutions(const CCProblem&, const Vec<S>&, const Vec<S>&,      \
                                                          double, int, std::uint64_t);                         \
  template DegreeReport<S> degree_over_box(const CCProblem&, const Vec<S>&, double,                            \
                                           const std::vector<Vec<S>>&, const DegreeOptions&, const Vec<S>*);

CCDEG_INSTANTIATE(double)
CCDEG_INSTANTIATE(cplx)

}  // namespace ccdeg
