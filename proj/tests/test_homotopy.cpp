// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>
#include <vector>

#include "ccdeg/homotopy.hpp"
#include "fixtures.hpp"

using namespace ccdeg;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using fixture::fcc_zero;
using fixture::hubbard;
using fixture::random_vec;

namespace {

double max_abs(const MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

VectorXd ground_zero(const CCProblem& p) {
  return fcc_zero(p, fci_solve(p.H).vectors.col(0));
}

CCSolution<double> as_start(const CCProblem& p, const VectorXd& t) {
  CCSolution<double> s;
  s.t = t;
  s.converged = true;
  s.residual_inf = cc_residual<double>(p, t).cwiseAbs().maxCoeff();
  return s;
}

std::vector<cplx> sorted(const Eigen::VectorXcd& v) {
  std::vector<cplx> out(v.begin(), v.end());
  std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return out;
}

struct Traced {
  CCProblem p;
  SplitSpec split;
  VectorXd t_star;
  Path path;
};

const Traced& dimer_kp() {
  static const Traced tr = [] {
    CCProblem p = hubbard(2, 4.0);
    SplitSpec s = make_split(p, 1);
    VectorXd t = ground_zero(p);
    Path path = trace_path(p, {HomotopyKind::kp, s, {}}, as_start(p, t));
    return Traced{std::move(p), std::move(s), std::move(t), std::move(path)};
  }();
  return tr;
}

const Traced& chain_kp() {
  static const Traced tr = [] {
    CCProblem p = hubbard(4, 2.0);
    SplitSpec s = make_split(p, 2);
    VectorXd t = ground_zero(p);
    Path path = trace_path(p, {HomotopyKind::kp, s, {}}, as_start(p, t));
    return Traced{std::move(p), std::move(s), std::move(t), std::move(path)};
  }();
  return tr;
}

}  // namespace

TEST_CASE("rank split") {
  const CCProblem p = hubbard(4, 2.0);
  CHECK(p.dim() == 69);
  const SplitSpec s = make_split(p, 2);
  CHECK(s.zero.size() + s.angle.size() == 69u);
  const VectorXd t = random_vec<double>(p.dim(), 3, 1.0);
  CHECK(max_abs(s.project0(t) + s.project_angle(t) - t) == 0.0);
  CHECK(s.project0(s.project_angle(t)).norm() == 0.0);
  CHECK(s.project0(t).dot(s.project_angle(t)) == 0.0);
  for (int a : s.zero) CHECK(p.sp().rank(a) <= 2);
  for (int a : s.angle) CHECK(p.sp().rank(a) > 2);
  CHECK_THROWS_AS(make_split(p, 0), ValidationError);
  CHECK_THROWS_AS(make_split(p, 4), ValidationError);
}

TEST_CASE("KP residual endpoints and the two evaluation forms") {
  for (const auto& [L, rho] : {std::pair{2, 1}, std::pair{4, 2}}) {
    const CCProblem p = hubbard(L, 3.0);
    const SplitSpec s = make_split(p, rho);
    const CCProblem trunc = with_scheme(p, TruncationScheme::up_to(rho));
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const VectorXd t = random_vec<double>(p.dim(), seed, 0.3);
      CHECK(max_abs(kp_residual(p, s, t, 1.0) - cc_residual<double>(p, t)) <= 1e-14);

      const VectorXd t0 = s.project0(t);
      const VectorXd r0 = kp_residual(p, s, t0, 0.0);
      const VectorXd rt = cc_residual<double>(trunc, transfer<double>(p.sp(), trunc.sp(), t0));
      CHECK(max_abs(transfer<double>(p.sp(), trunc.sp(), r0) - rt) <= 1e-12);

      for (double lam : {0.0, 0.37, 0.81}) {
        const VectorXd a = kp_residual(p, s, t, lam), b = kp_residual_definition(p, s, t, lam);
        CHECK(max_abs(a - b) <= 1e-10 * std::max(1.0, max_abs(a)));
      }
    }
  }
}

TEST_CASE("KP Jacobian") {
  for (const auto& [L, rho] : {std::pair{2, 1}, std::pair{4, 2}}) {
    const CCProblem p = hubbard(L, 3.0);
    const SplitSpec s = make_split(p, rho);
    const VectorXd t = random_vec<double>(p.dim(), 7, 0.2);
    CHECK(max_abs(kp_jacobian(p, s, t, 1.0) - jacobian<double>(p, t)) == 0.0);
    for (double lam : {0.0, 0.5}) {
      const MatrixXd J = kp_jacobian(p, s, t, lam);
      MatrixXd fd(p.dim(), p.dim());
      const double h = 1e-5;
      for (int a = 0; a < p.dim(); ++a) {
        VectorXd tp = t, tm = t;
        tp(a) += h;
        tm(a) -= h;
        fd.col(a) = (kp_residual(p, s, tp, lam) - kp_residual(p, s, tm, lam)) / (2 * h);
      }
      CHECK(max_abs(J - fd) <= 1e-6);
    }
  }
}

TEST_CASE("KP energy") {
  const CCProblem p = hubbard(4, 2.0);
  const SplitSpec s = make_split(p, 2);
  const VectorXd t = random_vec<double>(p.dim(), 5, 0.3);
  CHECK(kp_energy(p, s, t, 1.0) == doctest::Approx(cc_energy<double>(p, t)).epsilon(1e-14));
  CHECK(kp_energy(p, s, t, 0.0) == doctest::Approx(cc_energy<double>(p, s.project0(t))).epsilon(1e-14));
  const double e0 = cc_energy<double>(p, s.project0(t));
  for (std::uint64_t seed = 11; seed < 16; ++seed) {
    const VectorXd ta = s.project_angle(random_vec<double>(p.dim(), seed, 1.0));
    for (double lam : {0.0, 0.3, 0.9, 1.0}) CHECK(std::abs(kp_energy(p, s, s.project0(t) + ta, lam) - e0) <= 1e-12);
  }
}

TEST_CASE("Gamma operator") {
  for (const auto& [L, rho] : {std::pair{2, 1}, std::pair{4, 2}}) {
    const CCProblem p = hubbard(L, 3.0);
    const SplitSpec s = make_split(p, rho);
    const VectorXd t = random_vec<double>(p.dim(), 9, 0.3);
    for (double lam : {0.0, 0.25, 0.7}) {
      const MatrixXd G = kp_g_operator(p, s, t, lam);
      const MatrixXd Gam = gamma_operator(p, s, t, lam);
      CHECK(max_abs(G - (1 - lam) * Gam) <= 1e-10 * std::max(1.0, max_abs(G)));
    }
    CHECK(max_abs(gamma_operator(p, s, s.project0(t), 0.4)) == 0.0);
    CHECK(max_abs(kp_g_operator(p, s, t, 1.0)) == 0.0);
  }
}

TEST_CASE("KP path from the dimer ground state") {
  const Traced& tr = dimer_kp();
  const CCProblem& p = tr.p;
  REQUIRE(tr.path.complete);
  const PathPoint& end = tr.path.points.back();
  CHECK(end.lambda == 0.0);
  for (const PathPoint& pt : tr.path.points) CHECK(pt.residual_inf <= 1e-10);
  CHECK(tr.path.sign_flips.empty());

  const CCProblem trunc = with_scheme(p, TruncationScheme::up_to(1));
  const VectorXd t0 = transfer<double>(p.sp(), trunc.sp(), tr.split.project0(end.t));
  CHECK(cc_residual<double>(trunc, t0).cwiseAbs().maxCoeff() <= 1e-9);

  const KPBlockSpectra bs = kp_block_spectra(p, tr.split, end.t);
  CHECK(bs.upper_right == 0.0);
  const MatrixXd J = kp_jacobian(p, tr.split, end.t, 0.0);
  Eigen::VectorXcd joined(bs.zero_block.size() + bs.angle_block.size());
  joined << bs.zero_block, bs.angle_block;
  const auto a = sorted(eigenvalues<double>(J)), b = sorted(joined);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-8);
  CHECK(bs.index == det_sign<double>(J));
  CHECK(bs.index == tr.path.points.front().sgn_det);
  CHECK(end.sgn_det == tr.path.points.front().sgn_det);
}

TEST_CASE("KP path on the four-site chain") {
  const Traced& tr = chain_kp();
  const CCProblem& p = tr.p;
  REQUIRE(tr.path.complete);
  const PathPoint& end = tr.path.points.back();
  CHECK(end.lambda == 0.0);
  CHECK(end.residual_inf <= 1e-10);

  const CCProblem ccsd = with_scheme(p, TruncationScheme::up_to(2));
  const VectorXd t0 = transfer<double>(p.sp(), ccsd.sp(), tr.split.project0(end.t));
  CHECK(cc_residual<double>(ccsd, t0).cwiseAbs().maxCoeff() <= 1e-9);
  for (const PathPoint& pt : tr.path.points)
    CHECK(std::abs(pt.e_kp - cc_energy<double>(p, tr.split.project0(pt.t))) <= 1e-12);

  const KPBlockSpectra bs = kp_block_spectra(p, tr.split, end.t);
  CHECK(bs.index == det_sign<double>(kp_jacobian(p, tr.split, end.t, 0.0)));
  if (tr.path.sign_flips.empty()) CHECK(bs.index == tr.path.points.front().sgn_det);
}

TEST_CASE("frozen path reproduces the start") {
  const CCProblem p = hubbard(2, 4.0);
  const VectorXd t = ground_zero(p);
  PathOptions o;
  o.lambda_end = 1.0;
  const Path path = trace_path(p, {HomotopyKind::kp, make_split(p, 1), {}}, as_start(p, t), o);
  REQUIRE(path.points.size() == 1u);
  CHECK(path.complete);
  CHECK(path.points[0].t == t);
  CHECK(path.points[0].lambda == 1.0);
}

TEST_CASE("path start must be a zero") {
  const CCProblem p = hubbard(2, 4.0);
  CHECK_THROWS_AS(trace_path(p, {HomotopyKind::kp, make_split(p, 1), {}}, as_start(p, VectorXd::Ones(p.dim()))),
                  ValidationError);
}

TEST_CASE("linear homotopy") {
  const CCProblem p = hubbard(2, 4.0);
  const SplitSpec s = make_subspace_split(p, TruncationScheme::doubles_only());
  const VectorXd t_star = ground_zero(p);
  LinearParams lin{1.0, s.project_angle(t_star)};

  const VectorXd t = random_vec<double>(p.dim(), 4, 0.3);
  CHECK(max_abs(linear_residual(p, s, t, 1.0, lin) - cc_residual<double>(p, t)) == 0.0);
  for (double lam : {0.0, 0.6}) {
    const MatrixXd J = linear_jacobian(p, s, t, lam, lin);
    MatrixXd fd(p.dim(), p.dim());
    for (int a = 0; a < p.dim(); ++a) {
      VectorXd tp = t, tm = t;
      tp(a) += 1e-5;
      tm(a) -= 1e-5;
      fd.col(a) = (linear_residual(p, s, tp, lam, lin) - linear_residual(p, s, tm, lam, lin)) / 2e-5;
    }
    CHECK(max_abs(J - fd) <= 1e-6);
  }

  const Path path = trace_path(p, {HomotopyKind::linear, s, lin}, as_start(p, t_star));
  REQUIRE(path.complete);
  const VectorXd end = path.points.back().t;
  CHECK(max_abs(s.project_angle(end) - lin.u_perp) <= 1e-9);
  const CCProblem ccd = with_scheme(p, TruncationScheme::doubles_only());
  CHECK(cc_residual<double>(ccd, transfer<double>(p.sp(), ccd.sp(), s.project0(end))).cwiseAbs().maxCoeff() <=
        1e-9);

  CHECK_THROWS_AS(linear_residual(p, s, t, 0.5, {0.0, lin.u_perp}), ValidationError);

  const CCProblem free = hubbard(2, 0.0);
  const SplitSpec sf = make_subspace_split(free, TruncationScheme::doubles_only());
  const VectorXd zero = VectorXd::Zero(free.dim());
  for (double lam : {0.0, 0.3, 1.0}) CHECK(max_abs(linear_residual(free, sf, zero, lam, {2.0, zero})) <= 1e-14);
}

TEST_CASE("KP theorem identity") {
  SUBCASE("exact reference") {
    const CCProblem p = hubbard(2, 0.0);
    const SplitSpec s = make_split(p, 1);
    const VectorXd zero = VectorXd::Zero(p.dim());
    const Path path = trace_path(p, {HomotopyKind::kp, s, {}}, as_start(p, zero));
    REQUIRE(path.complete);
    const VectorXd psi = reference_vector<double>(p.sp());
    for (const PathPoint& pt : path.points) {
      const KPVerifyReport r = kp_verify(p, s, psi, p.H(0, 0), pt.t, pt.lambda);
      CHECK(r.in_v0);
      CHECK(std::abs(r.energy_gap) <= 1e-12);
      CHECK(r.residual <= 1e-12);
    }
  }
  SUBCASE("dimer ground state along the path") {
    const Traced& tr = dimer_kp();
    const FciResult f = fci_solve(tr.p.H);
    for (const PathPoint& pt : tr.path.points) {
      const KPVerifyReport r = kp_verify(tr.p, tr.split, f.vectors.col(0), f.values(0), pt.t, pt.lambda);
      CHECK(r.residual <= 1e-9);
    }
  }
  SUBCASE("four-site chain endpoint") {
    const Traced& tr = chain_kp();
    const FciResult f = fci_solve(tr.p.H);
    const PathPoint& end = tr.path.points.back();
    const KPVerifyReport r = kp_verify(tr.p, tr.split, f.vectors.col(0), f.values(0), end.t, 0.0);
    CHECK(r.residual <= 1e-9);
    CHECK(std::abs(r.lhs) > 1e-8);
  }
  SUBCASE("orthogonal eigenvector is refused") {
    const Traced& tr = dimer_kp();
    const FciResult f = fci_solve(tr.p.H);
    const PathPoint& end = tr.path.points.back();
    const VectorXd eS =
        exp_apply<double>(tr.p.sp(), tr.split.project0(end.t), reference_vector<double>(tr.p.sp()));
    int refused = 0;
    for (int k = 0; k < f.values.size(); ++k) {
      if (std::abs(eS.dot(f.vectors.col(k))) > 1e-13) continue;
      CHECK_THROWS_AS(kp_verify(tr.p, tr.split, f.vectors.col(k), f.values(k), end.t, 0.0), NumericalError);
      ++refused;
    }
    CHECK(refused >= 1);
  }
}

TEST_CASE("energy error estimate") {
  SUBCASE("vanishing auxiliary amplitudes") {
    const CCProblem p = hubbard(2, 0.0);
    const VectorXd zero = VectorXd::Zero(p.dim());
    const ErrorEstimateReport r = energy_error_estimate(p, make_split(p, 1), zero, zero);
    CHECK(r.bound == 0.0);
    CHECK(r.actual <= 1e-14);
    CHECK(r.holds);
  }
  SUBCASE("dimer") {
    const Traced& tr = dimer_kp();
    const ErrorEstimateReport r = energy_error_estimate(tr.p, tr.split, tr.path.points.back().t, tr.t_star);
    CHECK(r.kappa > 0.0);
    CHECK(r.m_samples == 256);
    CHECK(r.actual <= r.bound);
    CHECK(r.holds);
  }
  SUBCASE("four-site chain") {
    const Traced& tr = chain_kp();
    const VectorXd& tkp = tr.path.points.back().t;
    const ErrorEstimateReport r = energy_error_estimate(tr.p, tr.split, tkp, tr.t_star);
    const double e_star = cc_energy<double>(tr.p, tr.t_star);
    CHECK(r.actual == doctest::Approx(std::abs(kp_energy(tr.p, tr.split, tkp, 0.0) - e_star)).epsilon(1e-12));
    CHECK(std::abs(r.actual - r.actual_full) <= 1e-12);
    CHECK(r.holds);
  }
}

TEST_CASE("KP existence constants") {
  SUBCASE("exact reference") {
    const CCProblem p = hubbard(2, 0.0);
    const KPExistenceReport r = kp_existence_report(p, make_split(p, 1), VectorXd::Zero(p.dim()));
    CHECK(r.Delta <= 1e-12);
    CHECK(r.g == 0.0);
    CHECK(r.alpha == 0.0);
    CHECK(r.condition_i == (r.gamma0 > r.M_delta * r.delta));
    CHECK(r.condition_i);
  }
  SUBCASE("weak and strong coupling") {
    const CCProblem weak = hubbard(2, 0.1), strong = hubbard(2, 8.0);
    const KPExistenceReport rw = kp_existence_report(weak, make_split(weak, 1), ground_zero(weak));
    CHECK(rw.condition_i);
    CHECK(rw.condition_ii);
    const KPExistenceReport rs = kp_existence_report(strong, make_split(strong, 1), ground_zero(strong));
    CHECK_FALSE((rs.condition_i && rs.condition_ii));
    CHECK(rs.samples == 256);
  }
  SUBCASE("Theta solves its defining relation") {
    const CCProblem p = hubbard(2, 4.0);
    const VectorXd t = ground_zero(p);
    const MatrixXd J = jacobian<double>(p, t);
    for (NormKind norm : {NormKind::ell2, NormKind::fock}) {
      ExistenceOptions o;
      o.norm = norm;
      o.alpha = 0.7;
      o.samples = 16;
      const KPExistenceReport r = kp_existence_report(p, make_split(p, 1), t, o);
      const VectorXd G = norm == NormKind::fock ? p.fock.eps : VectorXd::Ones(p.dim());
      for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        const VectorXd u = random_vec<double>(p.dim(), seed, 1.0), v = random_vec<double>(p.dim(), seed + 50, 1.0);
        const double lhs = (r.Theta * v).dot(J * u);
        const double rhs = v.dot(J * u + 0.7 * G.cwiseProduct(u));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
      }
      CHECK(r.g == 0.0);
    }
  }
  SUBCASE("degenerate zero is rejected") {
    const fixture::FoldCase fc = fixture::ground_branch_fold();
    CHECK_THROWS_AS(kp_existence_report(fc.problem, make_split(fc.problem, 1), fc.fold.t), ValidationError);
  }
}
