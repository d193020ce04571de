// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0
//
// Shared problem builders for the test suites and the acceptance run.

#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "ccdeg/analysis.hpp"

namespace fixture {

using namespace ccdeg;

inline CCProblem hubbard(int L, double U, const TruncationScheme& scheme = TruncationScheme::full()) {
  return setup_problem(build_model({HubbardChain{L, 1.0, U, false}, L}), L, scheme).problem;
}

inline CCProblem random_problem(std::uint64_t seed, const TruncationScheme& scheme = TruncationScheme::full()) {
  return setup_problem(build_model({RandomModel{6, seed, 0.3}, 3}), 3, scheme).problem;
}

template <class S>
Vec<S> random_vec(int n, std::uint64_t seed, double scale) {
  Uniform u(seed);
  Vec<S> v(n);
  for (int i = 0; i < n; ++i) {
    if constexpr (std::is_same_v<S, cplx>) {
      const double re = u(), im = u();
      v(i) = scale * cplx(re, im);
    } else {
      v(i) = scale * u();
    }
  }
  return v;
}

// Zero of the full-space map built from an FCI eigenvector.
inline Eigen::VectorXd fcc_zero(const CCProblem& p, const Eigen::VectorXd& psi) {
  return cluster_log<double>(*p.full, intermediate_coefficients<double>(*p.full, psi));
}

// One-parameter family of site Hamiltonians expressed in a fixed orbital
// basis (the SCF orbitals at s0), so amplitudes are comparable across s.
struct Family {
  std::function<Integrals(double)> site;
  int N;
  TruncationScheme scheme;
  Eigen::MatrixXd C;

  Family(std::function<Integrals(double)> f, int n, TruncationScheme sc, double s0)
      : site(std::move(f)), N(n), scheme(std::move(sc)) {
    C = scf_solve(site(s0), N).C;
  }

  CCProblem operator()(double s) const {
    const Integrals mo = to_mo_basis(site(s), C);
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(mo.K, mo.K);
    for (int i = 0; i < N; ++i) g(i, i) = 1.0;
    return make_problem(mo, N, scheme, fock_matrix(mo, g).diagonal());
  }
};

// Random K=6, N=3 model with the two-body part scaled by s, CCSD amplitudes.
inline Family scaled_random_family(std::uint64_t seed) {
  const Integrals base = build_model({RandomModel{6, seed, 1.0}, 3});
  return Family(
      [base](double s) {
        Integrals I = base;
        for (double& x : I.w) x *= s;
        return I;
      },
      3, TruncationScheme::up_to(2), 1.0);
}

struct Fold {
  double s = 0.0;
  Eigen::VectorXd t;
};

// Newton on (t, s) for A(t; s) = 0 together with the bordered singularity
// condition g(t, s) = 0.
inline std::optional<Fold> locate_fold(const Family& fam, double s, const Eigen::VectorXd& t0) {
  const int d = static_cast<int>(t0.size());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jacobian<double>(fam(s), t0), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd b = svd.matrixU().col(d - 1), c = svd.matrixV().col(d - 1);
  auto F = [&](const Eigen::VectorXd& x) {
    const CCProblem p = fam(x(d));
    const Eigen::VectorXd t = x.head(d);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d + 1, d + 1);
    M.topLeftCorner(d, d) = jacobian<double>(p, t);
    M.topRightCorner(d, 1) = b;
    M.bottomLeftCorner(1, d) = c.transpose();
    const Eigen::VectorXd vg = M.fullPivLu().solve(Eigen::VectorXd::Unit(d + 1, d));
    Eigen::VectorXd out(d + 1);
    out << cc_residual<double>(p, t), vg(d);
    return out;
  };
  Eigen::VectorXd x(d + 1);
  x << t0, s;
  for (int it = 0; it < 40; ++it) {
    const Eigen::VectorXd f = F(x);
    if (f.cwiseAbs().maxCoeff() < 1e-14) break;
    Eigen::MatrixXd Jx(d + 1, d + 1);
    for (int k = 0; k <= d; ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(x(k)));
      Eigen::VectorXd xp = x, xm = x;
      xp(k) += h;
      xm(k) -= h;
      Jx.col(k) = (F(xp) - F(xm)) / (2 * h);
    }
    const Eigen::VectorXd dx = Jx.fullPivLu().solve(-f);
    x += dx;
    if (!x.allFinite()) return std::nullopt;
    if (dx.norm() < 1e-15 * std::max(1.0, x.norm())) break;
  }
  if (!(F(x).cwiseAbs().maxCoeff() < 1e-11)) return std::nullopt;
  return Fold{x(d), x.head(d)};
}

// Natural-parameter continuation of a zero from s until the branch turns;
// returns the last point reached.
inline std::pair<double, Eigen::VectorXd> continue_branch(const Family& fam, double s, Eigen::VectorXd t, double ds,
                                                          double s_stop) {
  while ((ds > 0 ? s < s_stop : s > s_stop) && std::abs(ds) > 1e-7) {
    const CCSolution<double> r = newton_solve<double>(fam(s + ds), t);
    if (!r.converged || (r.t - t).norm() > 0.05 * std::max(1.0, t.norm())) {
      ds /= 2;
      continue;
    }
    t = r.t;
    s += ds;
  }
  return {s, t};
}

// Fold of the CCSD ground branch of the scaled random model (seed 1),
// reached by lowering the two-body scale from 1.
struct FoldCase {
  CCProblem problem;
  Fold fold;
};

inline FoldCase ground_branch_fold() {
  const Family fam = scaled_random_family(1);
  const CCProblem p1 = fam(1.0);
  const CCSolution<double> g = newton_solve<double>(p1, Eigen::VectorXd::Zero(p1.dim()));
  auto [s, t] = continue_branch(fam, 1.0, g.t, -0.02, -2.0);
  const std::optional<Fold> f = locate_fold(fam, s, t);
  if (!f) throw NumericalError("fold not located");
  return {fam(f->s), *f};
}

}  // namespace fixture
