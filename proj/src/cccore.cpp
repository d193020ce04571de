// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0

#include "ccdeg/cccore.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>

namespace ccdeg {

CCProblem make_problem(const Integrals& mo_ints, int N, const TruncationScheme& scheme,
                       const Eigen::VectorXd& lambdas) {
  if (lambdas.size() != mo_ints.K) throw ValidationError("make_problem: need one orbital energy per orbital");
  CCProblem p;
  p.ints = mo_ints;
  p.basis = OrbitalBasis(mo_ints.K, N);
  p.sector = std::make_shared<const DeterminantSpace>(p.basis);
  p.full = std::make_shared<const AmplitudeSpace>(p.sector, TruncationScheme::full());
  p.space = scheme.kind == TruncationScheme::Kind::full ? p.full
                                                        : std::make_shared<const AmplitudeSpace>(p.sector, scheme);
  if (p.space->dim() == 0) throw ValidationError("truncation scheme " + scheme.name() + " has no excitations");
  p.H = hamiltonian_matrix(mo_ints, *p.sector);
  p.lambdas = lambdas;
  p.fock = fock_data(lambdas, *p.sector, p.space->excitations(), p.H);
  p.eps_full = fock_data(lambdas, *p.sector, p.full->excitations(), p.H).eps;
  return p;
}

CCProblem with_scheme(const CCProblem& p, const TruncationScheme& scheme) {
  CCProblem q = p;
  q.space = scheme.kind == TruncationScheme::Kind::full ? p.full
                                                        : std::make_shared<const AmplitudeSpace>(p.sector, scheme);
  if (q.space->dim() == 0) throw ValidationError("truncation scheme " + scheme.name() + " has no excitations");
  q.fock.eps.resize(q.space->dim());
  for (int a = 0; a < q.space->dim(); ++a) q.fock.eps(a) = excitation_energy(p.lambdas, q.space->excitation(a));
  return q;
}

ProblemSetup setup_problem(const Integrals& site_ints, int N, const TruncationScheme& scheme,
                           const ScfOptions& scf) {
  MeanFieldResult mf = scf_solve(site_ints, N, scf);
  CCProblem p = make_problem(to_mo_basis(site_ints, mf.C), N, scheme, mf.lambdas);
  return {std::move(mf), std::move(p)};
}

template <class S>
Mat<S> sim_transform(const CCProblem& p, const Mat<S>& op, const Vec<S>& t) {
  return exp_matrix<S>(p.sp(), -t) * op * exp_matrix<S>(p.sp(), t);
}

template <class S>
Mat<S> sim_hamiltonian(const CCProblem& p, const Vec<S>& t) {
  return sim_transform<S>(p, promote<S>(p.H), t);
}

template <class S>
Mat<S> bch_series(const Mat<S>& op, const Mat<S>& T, int order) {
  Mat<S> nested = op, sum = op;
  double fact = 1.0;
  for (int j = 1; j <= order; ++j) {
    nested = nested * T - T * nested;
    fact *= j;
    sum += nested / S(fact);
  }
  return sum;
}

template <class S>
Mat<S> sim_hamiltonian_bch(const CCProblem& p, const Vec<S>& t) {
  return bch_series<S>(promote<S>(p.H), cluster_matrix<S>(p.sp(), t), 4);
}

template <class S>
Vec<S> sim_reference(const CCProblem& p, const Vec<S>& t) {
  const Vec<S> w = p.H * exp_apply<S>(p.sp(), t, reference_vector<S>(p.sp()));
  return exp_apply<S>(p.sp(), -t, w);
}

template <class S>
Vec<S> cc_residual(const CCProblem& p, const Vec<S>& t) {
  return components<S>(p.sp(), sim_reference<S>(p, t));
}

template <class S>
S cc_energy(const CCProblem& p, const Vec<S>& t) {
  const Vec<S> w = exp_apply<S>(p.sp(), t, reference_vector<S>(p.sp()));
  return p.H.row(0).template cast<S>().dot(w);
}

template <class S>
Mat<S> modified_hamiltonian(const CCProblem& p, const Vec<S>& t) {
  Mat<S> Ht = sim_hamiltonian<S>(p, t);
  if (p.space->is_full()) return Ht;
  const AmplitudeSpace& full = *p.full;
  const Vec<S> g = Ht.col(0);
  Vec<S> coef = components<S>(full, g);
  for (int a = 0; a < full.dim(); ++a)
    if (p.space->index_of(full.excitation(a)) >= 0) coef(a) = S(0);
  return Ht - cluster_matrix<S>(full, coef);
}

template <class S>
Mat<S> v_block(const AmplitudeSpace& sp, const Mat<S>& op) {
  const int d = sp.dim();
  Mat<S> m(d, d);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) m(b, a) = S(sp.phase(a) * sp.phase(b)) * op(sp.det_index(b), sp.det_index(a));
  return m;
}

template <class S>
Mat<S> jacobian(const CCProblem& p, const Vec<S>& t, JacobianForm form) {
  const AmplitudeSpace& sp = p.sp();
  const int d = sp.dim();
  Mat<S> J(d, d);
  if (form == JacobianForm::at_zero) {
    J = v_block<S>(sp, modified_hamiltonian<S>(p, t));
    J.diagonal().array() -= cc_energy<S>(p, t);
    return J;
  }
  const Mat<S> Ht = sim_hamiltonian<S>(p, t);
  const Vec<S> g = Ht.col(0);
  for (int a = 0; a < d; ++a) {
    Vec<S> col = S(sp.phase(a)) * Ht.col(sp.det_index(a));
    for (const auto& m : sp.action(a)) col(m.to) -= S(m.sign) * g(m.from);
    J.col(a) = components<S>(sp, col);
  }
  return J;
}

template <class S>
Mat<S> jacobian_fd(const CCProblem& p, const Vec<S>& t, double step) {
  const int d = p.dim();
  Mat<S> J(d, d);
  for (int a = 0; a < d; ++a) {
    Vec<S> tp = t, tm = t;
    tp(a) += S(step);
    tm(a) -= S(step);
    J.col(a) = (cc_residual<S>(p, tp) - cc_residual<S>(p, tm)) / S(2 * step);
  }
  return J;
}

template <class S>
Vec<S> commutator2_apply(const AmplitudeSpace& sp, const Mat<S>& A, const Vec<S>& u, const Vec<S>& v) {
  const Vec<S> phi = reference_vector<S>(sp);
  const Vec<S> Uphi = cluster_apply<S>(sp, u, phi);
  const Vec<S> Vphi = cluster_apply<S>(sp, v, phi);
  const Vec<S> Aphi = A * phi;
  Vec<S> out = A * cluster_apply<S>(sp, u, Vphi);
  out -= cluster_apply<S>(sp, u, Vec<S>(A * Vphi));
  out -= cluster_apply<S>(sp, v, Vec<S>(A * Uphi));
  out += cluster_apply<S>(sp, v, cluster_apply<S>(sp, u, Aphi));
  return components<S>(sp, out);
}

template <class S>
Vec<S> hessian_apply(const CCProblem& p, const Vec<S>& t, const Vec<S>& u, const Vec<S>& v, bool fluctuation) {
  const Mat<S> A = fluctuation ? sim_transform<S>(p, promote<S>(p.fock.fluct), t) : sim_hamiltonian<S>(p, t);
  return commutator2_apply<S>(p.sp(), A, u, v);
}

template <class S>
CCSolution<S> newton_solve(const CCProblem& p, const Vec<S>& t0, const NewtonOptions& opts, const Vec<S>* rhs) {
  if (t0.size() != p.dim()) throw ValidationError("newton_solve: start vector has wrong dimension");
  if (opts.tol <= 0.0) throw ValidationError("newton_solve: tol must be positive");
  auto residual = [&](const Vec<S>& t) -> Vec<S> {
    Vec<S> r = cc_residual<S>(p, t);
    if (rhs) r -= *rhs;
    return r;
  };
  auto jac = [&](const Vec<S>& t) -> Mat<S> {
    return opts.fd_jacobian ? jacobian_fd<S>(p, t) : jacobian<S>(p, t);
  };
  NewtonResult<S> nr = damped_newton<S>(residual, jac, t0, opts);
  CCSolution<S> sol;
  sol.t = std::move(nr.x);
  sol.energy = cc_energy<S>(p, sol.t);
  sol.residual_inf = nr.residual_inf;
  sol.converged = nr.converged;
  sol.iterations = nr.iterations;
  sol.singular_steps = nr.singular_steps;
  return sol;
}

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("CC_DEGREE_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) n = std::min(n, cap);
    } catch (const std::logic_error&) {
    }
  }
  return n;
}

template <class S>
std::vector<CCSolution<S>> multistart_solve(const CCProblem& p, const Sampler& sampler, const NewtonOptions& opts,
                                            const Vec<S>* center, const Vec<S>* rhs, double dedup) {
  if (sampler.count < 1) throw ValidationError("multistart: count must be at least 1");
  const int d = p.dim();
  Uniform u(sampler.seed);
  std::vector<Vec<S>> starts(sampler.count);
  for (auto& s : starts) {
    s = center ? *center : Vec<S>::Zero(d);
    for (int a = 0; a < d; ++a) {
      if constexpr (std::is_same_v<S, cplx>) {
        const double re = u(), im = u();
        s(a) += sampler.radius * cplx(re, im);
      } else {
        s(a) += sampler.radius * u();
      }
    }
  }
  std::vector<CCSolution<S>> results(starts.size());
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i; (i = next.fetch_add(1)) < static_cast<int>(starts.size());) {
      results[i] = newton_solve<S>(p, starts[i], opts, rhs);
      results[i].start_index = i;
    }
  };
  const int nthreads = std::min<int>(worker_count(), static_cast<int>(starts.size()));
  std::vector<std::thread> pool;
  for (int k = 1; k < nthreads; ++k) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  std::vector<CCSolution<S>> kept;
  for (auto& r : results) {
    if (!r.converged) continue;
    const bool dup = std::any_of(kept.begin(), kept.end(), [&](const auto& k) { return (k.t - r.t).norm() <= dedup; });
    if (!dup) kept.push_back(std::move(r));
  }
  return kept;
}

#define CCDEG_INSTANTIATE(S)                                                                                   \
  template Mat<S> sim_transform(const CCProblem&, const Mat<S>&, const Vec<S>&);                               \
  template Mat<S> sim_hamiltonian(const CCProblem&, const Vec<S>&);                                            \
  template Mat<S> bch_series(const Mat<S>&, const Mat<S>&, int);                                               \
  template Mat<S> sim_hamiltonian_bch(const CCProblem&, const Vec<S>&);                                        \
  template Vec<S> sim_reference(const CCProblem&, const Vec<S>&);                                              \
  template Vec<S> cc_residual(const CCProblem&, const Vec<S>&);                                                \
  template S cc_energy(const CCProblem&, const Vec<S>&);                                                       \
  template Mat<S> modified_hamiltonian(const CCProblem&, const Vec<S>&);                                       \
  template Mat<S> v_block(const AmplitudeSpace&, const Mat<S>&);                                              \
  template Mat<S> jacobian(const CCProblem&, const Vec<S>&, JacobianForm);                                     \
  template Mat<S> jacobian_fd(const CCProblem&, const Vec<S>&, double);                                        \
  template Vec<S> commutator2_apply(const AmplitudeSpace&, const Mat<S>&, const Vec<S>&, const Vec<S>&);       \
  template Vec<S> hessian_apply(const CCProblem&, const Vec<S>&, const Vec<S>&, const Vec<S>&, bool);          \
  template CCSolution<S> newton_solve(const CCProblem&, const Vec<S>&, const NewtonOptions&, const Vec<S>*);   \
  template std::vector<CCSolution<S>> multistart_solve(const CCProblem&, const Sampler&, const NewtonOptions&, \
                                                       const Vec<S>*, const Vec<S>*, double);

CCDEG_INSTANTIATE(double)
CCDEG_INSTANTIATE(cplx)

}  // namespace ccdeg
