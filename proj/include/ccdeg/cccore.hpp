// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ccdeg/cluster.hpp"
#include "ccdeg/models.hpp"
#include "ccdeg/newton.hpp"

namespace ccdeg {

struct CCProblem {
  Integrals ints;  // MO basis
  OrbitalBasis basis;
  std::shared_ptr<const DeterminantSpace> sector;
  std::shared_ptr<const AmplitudeSpace> space;
  std::shared_ptr<const AmplitudeSpace> full;
  DenseOperator H;
  Eigen::VectorXd lambdas;
  FockData fock;  // eps over `space`
  Eigen::VectorXd eps_full;

  const AmplitudeSpace& sp() const { return *space; }
  int dim() const { return space->dim(); }
};

// The integrals must already be in the canonical MO basis with orbital
// energies `lambdas`; the reference occupies orbitals 0..N-1.
CCProblem make_problem(const Integrals& mo_ints, int N, const TruncationScheme& scheme,
                       const Eigen::VectorXd& lambdas);
// Same Hamiltonian, different amplitude space.
CCProblem with_scheme(const CCProblem& p, const TruncationScheme& scheme);

struct ProblemSetup {
  MeanFieldResult mf;
  CCProblem problem;
};

// SCF, MO transform and problem assembly in one step.
ProblemSetup setup_problem(const Integrals& site_ints, int N, const TruncationScheme& scheme,
                           const ScfOptions& scf = {});

// e^{-T} op e^{T}
template <class S>
Mat<S> sim_transform(const CCProblem& p, const Mat<S>& op, const Vec<S>& t);
template <class S>
Mat<S> sim_hamiltonian(const CCProblem& p, const Vec<S>& t);
// sum_{j<=order} [op, T]_(j) / j!
template <class S>
Mat<S> bch_series(const Mat<S>& op, const Mat<S>& T, int order);
template <class S>
Mat<S> sim_hamiltonian_bch(const CCProblem& p, const Vec<S>& t);

// e^{-T} H e^{T} Phi0
template <class S>
Vec<S> sim_reference(const CCProblem& p, const Vec<S>& t);
template <class S>
Vec<S> cc_residual(const CCProblem& p, const Vec<S>& t);
template <class S>
S cc_energy(const CCProblem& p, const Vec<S>& t);
template <class S>
Mat<S> modified_hamiltonian(const CCProblem& p, const Vec<S>& t);

// Block of a sector operator on span{Phi_a = X_a Phi0 : a in sp}.
template <class S>
Mat<S> v_block(const AmplitudeSpace& sp, const Mat<S>& op);

enum class JacobianForm { general, at_zero };

template <class S>
Mat<S> jacobian(const CCProblem& p, const Vec<S>& t, JacobianForm form = JacobianForm::general);
template <class S>
Mat<S> jacobian_fd(const CCProblem& p, const Vec<S>& t, double step = 1e-5);

// [[A, U], V] Phi0 projected on the amplitude space, for a given operator A.
template <class S>
Vec<S> commutator2_apply(const AmplitudeSpace& sp, const Mat<S>& A, const Vec<S>& u, const Vec<S>& v);
// A''(t)(u, v); with `fluctuation` the transformed W replaces H.
template <class S>
Vec<S> hessian_apply(const CCProblem& p, const Vec<S>& t, const Vec<S>& u, const Vec<S>& v,
                     bool fluctuation = false);

template <class S>
struct CCSolution {
  Vec<S> t;
  S energy{};
  double residual_inf = 0.0;
  bool converged = false;
  int iterations = 0;
  int singular_steps = 0;
  int start_index = 0;
};

template <class S>
CCSolution<S> newton_solve(const CCProblem& p, const Vec<S>& t0, const NewtonOptions& opts = {},
                           const Vec<S>* rhs = nullptr);

struct Sampler {
  std::uint64_t seed = 1;
  double radius = 1.0;
  int count = 16;
};

// Distinct converged zeros (l2 distance > dedup) in order of first
// discovery. Starts are uniform in the box `center +- radius`.
template <class S>
std::vector<CCSolution<S>> multistart_solve(const CCProblem& p, const Sampler& sampler,
                                            const NewtonOptions& opts = {}, const Vec<S>* center = nullptr,
                                            const Vec<S>* rhs = nullptr, double dedup = 1e-6);

// Worker threads: hardware concurrency capped by CC_DEGREE_THREADS.
int worker_count();

}  // namespace ccdeg
