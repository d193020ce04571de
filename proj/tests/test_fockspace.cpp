// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <random>

#include "ccdeg/fockspace.hpp"
#include "ccdeg/models.hpp"
#include "oracles.hpp"

using namespace ccdeg;

namespace {

Mask bits(std::initializer_list<int> one_based) {
  Mask m = 0;
  for (int p : one_based) m |= Mask{1} << (p - 1);
  return m;
}

}  // namespace

TEST_CASE("ladder phases") {
  auto c = apply_ladder(0, LadderKind::create, Determinant{0});
  REQUIRE(c);
  CHECK(c->sign == 1);
  CHECK(c->det.occ == bits({1}));

  auto a1 = apply_ladder(0, LadderKind::annihilate, Determinant{bits({1, 2})});
  CHECK(a1->sign == 1);
  CHECK(a1->det.occ == bits({2}));
  auto a2 = apply_ladder(1, LadderKind::annihilate, Determinant{bits({1, 2})});
  CHECK(a2->sign == -1);
  CHECK(a2->det.occ == bits({1}));

  auto once = apply_ladder(3, LadderKind::create, Determinant{bits({2})});
  REQUIRE(once);
  CHECK_FALSE(apply_ladder(3, LadderKind::create, once->det));
  CHECK_FALSE(apply_ladder(2, LadderKind::annihilate, Determinant{bits({1, 2})}));
}

TEST_CASE("excitation strings") {
  const Determinant ref{bits({1, 2})};
  auto id = apply_excitation(Excitation{}, ref);
  CHECK(id->sign == 1);
  CHECK(id->det == ref);

  // a_1 gives +{2}; a+_3 then passes the occupied orbital 2, so the phase is -1.
  auto x = apply_excitation(Excitation{{0}, {2}}, ref);
  REQUIRE(x);
  CHECK(x->det.occ == bits({2, 3}));
  auto by_hand = apply_ladder(0, LadderKind::annihilate, ref);
  auto by_hand2 = apply_ladder(2, LadderKind::create, by_hand->det);
  CHECK(x->sign == by_hand->sign * by_hand2->sign);
  CHECK(x->sign == -1);

  // pairs of excitations from the reference commute on any determinant
  const OrbitalBasis basis(6, 3);
  const DeterminantSpace sp(basis);
  std::vector<Excitation> xs = {{{0}, {3}}, {{1}, {4}}, {{0, 2}, {4, 5}}, {{2}, {5}}, {{1, 2}, {3, 5}}};
  for (const auto& a : xs)
    for (const auto& b : xs)
      for (int i = 0; i < sp.size(); ++i) {
        auto ab = apply_excitation(b, sp.det(i));
        auto ab2 = ab ? apply_excitation(a, ab->det) : std::nullopt;
        auto ba = apply_excitation(a, sp.det(i));
        auto ba2 = ba ? apply_excitation(b, ba->det) : std::nullopt;
        REQUIRE(bool(ab2) == bool(ba2));
        if (ab2) {
          CHECK(ab2->det == ba2->det);
          CHECK(ab->sign * ab2->sign == ba->sign * ba2->sign);
        }
        if (a == b) CHECK_FALSE(ab2);
      }
}

TEST_CASE("determinant space ordering") {
  const DeterminantSpace sp(OrbitalBasis(4, 2));
  REQUIRE(sp.size() == 6);
  CHECK(sp.det(0).occ == bits({1, 2}));
  for (int i = 1; i < sp.size(); ++i) CHECK(sp.det(i - 1).occ < sp.det(i).occ);
  for (int i = 0; i < sp.size(); ++i) CHECK(sp.index(sp.det(i).occ) == i);
  CHECK(sp.index(bits({1})) == -1);
  CHECK(DeterminantSpace(OrbitalBasis(8, 4)).size() == 70);
  CHECK_THROWS_AS(OrbitalBasis(4, 5), ValidationError);
  CHECK_THROWS_AS(OrbitalBasis(30, 2), ValidationError);
}

TEST_CASE("canonical anticommutation relations on the full Fock space") {
  // Build the matrices of a_p on all 2^K states for K = 5.
  const int K = 5, dim = 1 << K;
  std::vector<Eigen::MatrixXd> a(K, Eigen::MatrixXd::Zero(dim, dim));
  for (int p = 0; p < K; ++p)
    for (int m = 0; m < dim; ++m)
      if (auto r = apply_ladder(p, LadderKind::annihilate, Determinant{Mask(m)})) a[p](r->det.occ, m) = r->sign;
  for (int p = 0; p < K; ++p)
    for (int q = 0; q < K; ++q) {
      const Eigen::MatrixXd ac = a[q] * a[p].transpose() + a[p].transpose() * a[q];
      const Eigen::MatrixXd expect = (p == q ? 1.0 : 0.0) * Eigen::MatrixXd::Identity(dim, dim);
      CHECK((ac - expect).cwiseAbs().maxCoeff() == 0.0);
      CHECK((a[p] * a[q] + a[q] * a[p]).cwiseAbs().maxCoeff() == 0.0);
    }
  // number operators on the sector agree
  const DeterminantSpace sp(OrbitalBasis(K, 2));
  Eigen::MatrixXd n = Eigen::MatrixXd::Zero(sp.size(), sp.size());
  for (int p = 0; p < K; ++p) n += hopping_matrix(p, p, sp);
  CHECK((n - 2.0 * Eigen::MatrixXd::Identity(sp.size(), sp.size())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("hamiltonian assembly") {
  const DeterminantSpace sp(OrbitalBasis(4, 2));
  CHECK(hamiltonian_matrix(Integrals(4), sp).cwiseAbs().maxCoeff() == 0.0);

  Integrals diag(4);
  diag.h.diagonal() << -1.0, 0.5, 2.0, 3.5;
  const Eigen::MatrixXd Hd = hamiltonian_matrix(diag, sp);
  for (int i = 0; i < sp.size(); ++i) {
    double lam = 0.0;
    for (int p = 0; p < 4; ++p)
      if (sp.det(i).occupied(p)) lam += diag.h(p, p);
    CHECK(Hd(i, i) == doctest::Approx(lam));
  }
  CHECK((Hd - Eigen::MatrixXd(Hd.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(hamiltonian_matrix(Integrals(6), sp), ValidationError);
}

TEST_CASE("hamiltonian matches Slater-Condon oracle") {
  SUBCASE("hubbard dimer") {
    const Integrals ints = build_model({HubbardChain{2, 1.0, 4.0, false}, 2});
    const DeterminantSpace sp(OrbitalBasis(4, 2));
    const Eigen::MatrixXd H = hamiltonian_matrix(ints, sp);
    CHECK((H - oracle::slater_condon_matrix(ints, sp)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(hermiticity_error(H) <= 1e-12);
  }
  SUBCASE("random integrals, K=6 N=3") {
    const Integrals ints = build_model({RandomModel{6, 11, 1.0}, 3});
    const DeterminantSpace sp(OrbitalBasis(6, 3));
    const Eigen::MatrixXd H = hamiltonian_matrix(ints, sp);
    CHECK((H - oracle::slater_condon_matrix(ints, sp)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK(hermiticity_error(H) <= 1e-12);
  }
}

TEST_CASE("fci solve") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d.diagonal() << -2.0, 1.0, 3.0;
  const FciResult r = fci_solve(d);
  CHECK(r.values(0) == -2.0);
  CHECK((r.vectors.cwiseAbs() - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);

  for (double U : {1.0, 4.0, 8.0}) {
    const Integrals ints = build_model({HubbardChain{2, 1.0, U, false}, 2});
    const Eigen::MatrixXd H = hamiltonian_matrix(ints, DeterminantSpace(OrbitalBasis(4, 2)));
    const FciResult f = fci_solve(H);
    CHECK(f.values(0) == doctest::Approx(oracle::dimer_ground(U, 1.0)).epsilon(1e-13));
    const auto jac = oracle::jacobi_eigenvalues(H);
    for (int i = 0; i < 6; ++i) CHECK(f.values(i) == doctest::Approx(jac[i]).epsilon(1e-12));
    CHECK((f.vectors.transpose() * f.vectors - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-12);
  }

  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
  bad(0, 1) = 1e-6;
  CHECK_THROWS_AS(fci_solve(bad), ValidationError);
}

TEST_CASE("spectrum invariant under orbital rotation") {
  const Integrals ints = build_model({RandomModel{6, 5, 1.0}, 3});
  Uniform u(99);
  Eigen::MatrixXd X(6, 6);
  for (int i = 0; i < 36; ++i) X(i) = u();
  const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(X).householderQ();
  const DeterminantSpace sp(OrbitalBasis(6, 3));
  const auto e1 = fci_solve(hamiltonian_matrix(ints, sp)).values;
  const auto e2 = fci_solve(hamiltonian_matrix(to_mo_basis(ints, Q), sp)).values;
  CHECK((e1 - e2).cwiseAbs().maxCoeff() < 1e-10);
}
