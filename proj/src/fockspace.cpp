// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0

#include "ccdeg/fockspace.hpp"

#include <bit>
#include <cmath>
#include <string>

namespace ccdeg {

OrbitalBasis::OrbitalBasis(int k, int n, int max_orbitals) : K(k), N(n) {
  if (k < 1 || k > max_orbitals || k > 62)
    throw ValidationError("orbital count K=" + std::to_string(k) + " outside [1, " +
                          std::to_string(max_orbitals) + "]");
  if (n < 1 || n > k)
    throw ValidationError("particle count N=" + std::to_string(n) + " outside [1, K]");
}

int Determinant::count() const { return std::popcount(occ); }

std::optional<SignedDet> apply_ladder(int p, LadderKind kind, Determinant d) {
  const Mask bit = Mask{1} << p;
  const bool occ = d.occ & bit;
  if (kind == LadderKind::create && occ) return std::nullopt;
  if (kind == LadderKind::annihilate && !occ) return std::nullopt;
  const int below = std::popcount(d.occ & (bit - 1));
  return SignedDet{(below & 1) ? -1 : 1, Determinant{d.occ ^ bit}};
}

std::optional<SignedDet> apply_excitation(const Excitation& x, Determinant d) {
  int sign = 1;
  for (int j = x.rank() - 1; j >= 0; --j) {
    auto a = apply_ladder(x.occ[j], LadderKind::annihilate, d);
    if (!a) return std::nullopt;
    auto c = apply_ladder(x.virt[j], LadderKind::create, a->det);
    if (!c) return std::nullopt;
    sign *= a->sign * c->sign;
    d = c->det;
  }
  return SignedDet{sign, d};
}

Mask excited_mask(const Excitation& x, Mask reference) {
  Mask m = reference;
  for (int i : x.occ) m &= ~(Mask{1} << i);
  for (int a : x.virt) m |= Mask{1} << a;
  return m;
}

DeterminantSpace::DeterminantSpace(const OrbitalBasis& basis) : basis_(basis) {
  const Mask top = Mask{1} << basis.K;
  Mask m = basis.reference();
  while (m < top) {
    lookup_.emplace(m, static_cast<int>(dets_.size()));
    dets_.push_back(m);
    // next mask with the same popcount
    const Mask c = m & (~m + 1);
    const Mask r = m + c;
    m = (((r ^ m) >> 2) / c) | r;
  }
}

int DeterminantSpace::index(Mask m) const {
  auto it = lookup_.find(m);
  return it == lookup_.end() ? -1 : it->second;
}

Integrals::Integrals(int k) : K(k), h(Eigen::MatrixXd::Zero(k, k)), w(std::size_t(k) * k * k * k, 0.0) {}

void Integrals::set_antisym(int p, int q, int r, int s, double v) {
  w[idx(p, q, r, s)] = v;
  w[idx(q, p, r, s)] = -v;
  w[idx(p, q, s, r)] = -v;
  w[idx(q, p, s, r)] = v;
}

void Integrals::set_pair(int p, int q, int r, int s, double v) {
  set_antisym(p, q, r, s, v);
  set_antisym(r, s, p, q, v);
}

DenseOperator hamiltonian_matrix(const Integrals& ints, const DeterminantSpace& space) {
  const int K = space.basis().K;
  if (ints.K != K || ints.h.rows() != K || ints.w.size() != std::size_t(K) * K * K * K)
    throw ValidationError("integrals of size " + std::to_string(ints.K) +
                          " do not match determinant space with K=" + std::to_string(K));
  const int n = space.size();
  DenseOperator H = DenseOperator::Zero(n, n);
  for (int col = 0; col < n; ++col) {
    const Determinant d = space.det(col);
    for (int q = 0; q < K; ++q) {
      auto a = apply_ladder(q, LadderKind::annihilate, d);
      if (!a) continue;
      for (int p = 0; p < K; ++p) {
        const double v = ints.h(p, q);
        if (v == 0.0) continue;
        auto c = apply_ladder(p, LadderKind::create, a->det);
        if (!c) continue;
        H(space.index(c->det.occ), col) += v * a->sign * c->sign;
      }
    }
    for (int r = 0; r < K; ++r) {
      auto ar = apply_ladder(r, LadderKind::annihilate, d);
      if (!ar) continue;
      for (int s = r + 1; s < K; ++s) {
        auto as = apply_ladder(s, LadderKind::annihilate, ar->det);
        if (!as) continue;
        for (int q = 0; q < K; ++q) {
          auto cq = apply_ladder(q, LadderKind::create, as->det);
          if (!cq) continue;
          for (int p = 0; p < q; ++p) {
            const double v = ints.W(p, q, r, s);
            if (v == 0.0) continue;
            auto cp = apply_ladder(p, LadderKind::create, cq->det);
            if (!cp) continue;
            H(space.index(cp->det.occ), col) += v * ar->sign * as->sign * cq->sign * cp->sign;
          }
        }
      }
    }
  }
  return H;
}

Eigen::MatrixXd hopping_matrix(int p, int q, const DeterminantSpace& space) {
  const int n = space.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int col = 0; col < n; ++col) {
    auto a = apply_ladder(q, LadderKind::annihilate, space.det(col));
    if (!a) continue;
    auto c = apply_ladder(p, LadderKind::create, a->det);
    if (!c) continue;
    m(space.index(c->det.occ), col) = a->sign * c->sign;
  }
  return m;
}

double hermiticity_error(const Eigen::MatrixXd& a) {
  const double scale = a.cwiseAbs().maxCoeff();
  if (scale == 0.0) return 0.0;
  return (a - a.transpose()).cwiseAbs().maxCoeff() / scale;
}

FciResult fci_solve(const DenseOperator& H) {
  if (H.rows() != H.cols()) throw ValidationError("fci_solve: matrix is not square");
  const double err = hermiticity_error(H);
  if (err > 1e-12)
    throw ValidationError("fci_solve: matrix not Hermitian (relative error " + std::to_string(err) + ")");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (H + H.transpose()));
  if (es.info() != Eigen::Success) throw NumericalError("fci_solve: eigensolver failed");
  return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace ccdeg
