// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0

#include "ccdeg/models.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace ccdeg {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ValidationError(std::string("model parameter ") + what + " is not finite");
}

Integrals hubbard(const HubbardChain& m) {
  if (m.L < 2) throw ValidationError("hubbard chain needs L >= 2");
  require_finite(m.t_hop, "t_hop");
  require_finite(m.U, "U");
  Integrals ints(2 * m.L);
  auto bond = [&](int i, int j) {
    for (int s = 0; s < 2; ++s) {
      ints.h(2 * i + s, 2 * j + s) -= m.t_hop;
      ints.h(2 * j + s, 2 * i + s) -= m.t_hop;
    }
  };
  for (int i = 0; i + 1 < m.L; ++i) bond(i, i + 1);
  if (m.periodic && m.L > 2) bond(m.L - 1, 0);
  for (int i = 0; i < m.L; ++i)
    if (m.U != 0.0) ints.set_pair(2 * i, 2 * i + 1, 2 * i, 2 * i + 1, m.U);
  return ints;
}

Integrals pairing(const Pairing& m) {
  if (m.levels < 1) throw ValidationError("pairing model needs at least one level");
  require_finite(m.gap, "gap");
  require_finite(m.coupling, "coupling");
  Integrals ints(2 * m.levels);
  for (int p = 0; p < m.levels; ++p) {
    ints.h(2 * p, 2 * p) = p * m.gap;
    ints.h(2 * p + 1, 2 * p + 1) = p * m.gap;
  }
  if (m.coupling != 0.0)
    for (int p = 0; p < m.levels; ++p)
      for (int q = 0; q < m.levels; ++q) ints.set_pair(2 * p, 2 * p + 1, 2 * q, 2 * q + 1, -m.coupling);
  return ints;
}

Integrals random_model(const RandomModel& m) {
  if (m.orbitals < 1) throw ValidationError("random model needs at least one orbital");
  require_finite(m.scale, "scale");
  const int K = m.orbitals;
  Uniform u(m.seed);
  Integrals ints(K);
  for (int p = 0; p < K; ++p)
    for (int q = p; q < K; ++q) {
      const double v = m.scale * u();
      ints.h(p, q) = v;
      ints.h(q, p) = v;
    }
  std::vector<std::pair<int, int>> pairs;
  for (int p = 0; p < K; ++p)
    for (int q = p + 1; q < K; ++q) pairs.emplace_back(p, q);
  for (std::size_t a = 0; a < pairs.size(); ++a)
    for (std::size_t b = a; b < pairs.size(); ++b)
      ints.set_pair(pairs[a].first, pairs[a].second, pairs[b].first, pairs[b].second, 0.5 * m.scale * u());
  return ints;
}

}  // namespace

int ModelSpec::orbitals() const {
  return std::visit(
      [](const auto& m) -> int {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, HubbardChain>) return 2 * m.L;
        else if constexpr (std::is_same_v<T, Pairing>) return 2 * m.levels;
        else return m.orbitals;
      },
      variant);
}

std::string ModelSpec::kind() const {
  switch (variant.index()) {
    case 0: return "hubbard";
    case 1: return "pairing";
    default: return "random";
  }
}

Integrals build_model(const ModelSpec& spec) {
  if (spec.N < 1 || spec.N > spec.orbitals())
    throw ValidationError("particle count N=" + std::to_string(spec.N) + " outside [1, K]");
  return std::visit(
      [](const auto& m) -> Integrals {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, HubbardChain>) return hubbard(m);
        else if constexpr (std::is_same_v<T, Pairing>) return pairing(m);
        else return random_model(m);
      },
      spec.variant);
}

Integrals load_integrals(const std::string& path, std::optional<int> K) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open integral file " + path);
  using Key = std::tuple<int, int, int, int>;
  std::map<std::pair<int, int>, double> one;
  std::map<Key, double> two;
  int kmax = 0;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string t; ls >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    auto fail = [&](const std::string& why) {
      throw ValidationError(path + ":" + std::to_string(lineno) + ": " + why);
    };
    if (tok.size() != 5) fail("expected 'p q r s value', got " + std::to_string(tok.size()) + " fields");
    int ix[4];
    double value = 0.0;
    try {
      for (int k = 0; k < 4; ++k) {
        std::size_t used = 0;
        ix[k] = std::stoi(tok[k], &used);
        if (used != tok[k].size()) fail("bad index '" + tok[k] + "'");
      }
      std::size_t used = 0;
      value = std::stod(tok[4], &used);
      if (used != tok[4].size()) fail("bad value '" + tok[4] + "'");
    } catch (const std::logic_error&) {
      fail("unparseable record");
    }
    if (!std::isfinite(value)) fail("value is not finite");
    auto [p, q, r, s] = ix;
    const bool onebody = r == 0 && s == 0;
    if (p < 1 || q < 1 || (!onebody && (r < 1 || s < 1))) fail("index out of range");
    if (K && std::max({p, q, r, s}) > *K) fail("index exceeds K=" + std::to_string(*K));
    kmax = std::max({kmax, p, q, r, s});
    if (onebody) {
      one[{p - 1, q - 1}] = value;
      continue;
    }
    if (p == q || r == s) {
      if (value != 0.0) fail("two-body entry with repeated index must vanish");
      continue;
    }
    if (p > q) std::swap(p, q), value = -value;
    if (r > s) std::swap(r, s), value = -value;
    two[{p - 1, q - 1, r - 1, s - 1}] = value;
  }
  const int k = K.value_or(kmax);
  if (k < 1) throw ValidationError(path + ": no integrals and no orbital count");
  Integrals ints(k);
  for (auto& [pq, v] : one) {
    auto it = one.find({pq.second, pq.first});
    const double partner = it == one.end() ? v : it->second;
    ints.h(pq.first, pq.second) = 0.5 * (v + partner);
    if (it == one.end()) ints.h(pq.second, pq.first) = v;
  }
  for (auto& [key, v] : two) {
    auto [p, q, r, s] = key;
    auto it = two.find({r, s, p, q});
    const double partner = it == two.end() ? v : it->second;
    ints.set_antisym(p, q, r, s, 0.5 * (v + partner));
    if (it == two.end()) ints.set_antisym(r, s, p, q, v);
  }
  return ints;
}

void save_integrals(const Integrals& ints, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write integral file " + path);
  out << "# p q r s value (1-based; r = s = 0 for one-body)\n";
  char buf[96];
  for (int p = 0; p < ints.K; ++p)
    for (int q = 0; q < ints.K; ++q)
      if (ints.h(p, q) != 0.0) {
        std::snprintf(buf, sizeof buf, "%d %d 0 0 %.17g\n", p + 1, q + 1, ints.h(p, q));
        out << buf;
      }
  for (int p = 0; p < ints.K; ++p)
    for (int q = p + 1; q < ints.K; ++q)
      for (int r = 0; r < ints.K; ++r)
        for (int s = r + 1; s < ints.K; ++s)
          if (const double v = ints.W(p, q, r, s); v != 0.0) {
            std::snprintf(buf, sizeof buf, "%d %d %d %d %.17g\n", p + 1, q + 1, r + 1, s + 1, v);
            out << buf;
          }
}

Eigen::MatrixXd fock_matrix(const Integrals& ints, const Eigen::MatrixXd& gamma) {
  const int K = ints.K;
  Eigen::MatrixXd F = ints.h;
  for (int p = 0; p < K; ++p)
    for (int r = 0; r < K; ++r) {
      double acc = 0.0;
      for (int q = 0; q < K; ++q)
        for (int s = 0; s < K; ++s) acc += ints.W(p, q, r, s) * gamma(q, s);
      F(p, r) += acc;
    }
  return F;
}

MeanFieldResult scf_solve(const Integrals& ints, int N, const ScfOptions& opts) {
  const int K = ints.K;
  if (N < 1 || N > K) throw ValidationError("scf: particle count outside [1, K]");
  if (opts.mixing <= 0.0 || opts.mixing > 1.0) throw ValidationError("scf: mixing must lie in (0, 1]");
  if (opts.tol <= 0.0 || opts.max_iter < 1) throw ValidationError("scf: tol and max_iter must be positive");

  auto density = [N](const Eigen::MatrixXd& C) -> Eigen::MatrixXd {
    return C.leftCols(N) * C.leftCols(N).transpose();
  };
  Eigen::MatrixXd gamma;
  if (opts.random_start) {
    Uniform u(*opts.random_start);
    Eigen::MatrixXd X(K, N);
    for (int j = 0; j < N; ++j)
      for (int i = 0; i < K; ++i) X(i, j) = u();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
    Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(K, N);
    gamma = Q * Q.transpose();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ints.h);
    gamma = density(es.eigenvectors());
  }

  MeanFieldResult res;
  res.N = N;
  for (int it = 1; it <= opts.max_iter; ++it) {
    const Eigen::MatrixXd F = fock_matrix(ints, gamma);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (F + F.transpose()));
    const Eigen::MatrixXd out = density(es.eigenvectors());
    const double change = (out - gamma).cwiseAbs().maxCoeff();
    res.lambdas = es.eigenvalues();
    res.C = es.eigenvectors();
    res.iterations = it;
    if (change <= opts.tol) {
      res.converged = true;
      gamma = out;
      break;
    }
    gamma = (1.0 - opts.mixing) * gamma + opts.mixing * out;
  }
  const Eigen::MatrixXd occ = density(res.C);
  res.scf_energy = 0.5 * ((ints.h + fock_matrix(ints, occ)).cwiseProduct(occ)).sum();
  res.Lambda0 = res.lambdas.head(N).sum();
  if (N < K) {
    res.eps_min = res.lambdas(N) - res.lambdas(N - 1);
    res.degenerate_gap = std::abs(res.eps_min) <= 1e-10 * std::max(1.0, std::abs(res.lambdas(N)));
  }
  return res;
}

Integrals to_mo_basis(const Integrals& ints, const Eigen::MatrixXd& C) {
  const int K = ints.K;
  if (C.rows() != K || C.cols() != K) throw ValidationError("to_mo_basis: coefficient matrix has wrong shape");
  if ((C.transpose() * C - Eigen::MatrixXd::Identity(K, K)).cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("to_mo_basis: coefficient matrix is not unitary");
  Integrals mo(K);
  mo.h = C.transpose() * ints.h * C;
  // four quarter transformations, one index at a time
  std::vector<double> a = ints.w, b(a.size());
  const std::size_t k = K;
  const std::size_t stride[4] = {k * k * k, k * k, k, 1};
  for (int axis = 0; axis < 4; ++axis) {
    std::fill(b.begin(), b.end(), 0.0);
    const std::size_t st = stride[axis];
    for (std::size_t flat = 0; flat < a.size(); ++flat) {
      const std::size_t idx = (flat / st) % k;
      const std::size_t base = flat - idx * st;
      const double v = a[flat];
      if (v == 0.0) continue;
      for (std::size_t m = 0; m < k; ++m) b[base + m * st] += C(idx, m) * v;
    }
    std::swap(a, b);
  }
  mo.w = std::move(a);
  return mo;
}

double excitation_energy(const Eigen::VectorXd& lambdas, const Excitation& x) {
  double e = 0.0;
  for (int j = 0; j < x.rank(); ++j) e += lambdas(x.virt[j]) - lambdas(x.occ[j]);
  return e;
}

FockData fock_data(const Eigen::VectorXd& lambdas, const DeterminantSpace& space,
                   const std::vector<Excitation>& excitations, const DenseOperator& H) {
  FockData fd;
  fd.eps.resize(static_cast<int>(excitations.size()));
  for (std::size_t a = 0; a < excitations.size(); ++a) fd.eps(a) = excitation_energy(lambdas, excitations[a]);
  fd.fock_diag.resize(space.size());
  for (int i = 0; i < space.size(); ++i) {
    double s = 0.0;
    for (int p = 0; p < space.basis().K; ++p)
      if (space.det(i).occupied(p)) s += lambdas(p);
    fd.fock_diag(i) = s;
  }
  fd.fluct = H;
  fd.fluct.diagonal() -= fd.fock_diag;
  return fd;
}

}  // namespace ccdeg
