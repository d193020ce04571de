// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0

#include "ccdeg/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

namespace ccdeg {

namespace {

template <class S>
S conj_of(const S& x) {
  if constexpr (std::is_same_v<S, cplx>) return std::conj(x);
  else return x;
}

void combinations(const std::vector<int>& pool, int r, const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> pick;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(pick.size()) == r) {
      f(pick);
      return;
    }
    for (int i = start; i < static_cast<int>(pool.size()); ++i) {
      pick.push_back(pool[i]);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
}

}  // namespace

TruncationScheme TruncationScheme::up_to(int rho) {
  if (rho < 1) throw ValidationError("truncation rank must be at least 1");
  std::vector<int> r;
  for (int k = 1; k <= rho; ++k) r.push_back(k);
  return of_ranks(r);
}

TruncationScheme TruncationScheme::of_ranks(std::vector<int> r) {
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  if (r.empty() || r.front() < 1) throw ValidationError("rank set must be nonempty with ranks >= 1");
  return {Kind::ranks, r};
}

TruncationScheme TruncationScheme::parse(const std::string& text) {
  if (text == "full") return full();
  if (text == "doubles" || text == "d" || text == "ccd") return doubles_only();
  if (text == "sd" || text == "ccsd") return up_to(2);
  if (text == "sdt" || text == "ccsdt") return up_to(3);
  if (text.rfind("ranks:", 0) == 0) {
    std::vector<int> r;
    std::stringstream ss(text.substr(6));
    for (std::string item; std::getline(ss, item, ',');) {
      try {
        r.push_back(std::stoi(item));
      } catch (const std::logic_error&) {
        throw ValidationError("bad rank '" + item + "' in scheme " + text);
      }
    }
    return of_ranks(r);
  }
  throw ValidationError("unknown truncation scheme '" + text + "'");
}

bool TruncationScheme::includes(int rank, int N) const {
  switch (kind) {
    case Kind::full: return rank >= 1 && rank <= N;
    case Kind::doubles_only: return rank == 2;
    default: return std::binary_search(ranks.begin(), ranks.end(), rank);
  }
}

std::string TruncationScheme::name() const {
  switch (kind) {
    case Kind::full: return "full";
    case Kind::doubles_only: return "doubles";
    default: {
      std::string s = "ranks:";
      for (std::size_t i = 0; i < ranks.size(); ++i) s += (i ? "," : "") + std::to_string(ranks[i]);
      return s;
    }
  }
}

AmplitudeSpace::AmplitudeSpace(const OrbitalBasis& basis, const TruncationScheme& scheme)
    : AmplitudeSpace(std::make_shared<const DeterminantSpace>(basis), scheme) {}

AmplitudeSpace::AmplitudeSpace(std::shared_ptr<const DeterminantSpace> sector, const TruncationScheme& scheme)
    : sector_(std::move(sector)), scheme_(scheme) {
  const int K = basis().K, N = basis().N;
  const int max_rank = std::min(N, K - N);
  std::vector<int> occ, virt;
  for (int p = 0; p < N; ++p) occ.push_back(p);
  for (int p = N; p < K; ++p) virt.push_back(p);
  std::set<int> present;
  for (int r = 1; r <= max_rank; ++r) {
    if (!scheme.includes(r, N)) continue;
    present.insert(r);
    combinations(occ, r, [&](const std::vector<int>& I) {
      combinations(virt, r, [&](const std::vector<int>& A) {
        lookup_.emplace(std::make_pair(I, A), static_cast<int>(excitations_.size()));
        excitations_.push_back({I, A});
      });
    });
  }
  for (int a = 1; a <= max_rank; ++a) {
    if (present.count(a)) continue;
    for (int b : present)
      if (present.count(a + b)) rank_regular_ = false;
  }
  if (!present.empty())
    for (int r = 1; r <= *present.rbegin(); ++r)
      if (!present.count(r)) excitation_complete_ = false;

  const Determinant ref{basis().reference()};
  const int n = sector_->size();
  for (const auto& x : excitations_) {
    auto res = apply_excitation(x, ref);
    det_index_.push_back(sector_->index(res->det.occ));
    phase_.push_back(res->sign);
    std::vector<Move> moves;
    for (int col = 0; col < n; ++col)
      if (auto r = apply_excitation(x, sector_->det(col))) moves.push_back({col, sector_->index(r->det.occ), r->sign});
    action_.push_back(std::move(moves));
  }
}

int AmplitudeSpace::index_of(const Excitation& x) const {
  auto it = lookup_.find({x.occ, x.virt});
  return it == lookup_.end() ? -1 : it->second;
}

bool AmplitudeSpace::is_full() const { return dim() == sector_->size() - 1; }

template <class S>
Vec<S> cluster_apply(const AmplitudeSpace& sp, const Vec<S>& t, const Vec<S>& v) {
  if (t.size() != sp.dim() || v.size() != sp.sector().size())
    throw ValidationError("cluster_apply: dimension mismatch");
  Vec<S> out = Vec<S>::Zero(v.size());
  for (int a = 0; a < sp.dim(); ++a) {
    const S ta = t(a);
    if (ta == S(0)) continue;
    for (const auto& m : sp.action(a)) out(m.to) += ta * (S(m.sign) * v(m.from));
  }
  return out;
}

template <class S>
Vec<S> cluster_adjoint_apply(const AmplitudeSpace& sp, const Vec<S>& t, const Vec<S>& v) {
  if (t.size() != sp.dim() || v.size() != sp.sector().size())
    throw ValidationError("cluster_adjoint_apply: dimension mismatch");
  Vec<S> out = Vec<S>::Zero(v.size());
  for (int a = 0; a < sp.dim(); ++a) {
    const S ta = conj_of(t(a));
    if (ta == S(0)) continue;
    for (const auto& m : sp.action(a)) out(m.from) += ta * (S(m.sign) * v(m.to));
  }
  return out;
}

template <class S>
Mat<S> cluster_matrix(const AmplitudeSpace& sp, const Vec<S>& t) {
  if (t.size() != sp.dim()) throw ValidationError("cluster_matrix: dimension mismatch");
  const int n = sp.sector().size();
  Mat<S> m = Mat<S>::Zero(n, n);
  for (int a = 0; a < sp.dim(); ++a)
    for (const auto& mv : sp.action(a)) m(mv.to, mv.from) += t(a) * S(mv.sign);
  return m;
}

template <class S>
Vec<S> exp_apply(const AmplitudeSpace& sp, const Vec<S>& t, const Vec<S>& v) {
  Vec<S> term = v, out = v;
  for (int k = 1; k <= sp.basis().N; ++k) {
    term = cluster_apply(sp, t, term) / S(k);
    out += term;
  }
  return out;
}

template <class S>
Mat<S> exp_matrix(const AmplitudeSpace& sp, const Vec<S>& t) {
  const Mat<S> T = cluster_matrix(sp, t);
  const int n = T.rows();
  Mat<S> term = Mat<S>::Identity(n, n), out = term;
  for (int k = 1; k <= sp.basis().N; ++k) {
    term = (term * T) / S(k);
    out += term;
  }
  return out;
}

template <class S>
Vec<S> sector_vector(const AmplitudeSpace& sp, const Vec<S>& c) {
  if (c.size() != sp.dim()) throw ValidationError("sector_vector: dimension mismatch");
  Vec<S> v = Vec<S>::Zero(sp.sector().size());
  for (int a = 0; a < sp.dim(); ++a) v(sp.det_index(a)) += S(sp.phase(a)) * c(a);
  return v;
}

template <class S>
Vec<S> components(const AmplitudeSpace& sp, const Vec<S>& w) {
  if (w.size() != sp.sector().size()) throw ValidationError("components: dimension mismatch");
  Vec<S> c(sp.dim());
  for (int a = 0; a < sp.dim(); ++a) c(a) = S(sp.phase(a)) * w(sp.det_index(a));
  return c;
}

template <class S>
Vec<S> intermediate_coefficients(const AmplitudeSpace& sp, const Vec<S>& psi) {
  if (psi.size() != sp.sector().size()) throw ValidationError("intermediate_coefficients: dimension mismatch");
  if (std::abs(psi(0)) < 1e-14 * std::max(1.0, psi.cwiseAbs().maxCoeff()))
    throw NumericalError("state has no overlap with the reference determinant");
  return components<S>(sp, psi / psi(0));
}

template <class S>
Vec<S> cluster_log(const AmplitudeSpace& full, const Vec<S>& c) {
  if (!full.is_full()) throw ValidationError("cluster_log requires the full amplitude space");
  const Vec<S> c_phi = sector_vector(full, c);
  Vec<S> power = c_phi, acc = c_phi;
  for (int k = 2; k <= full.basis().N; ++k) {
    power = cluster_apply(full, c, power);
    acc += ((k % 2 == 0) ? S(-1) : S(1)) * power / S(k);
  }
  return components(full, acc);
}

template <class S>
Vec<S> transfer(const AmplitudeSpace& from, const AmplitudeSpace& to, const Vec<S>& t) {
  if (t.size() != from.dim()) throw ValidationError("transfer: dimension mismatch");
  Vec<S> out = Vec<S>::Zero(to.dim());
  for (int a = 0; a < to.dim(); ++a)
    if (int b = from.index_of(to.excitation(a)); b >= 0) out(a) = t(b);
  return out;
}

template <class S>
double amp_norm(const Vec<S>& t, NormKind kind, const Eigen::VectorXd* eps) {
  if (kind == NormKind::ell2) return t.norm();
  if (!eps || eps->size() != t.size()) throw ValidationError("fock-weighted norm needs one eps per amplitude");
  if (eps->minCoeff() <= 0.0) throw ValidationError("fock-weighted norm needs all eps > 0");
  double s = 0.0;
  for (int a = 0; a < t.size(); ++a) s += (*eps)(a) * std::norm(t(a));
  return std::sqrt(s);
}

double norm_equivalence_constant(const Eigen::VectorXd& eps) {
  if (eps.size() == 0 || eps.minCoeff() <= 0.0) throw ValidationError("norm equivalence needs all eps > 0");
  return std::max(std::sqrt(eps.maxCoeff()), 1.0 / std::sqrt(eps.minCoeff()));
}

#define CCDEG_INSTANTIATE(S)                                                                  \
  template Vec<S> cluster_apply(const AmplitudeSpace&, const Vec<S>&, const Vec<S>&);         \
  template Vec<S> cluster_adjoint_apply(const AmplitudeSpace&, const Vec<S>&, const Vec<S>&); \
  template Mat<S> cluster_matrix(const AmplitudeSpace&, const Vec<S>&);                       \
  template Vec<S> exp_apply(const AmplitudeSpace&, const Vec<S>&, const Vec<S>&);             \
  template Mat<S> exp_matrix(const AmplitudeSpace&, const Vec<S>&);                           \
  template Vec<S> cluster_log(const AmplitudeSpace&, const Vec<S>&);                          \
  template Vec<S> sector_vector(const AmplitudeSpace&, const Vec<S>&);                        \
  template Vec<S> components(const AmplitudeSpace&, const Vec<S>&);                           \
  template Vec<S> intermediate_coefficients(const AmplitudeSpace&, const Vec<S>&);            \
  template Vec<S> transfer(const AmplitudeSpace&, const AmplitudeSpace&, const Vec<S>&);      \
  template double amp_norm(const Vec<S>&, NormKind, const Eigen::VectorXd*);

CCDEG_INSTANTIATE(double)
CCDEG_INSTANTIATE(cplx)

}  // namespace ccdeg
