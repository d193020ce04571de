// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

#include "ccdeg/types.hpp"

namespace ccdeg {

struct NewtonOptions {
  double tol = 1e-10;  // residual infinity norm
  int max_iter = 100;
  double step_tol = 1e-12;
  bool fd_jacobian = false;
};

template <class S>
struct NewtonResult {
  Vec<S> x;
  double residual_inf = 0.0;
  bool converged = false;
  int iterations = 0;
  int singular_steps = 0;
};

// Damped Newton with line-search factors {1, 1/2, 1/4, 1/8}. A singular
// Jacobian falls back to a minimum-norm step with the smallest factor.
template <class S, class Residual, class Jacobian>
NewtonResult<S> damped_newton(const Residual& residual, const Jacobian& jacobian, Vec<S> x,
                              const NewtonOptions& opts) {
  static constexpr double kFactors[] = {1.0, 0.5, 0.25, 0.125};
  NewtonResult<S> out;
  Vec<S> r = residual(x);
  auto inf = [](const Vec<S>& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; };
  double res = inf(r);
  for (int it = 0; it < opts.max_iter && res > opts.tol; ++it) {
    const Mat<S> J = jacobian(x);
    Eigen::FullPivLU<Mat<S>> lu(J);
    Vec<S> dx;
    bool singular = !lu.isInvertible();
    if (!singular) {
      dx = lu.solve(-r);
    } else {
      ++out.singular_steps;
      dx = Eigen::CompleteOrthogonalDecomposition<Mat<S>>(J).solve(-r);
    }
    if (!dx.allFinite()) break;
    bool accepted = false;
    double used = kFactors[3];
    Vec<S> xt, rt;
    for (double f : kFactors) {
      if (singular && f != kFactors[3]) continue;
      xt = x + S(f) * dx;
      rt = residual(xt);
      if (rt.allFinite() && rt.norm() < r.norm()) {
        accepted = true;
        used = f;
        break;
      }
    }
    if (!accepted) {
      xt = x + S(kFactors[3]) * dx;
      rt = residual(xt);
      if (!rt.allFinite()) break;
    }
    x = xt;
    r = rt;
    res = inf(r);
    out.iterations = it + 1;
    if (used * dx.norm() <= opts.step_tol) break;
  }
  out.x = std::move(x);
  out.residual_inf = res;
  out.converged = std::isfinite(res) && res <= opts.tol;
  return out;
}

}  // namespace ccdeg
