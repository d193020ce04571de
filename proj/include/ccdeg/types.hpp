// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace ccdeg {

using cplx = std::complex<double>;

template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

enum class Field { real, complex };

template <class S>
inline constexpr Field field_of = std::is_same_v<S, cplx> ? Field::complex : Field::real;

inline const char* field_name(Field f) { return f == Field::real ? "real" : "complex"; }

// Invalid input: bad parameters, inconsistent dimensions, malformed files.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Numerical failure: non-convergence, degeneracy refusal, singular data.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class S>
Mat<S> promote(const Eigen::MatrixXd& m) {
  if constexpr (std::is_same_v<S, double>) return m;
  else return m.cast<S>();
}

inline double real_part(double x) { return x; }
inline double real_part(const cplx& x) { return x.real(); }

}  // namespace ccdeg
