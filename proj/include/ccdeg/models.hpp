// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "ccdeg/fockspace.hpp"

namespace ccdeg {

// Spin-orbital 2*i is site i spin up, 2*i+1 is site i spin down.
struct HubbardChain {
  int L = 2;
  double t_hop = 1.0;
  double U = 0.0;
  bool periodic = false;
};

// Doubly degenerate levels p*gap with pair hopping -coupling * P+_p P_q.
struct Pairing {
  int levels = 2;
  double gap = 1.0;
  double coupling = 0.5;
};

struct RandomModel {
  int orbitals = 6;
  std::uint64_t seed = 1;
  double scale = 1.0;
};

struct ModelSpec {
  std::variant<HubbardChain, Pairing, RandomModel> variant;
  int N = 2;

  int orbitals() const;
  std::string kind() const;
};

Integrals build_model(const ModelSpec& spec);

// "p q r s value" per line, 1-based, r = s = 0 marks h_pq, '#' comments.
// K defaults to the largest index seen.
Integrals load_integrals(const std::string& path, std::optional<int> K = std::nullopt);
void save_integrals(const Integrals& ints, const std::string& path);

struct ScfOptions {
  int max_iter = 200;
  double mixing = 0.5;
  double tol = 1e-10;
  // Random orthonormal starting density instead of the core guess.
  std::optional<std::uint64_t> random_start;
};

struct MeanFieldResult {
  Eigen::VectorXd lambdas;
  Eigen::MatrixXd C;
  int N = 0;
  double Lambda0 = 0.0;
  double eps_min = 0.0;
  double scf_energy = 0.0;
  bool converged = false;
  int iterations = 0;
  // lambda_N == lambda_{N+1}; the lowest-index orbitals were occupied.
  bool degenerate_gap = false;
};

MeanFieldResult scf_solve(const Integrals& ints, int N, const ScfOptions& opts = {});

// Mean-field matrix h + W-contraction with the density gamma.
Eigen::MatrixXd fock_matrix(const Integrals& ints, const Eigen::MatrixXd& gamma);

Integrals to_mo_basis(const Integrals& ints, const Eigen::MatrixXd& C);

struct FockData {
  Eigen::VectorXd eps;        // per excitation
  Eigen::VectorXd fock_diag;  // Lambda of each sector determinant
  Eigen::MatrixXd fluct;      // H - F on the sector
};

FockData fock_data(const Eigen::VectorXd& lambdas, const DeterminantSpace& space,
                   const std::vector<Excitation>& excitations, const DenseOperator& H);

double excitation_energy(const Eigen::VectorXd& lambdas, const Excitation& x);

// Deterministic uniform draws in [-1, 1) from a 64-bit Mersenne twister,
// identical on every platform.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : eng_(seed) {}
  double operator()() { return static_cast<double>(eng_() >> 11) * 0x1p-52 - 1.0; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace ccdeg
