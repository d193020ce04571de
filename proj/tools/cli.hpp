// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccdeg/serialize.hpp"

namespace ccdeg::cli {

struct RunConfig {
  // hubbard | pairing | random | file
  std::string model = "hubbard";
  int L = 2;
  double t_hop = 1.0;
  double U = 4.0;
  bool periodic = false;
  int levels = 2;
  double gap = 1.0;
  double coupling = 0.5;
  int orbitals = 6;
  std::uint64_t model_seed = 1;
  double scale = 1.0;
  std::string integrals;
  int K = 0;  // 0: taken from the integral file

  int N = 2;
  std::string scheme = "full";
  std::string field = "real";
  double tol = 1e-10;
  int max_iter = 100;
  int rho = 1;
  std::string out = ".";
  std::uint64_t seed = 1;

  int starts = 16;
  double radius = 1.0;

  std::string homotopy = "kp";  // kp | linear
  double alpha = 1.0;
  int state = -1;  // FCI state for kp-verify; -1 picks the one matching E_CC
  double exist_alpha = -1.0;  // negative: automatic
  double eps = 1.0;
  double delta = 0.1;
  int samples = 256;
  std::string norm = "ell2";

  std::string solution;
  std::string output;
};

json config_to_json(const RunConfig& c);
// Keys present in `j` overwrite the matching fields of `c`.
void merge_config(RunConfig& c, const json& j);

Integrals build_integrals(const RunConfig& c);
ProblemSetup build_setup(const RunConfig& c);

int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace ccdeg::cli
