// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

int main(int argc, char** argv) { return ccdeg::cli::run(argc, argv); }
