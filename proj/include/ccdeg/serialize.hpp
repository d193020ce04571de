// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0
//
// JSON and CSV artifacts. Doubles are written with 17 significant digits so
// identical runs give byte-identical files.

#pragma once

#include <json.hpp>

#include <string>

#include "ccdeg/homotopy.hpp"

namespace ccdeg {

using json = nlohmann::json;

inline constexpr const char* kSchema = "cc-degree/1";

std::string format_double(double x);
// Deterministic compact dump; keys sorted, one trailing newline.
std::string dump_json(const json& j);
json parse_json_file(const std::string& path);
// Writes through a temporary file so a failed run leaves no partial output.
void write_text_file(const std::string& path, const std::string& text);

// {scheme, field, entries: [{I, A, re, im}]} with 1-based orbital indices.
template <class S>
json amplitudes_to_json(const AmplitudeSpace& sp, const Vec<S>& t);
template <class S>
Vec<S> amplitudes_from_json(const AmplitudeSpace& sp, const json& j);
Field field_from_json(const json& j);

template <class S>
json solution_to_json(const CCProblem& p, const CCSolution<S>& s);

json mean_field_to_json(const MeanFieldResult& mf);
json complex_list(const Eigen::VectorXcd& z);
json index_report_to_json(const IndexReport& r);
template <class S>
json degenerate_to_json(const DegenerateData<S>& d);
json eom_to_json(const EOMReport& r);
json verify_to_json(const KPVerifyReport& r);
json error_estimate_to_json(const ErrorEstimateReport& r);
json existence_to_json(const KPExistenceReport& r);
json path_summary_to_json(const Path& path);

// Header row: lambda,residual_inf,E_KP,sgn_det,step,t1..td
std::string path_csv(const Path& path);

}  // namespace ccdeg
