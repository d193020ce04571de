// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0

#include "ccdeg/serialize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ccdeg {

std::string format_double(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void dump_into(const json& j, std::string& out) {
  switch (j.type()) {
    case json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += json(it.key()).dump();
        out += ':';
        dump_into(it.value(), out);
      }
      out += '}';
      break;
    }
    case json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ',';
        dump_into(j[i], out);
      }
      out += ']';
      break;
    }
    case json::value_t::number_float:
      out += format_double(j.get<double>());
      break;
    default:
      out += j.dump();
  }
}

double read_number(const json& j, const char* key) {
  if (!j.contains(key)) return 0.0;
  if (!j[key].is_number()) throw ValidationError(std::string("field '") + key + "' must be a number");
  return j[key].get<double>();
}

std::vector<int> read_orbitals(const json& j, const char* key, int K) {
  if (!j.contains(key) || !j[key].is_array()) throw ValidationError(std::string("amplitude entry lacks ") + key);
  std::vector<int> out;
  for (const json& x : j[key]) {
    if (!x.is_number_integer()) throw ValidationError("orbital indices must be integers");
    const int v = x.get<int>();
    if (v < 1 || v > K) throw ValidationError("orbital index out of range");
    out.push_back(v - 1);
  }
  std::sort(out.begin(), out.end());
  return out;
}

json orbitals_json(const std::vector<int>& v) {
  json a = json::array();
  for (int x : v) a.push_back(x + 1);
  return a;
}

}  // namespace

std::string dump_json(const json& j) {
  std::string out;
  dump_into(j, out);
  out += '\n';
  return out;
}

json parse_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON in " + path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ValidationError("cannot write " + path);
    out << text;
    if (!out) throw ValidationError("cannot write " + path);
  }
  std::filesystem::rename(tmp, target);
}

template <class S>
json amplitudes_to_json(const AmplitudeSpace& sp, const Vec<S>& t) {
  if (t.size() != sp.dim()) throw ValidationError("amplitude vector has wrong dimension");
  json entries = json::array();
  for (int a = 0; a < sp.dim(); ++a) {
    const Excitation& x = sp.excitation(a);
    const cplx v(t(a));
    entries.push_back({{"I", orbitals_json(x.occ)}, {"A", orbitals_json(x.virt)}, {"re", v.real()}, {"im", v.imag()}});
  }
  return {{"scheme", sp.scheme().name()}, {"field", field_name(field_of<S>)}, {"entries", entries}};
}

template <class S>
Vec<S> amplitudes_from_json(const AmplitudeSpace& sp, const json& j) {
  if (!j.is_object() || !j.contains("entries") || !j["entries"].is_array())
    throw ValidationError("amplitudes need an 'entries' array");
  if (j.contains("scheme") && j["scheme"].get<std::string>() != sp.scheme().name())
    throw ValidationError("amplitude scheme '" + j["scheme"].get<std::string>() + "' does not match '" +
                          sp.scheme().name() + "'");
  const int K = sp.basis().K;
  Vec<S> t = Vec<S>::Zero(sp.dim());
  for (const json& e : j["entries"]) {
    const Excitation x{read_orbitals(e, "I", K), read_orbitals(e, "A", K)};
    const int a = sp.index_of(x);
    if (a < 0) throw ValidationError("amplitude entry is not in the amplitude space");
    const double re = read_number(e, "re"), im = read_number(e, "im");
    if constexpr (std::is_same_v<S, cplx>) {
      t(a) = cplx(re, im);
    } else {
      if (im != 0.0) throw ValidationError("complex amplitude in a real field");
      t(a) = re;
    }
  }
  return t;
}

Field field_from_json(const json& j) {
  const std::string f = j.value("field", std::string("real"));
  if (f == "real") return Field::real;
  if (f == "complex") return Field::complex;
  throw ValidationError("unknown field '" + f + "'");
}

template <class S>
json solution_to_json(const CCProblem& p, const CCSolution<S>& s) {
  const cplx e(s.energy);
  json j = {{"schema", kSchema},
            {"scheme", p.sp().scheme().name()},
            {"field", field_name(field_of<S>)},
            {"t", amplitudes_to_json<S>(p.sp(), s.t)},
            {"E_CC", e.real()},
            {"residual_inf", s.residual_inf},
            {"converged", s.converged},
            {"iterations", s.iterations}};
  if constexpr (std::is_same_v<S, cplx>) j["E_CC_im"] = e.imag();
  return j;
}

json mean_field_to_json(const MeanFieldResult& mf) {
  json C = json::array();
  for (int i = 0; i < mf.C.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < mf.C.cols(); ++k) row.push_back(mf.C(i, k));
    C.push_back(row);
  }
  return {{"schema", kSchema},
          {"lambdas", std::vector<double>(mf.lambdas.data(), mf.lambdas.data() + mf.lambdas.size())},
          {"C", C},
          {"Lambda0", mf.Lambda0},
          {"eps_min", mf.eps_min},
          {"scf_energy", mf.scf_energy},
          {"converged", mf.converged},
          {"iterations", mf.iterations},
          {"degenerate_gap", mf.degenerate_gap}};
}

json complex_list(const Eigen::VectorXcd& z) {
  json a = json::array();
  for (const cplx& x : z) a.push_back({{"re", x.real()}, {"im", x.imag()}});
  return a;
}

json index_report_to_json(const IndexReport& r) {
  return {{"schema", kSchema},
          {"nu", r.nu},
          {"index", r.index ? json(*r.index) : json(nullptr)},
          {"degenerate", r.degenerate},
          {"eigvals", complex_list(r.eigvals)},
          {"sgn_det", r.sgn_det},
          {"field", field_name(r.field)},
          {"E_CC", r.energy.real()}};
}

template <class S>
json degenerate_to_json(const DegenerateData<S>& d) {
  return {{"mu", d.mu},
          {"sphere_ok", d.sphere_ok},
          {"b_min", d.b_min},
          {"b_scale", d.b_scale},
          {"index", d.index ? json(*d.index) : json(nullptr)},
          {"method", d.method},
          {"sgn_det_shifted", d.sgn_det_shifted},
          {"perturbed_count", d.perturbed_count}};
}

json eom_to_json(const EOMReport& r) {
  return {{"schema", kSchema}, {"shifts", complex_list(r.shifts)}, {"nu", r.nu}, {"degenerate", r.degenerate}};
}

json verify_to_json(const KPVerifyReport& r) {
  return {{"lhs", r.lhs},           {"rhs", r.rhs}, {"residual", r.residual}, {"overlap", r.overlap},
          {"E_KP", r.e_kp},         {"in_v0", r.in_v0}, {"energy_gap", r.energy_gap}};
}

json error_estimate_to_json(const ErrorEstimateReport& r) {
  return {{"schema", kSchema},   {"actual", r.actual},
          {"actual_full", r.actual_full}, {"bound", r.bound},
          {"overlap", r.overlap}, {"M", r.m},
          {"M_samples", r.m_samples}, {"C", r.c},
          {"projected_norm", r.projected_norm}, {"kappa", r.kappa},
          {"holds", r.holds}};
}

json existence_to_json(const KPExistenceReport& r) {
  json theta = json::array();
  for (int i = 0; i < r.Theta.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < r.Theta.cols(); ++k) row.push_back(r.Theta(i, k));
    theta.push_back(row);
  }
  return {{"schema", kSchema},
          {"Delta", r.Delta},
          {"gamma0", r.gamma0},
          {"gamma_alpha", r.gamma_alpha},
          {"alpha", r.alpha},
          {"Theta", theta},
          {"Theta_norm", r.theta_norm},
          {"theta0", r.theta0},
          {"theta_angle", r.theta_angle},
          {"g", r.g},
          {"kappa", r.kappa},
          {"M_delta", r.M_delta},
          {"samples", r.samples},
          {"eps", r.eps},
          {"delta", r.delta},
          {"eta", r.eta},
          {"kappa_limit", r.kappa_limit},
          {"condition_i", r.condition_i},
          {"condition_ii", r.condition_ii},
          {"norm", r.norm == NormKind::ell2 ? "ell2" : "fock"}};
}

json path_summary_to_json(const Path& path) {
  json j = {{"schema", kSchema},
            {"points", path.points.size()},
            {"complete", path.complete},
            {"sign_flips", path.sign_flips}};
  if (!path.points.empty()) j["final_lambda"] = path.points.back().lambda;
  if (path.breakdown_lambda) {
    j["breakdown"] = {{"lambda", *path.breakdown_lambda},
                      {"residual_inf", path.breakdown_residual},
                      {"condition", path.condition},
                      {"diagnostic", path.diagnostic}};
  }
  return j;
}

std::string path_csv(const Path& path) {
  std::ostringstream out;
  out << "lambda,residual_inf,E_KP,sgn_det,step";
  const int d = path.points.empty() ? 0 : static_cast<int>(path.points.front().t.size());
  for (int a = 1; a <= d; ++a) out << ",t" << a;
  out << '\n';
  for (const PathPoint& pt : path.points) {
    out << format_double(pt.lambda) << ',' << format_double(pt.residual_inf) << ',' << format_double(pt.e_kp) << ','
        << pt.sgn_det << ',' << format_double(pt.step);
    for (int a = 0; a < d; ++a) out << ',' << format_double(pt.t(a));
    out << '\n';
  }
  return out.str();
}

#define CCDEG_INSTANTIATE(S)                                                    \
  template json amplitudes_to_json(const AmplitudeSpace&, const Vec<S>&);       \
  template Vec<S> amplitudes_from_json(const AmplitudeSpace&, const json&);     \
  template json solution_to_json(const CCProblem&, const CCSolution<S>&);       \
  template json degenerate_to_json(const DegenerateData<S>&);

CCDEG_INSTANTIATE(double)
CCDEG_INSTANTIATE(cplx)

}  // namespace ccdeg
