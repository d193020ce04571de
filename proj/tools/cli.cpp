// Copyright 2026 The cc-degree Authors
// SPDX-License-Identifier: Apache-2.0

#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <functional>
#include <iostream>
#include <variant>

namespace ccdeg::cli {

namespace {

using Member = std::variant<std::string RunConfig::*, int RunConfig::*, double RunConfig::*, bool RunConfig::*,
                            std::uint64_t RunConfig::*>;

struct FieldDesc {
  const char* key;
  Member member;
  const char* help;
};

const std::vector<FieldDesc>& fields() {
  static const std::vector<FieldDesc> f = {
      {"model", &RunConfig::model, "hubbard, pairing, random or file"},
      {"L", &RunConfig::L, "Hubbard sites"},
      {"t_hop", &RunConfig::t_hop, "Hubbard hopping"},
      {"U", &RunConfig::U, "Hubbard on-site repulsion"},
      {"periodic", &RunConfig::periodic, "periodic Hubbard chain"},
      {"levels", &RunConfig::levels, "pairing levels"},
      {"gap", &RunConfig::gap, "pairing level spacing"},
      {"coupling", &RunConfig::coupling, "pairing strength"},
      {"orbitals", &RunConfig::orbitals, "random model spin orbitals"},
      {"model_seed", &RunConfig::model_seed, "random model seed"},
      {"scale", &RunConfig::scale, "random model two-body scale"},
      {"integrals", &RunConfig::integrals, "integral file for model=file"},
      {"K", &RunConfig::K, "spin orbitals of the integral file"},
      {"N", &RunConfig::N, "electrons"},
      {"scheme", &RunConfig::scheme, "full, doubles, sd, sdt or ranks:..."},
      {"field", &RunConfig::field, "real or complex"},
      {"tol", &RunConfig::tol, "Newton residual tolerance"},
      {"max_iter", &RunConfig::max_iter, "Newton iterations"},
      {"rho", &RunConfig::rho, "cut rank of the homotopy split"},
      {"out", &RunConfig::out, "output directory"},
      {"seed", &RunConfig::seed, "sampling seed"},
      {"starts", &RunConfig::starts, "multistart count"},
      {"radius", &RunConfig::radius, "multistart box half-width"},
      {"homotopy", &RunConfig::homotopy, "kp or linear"},
      {"alpha", &RunConfig::alpha, "linear homotopy alpha"},
      {"state", &RunConfig::state, "FCI state index (-1: match the solution energy)"},
      {"exist_alpha", &RunConfig::exist_alpha, "coercivity shift (negative: automatic)"},
      {"eps", &RunConfig::eps, "Young parameter of the existence report"},
      {"delta", &RunConfig::delta, "ball radius of the existence report"},
      {"samples", &RunConfig::samples, "samples for sampled suprema"},
      {"norm", &RunConfig::norm, "ell2 or fock"},
      {"solution", &RunConfig::solution, "input solution JSON"},
      {"output", &RunConfig::output, "output file (overrides the default name)"},
  };
  return f;
}

std::string flag_name(const char* key) {
  std::string s = std::string("--") + key;
  for (char& ch : s)
    if (ch == '_') ch = '-';
  return s;
}

std::string output_path(const RunConfig& c, const std::string& name) {
  return c.output.empty() ? (std::filesystem::path(c.out) / name).string() : c.output;
}

// Secondary artifacts always go to the output directory.
std::string side_path(const RunConfig& c, const std::string& name) {
  return (std::filesystem::path(c.out) / name).string();
}

NewtonOptions newton_options(const RunConfig& c) {
  NewtonOptions o;
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  return o;
}

Field parse_field(const std::string& f) {
  if (f == "real") return Field::real;
  if (f == "complex") return Field::complex;
  throw ValidationError("unknown field '" + f + "'");
}

struct Loaded {
  RunConfig cfg;  // the configuration the solution was computed with
  CCProblem problem;
  Field field = Field::real;
  json solution;
};

Loaded load_solution(const RunConfig& c) {
  if (c.solution.empty()) throw ValidationError("--solution is required");
  Loaded l;
  l.solution = parse_json_file(c.solution);
  if (!l.solution.is_object() || !l.solution.contains("t") || !l.solution.contains("config"))
    throw ValidationError("solution file lacks 't' or 'config'");
  merge_config(l.cfg, l.solution["config"]);
  l.problem = build_setup(l.cfg).problem;
  l.field = field_from_json(l.solution);
  return l;
}

template <class S>
Vec<S> solution_amplitudes(const Loaded& l) {
  return amplitudes_from_json<S>(l.problem.sp(), l.solution["t"]);
}

Eigen::VectorXd real_amplitudes(const Loaded& l) {
  if (l.field != Field::real) throw ValidationError("homotopy commands need a real solution");
  return solution_amplitudes<double>(l);
}

void emit(const std::string& path, const std::string& text) {
  write_text_file(path, text);
  std::cout << path << '\n';
}

json with_config(json j, const RunConfig& c) {
  j["config"] = config_to_json(c);
  return j;
}

int cmd_model(const RunConfig& c) {
  const Integrals ints = build_integrals(c);
  const std::string path = output_path(c, "integrals.txt");
  const std::string tmp = path + ".part";
  if (const auto dir = std::filesystem::path(path).parent_path(); !dir.empty()) std::filesystem::create_directories(dir);
  save_integrals(ints, tmp);
  std::filesystem::rename(tmp, path);
  std::cout << path << '\n';
  return 0;
}

int cmd_scf(const RunConfig& c) {
  const ProblemSetup s = build_setup(c);
  emit(output_path(c, "scf.json"), dump_json(with_config(mean_field_to_json(s.mf), c)));
  return s.mf.converged ? 0 : 3;
}

int cmd_fci(const RunConfig& c) {
  RunConfig full = c;
  full.scheme = "full";
  const CCProblem p = build_setup(full).problem;
  const FciResult f = fci_solve(p.H);
  json weights = json::array();
  for (int k = 0; k < f.values.size(); ++k) weights.push_back(std::abs(f.vectors(0, k)));
  json j = {{"schema", kSchema},
            {"dimension", f.values.size()},
            {"values", std::vector<double>(f.values.data(), f.values.data() + f.values.size())},
            {"reference_weights", weights}};
  emit(output_path(c, "fci.json"), dump_json(with_config(j, c)));
  return 0;
}

template <class S>
int solve_impl(const RunConfig& c) {
  const CCProblem p = build_setup(c).problem;
  Vec<S> t0 = Vec<S>::Zero(p.dim());
  if (!c.solution.empty()) t0 = solution_amplitudes<S>(load_solution(c));
  const CCSolution<S> s = newton_solve<S>(p, t0, newton_options(c));
  emit(output_path(c, "solution.json"), dump_json(with_config(solution_to_json<S>(p, s), c)));
  if (!s.converged) throw NumericalError("Newton did not converge");
  return 0;
}

int cmd_solve(const RunConfig& c) {
  return parse_field(c.field) == Field::real ? solve_impl<double>(c) : solve_impl<cplx>(c);
}

template <class S>
int multistart_impl(const RunConfig& c) {
  const CCProblem p = build_setup(c).problem;
  const std::vector<CCSolution<S>> sols =
      multistart_solve<S>(p, Sampler{c.seed, c.radius, c.starts}, newton_options(c));
  json list = json::array();
  for (const auto& s : sols) list.push_back(solution_to_json<S>(p, s));
  json j = {{"schema", kSchema}, {"count", sols.size()}, {"solutions", list}};
  emit(output_path(c, "multistart.json"), dump_json(with_config(j, c)));
  return 0;
}

int cmd_multistart(const RunConfig& c) {
  if (c.starts < 1 || !(c.radius > 0.0)) throw ValidationError("multistart needs starts >= 1 and radius > 0");
  return parse_field(c.field) == Field::real ? multistart_impl<double>(c) : multistart_impl<cplx>(c);
}

template <class S>
int index_impl(const RunConfig& c, const Loaded& l) {
  const Vec<S> t = solution_amplitudes<S>(l);
  const IndexReport r = index_nondegenerate<S>(l.problem, t);
  json j = index_report_to_json(r);
  bool resolved = r.index.has_value();
  if (r.degenerate) {
    DegenerateOptions o;
    o.seed = c.seed;
    const DegenerateData<S> d = degenerate_index<S>(l.problem, t, o);
    j["degenerate_analysis"] = degenerate_to_json<S>(d);
    j["index"] = d.index ? json(*d.index) : json(nullptr);
    resolved = d.index.has_value();
  }
  emit(output_path(c, "index.json"), dump_json(j));
  if (!resolved) throw NumericalError("index unresolved at a degenerate zero");
  return 0;
}

int cmd_index(const RunConfig& c) {
  const Loaded l = load_solution(c);
  return l.field == Field::real ? index_impl<double>(c, l) : index_impl<cplx>(c, l);
}

int cmd_eom(const RunConfig& c) {
  const Loaded l = load_solution(c);
  const EOMReport r = l.field == Field::real ? eom_spectrum<double>(l.problem, solution_amplitudes<double>(l))
                                             : eom_spectrum<cplx>(l.problem, solution_amplitudes<cplx>(l));
  emit(output_path(c, "eom.json"), dump_json(eom_to_json(r)));
  return 0;
}

Homotopy make_homotopy(const RunConfig& c, const CCProblem& p, const Eigen::VectorXd& t) {
  Homotopy h;
  if (c.homotopy == "kp") {
    h.kind = HomotopyKind::kp;
    h.split = make_split(p, c.rho);
  } else if (c.homotopy == "linear") {
    h.kind = HomotopyKind::linear;
    h.split = make_subspace_split(p, TruncationScheme::up_to(c.rho));
    h.lin = {c.alpha, h.split.project_angle(t)};
  } else {
    throw ValidationError("unknown homotopy '" + c.homotopy + "'");
  }
  return h;
}

CCSolution<double> as_start(const CCProblem& p, const Eigen::VectorXd& t) {
  CCSolution<double> s;
  s.t = t;
  s.energy = cc_energy<double>(p, t);
  s.residual_inf = cc_residual<double>(p, t).cwiseAbs().maxCoeff();
  s.converged = true;
  return s;
}

int cmd_trace(const RunConfig& c) {
  const Loaded l = load_solution(c);
  const Eigen::VectorXd t = real_amplitudes(l);
  const Path path = trace_path(l.problem, make_homotopy(c, l.problem, t), as_start(l.problem, t));
  json summary = path_summary_to_json(path);
  summary["homotopy"] = c.homotopy;
  summary["rho"] = c.rho;
  const std::string csv = path_csv(path);
  emit(output_path(c, "path.csv"), csv);
  emit(side_path(c, "path.json"), dump_json(summary));
  if (!path.complete) throw NumericalError("path breakdown at lambda = " + format_double(*path.breakdown_lambda));
  return 0;
}

Path kp_path(const RunConfig& c, const Loaded& l, const Eigen::VectorXd& t) {
  Homotopy h;
  h.split = make_split(l.problem, c.rho);
  Path path = trace_path(l.problem, h, as_start(l.problem, t));
  if (!path.complete) throw NumericalError("KP path breakdown at lambda = " + format_double(*path.breakdown_lambda));
  return path;
}

int cmd_kp_verify(const RunConfig& c) {
  const Loaded l = load_solution(c);
  const Eigen::VectorXd t = real_amplitudes(l);
  const FciResult f = fci_solve(l.problem.H);
  int k = c.state;
  if (k < 0) {
    const double e = cc_energy<double>(l.problem, t);
    (f.values.array() - e).abs().minCoeff(&k);
  }
  if (k >= f.values.size()) throw ValidationError("state index out of range");
  const Path path = kp_path(c, l, t);
  const SplitSpec split = make_split(l.problem, c.rho);
  json points = json::array();
  double worst = 0.0;
  for (const PathPoint& pt : path.points) {
    json v = verify_to_json(kp_verify(l.problem, split, f.vectors.col(k), f.values(k), pt.t, pt.lambda));
    v["lambda"] = pt.lambda;
    worst = std::max(worst, v["residual"].get<double>());
    points.push_back(v);
  }
  json j = {{"schema", kSchema}, {"state", k}, {"energy", f.values(k)}, {"rho", c.rho},
            {"points", points}, {"max_residual", worst}};
  emit(output_path(c, "kp_verify.json"), dump_json(j));
  return 0;
}

int cmd_kp_exist(const RunConfig& c) {
  const Loaded l = load_solution(c);
  const Eigen::VectorXd t = real_amplitudes(l);
  ExistenceOptions o;
  if (c.exist_alpha >= 0.0) o.alpha = c.exist_alpha;
  o.eps = c.eps;
  o.delta = c.delta;
  o.samples = c.samples;
  o.seed = c.seed;
  if (c.norm == "ell2") o.norm = NormKind::ell2;
  else if (c.norm == "fock") o.norm = NormKind::fock;
  else throw ValidationError("unknown norm '" + c.norm + "'");
  const KPExistenceReport r = kp_existence_report(l.problem, make_split(l.problem, c.rho), t, o);
  json j = existence_to_json(r);
  j["rho"] = c.rho;
  emit(output_path(c, "kp_exist.json"), dump_json(j));
  return 0;
}

int cmd_error_est(const RunConfig& c) {
  const Loaded l = load_solution(c);
  const Eigen::VectorXd t = real_amplitudes(l);
  const Path path = kp_path(c, l, t);
  const ErrorEstimateReport r =
      energy_error_estimate(l.problem, make_split(l.problem, c.rho), path.points.back().t, t, c.samples);
  json j = error_estimate_to_json(r);
  j["rho"] = c.rho;
  emit(output_path(c, "error_est.json"), dump_json(j));
  return 0;
}

void report_error(const char* kind, const std::string& message) {
  std::cerr << dump_json({{"schema", kSchema}, {"error", kind}, {"message", message}});
}

}  // namespace

json config_to_json(const RunConfig& c) {
  json j = json::object();
  for (const FieldDesc& f : fields()) std::visit([&](auto m) { j[f.key] = c.*m; }, f.member);
  return j;
}

void merge_config(RunConfig& c, const json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const FieldDesc* f = nullptr;
    for (const FieldDesc& d : fields())
      if (it.key() == d.key) f = &d;
    if (!f) throw ValidationError("unknown config key '" + it.key() + "'");
    std::visit(
        [&](auto m) {
          using T = std::remove_reference_t<decltype(c.*m)>;
          const json& v = it.value();
          bool ok = false;
          if constexpr (std::is_same_v<T, std::string>) ok = v.is_string();
          else if constexpr (std::is_same_v<T, bool>) ok = v.is_boolean();
          else if constexpr (std::is_same_v<T, double>) ok = v.is_number();
          else if constexpr (std::is_same_v<T, std::uint64_t>)
            ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
          else ok = v.is_number_integer();
          if (!ok) throw ValidationError("config key '" + it.key() + "' has the wrong type");
          c.*m = v.get<T>();
        },
        f->member);
  }
}

Integrals build_integrals(const RunConfig& c) {
  if (c.model == "file") {
    if (c.integrals.empty()) throw ValidationError("model=file needs --integrals");
    return load_integrals(c.integrals, c.K > 0 ? std::optional<int>(c.K) : std::nullopt);
  }
  ModelSpec spec;
  spec.N = c.N;
  if (c.model == "hubbard") spec.variant = HubbardChain{c.L, c.t_hop, c.U, c.periodic};
  else if (c.model == "pairing") spec.variant = Pairing{c.levels, c.gap, c.coupling};
  else if (c.model == "random") spec.variant = RandomModel{c.orbitals, c.model_seed, c.scale};
  else throw ValidationError("unknown model '" + c.model + "'");
  return build_model(spec);
}

ProblemSetup build_setup(const RunConfig& c) {
  return setup_problem(build_integrals(c), c.N, TruncationScheme::parse(c.scheme));
}

int run(int argc, char** argv) {
  CLI::App app{"Coupled-cluster root structure, indices and homotopies"};
  app.require_subcommand(1);
  RunConfig flags;
  std::string config_path;
  std::vector<std::pair<CLI::Option*, const FieldDesc*>> bound;

  using Handler = std::function<int(const RunConfig&)>;
  const std::vector<std::tuple<const char*, const char*, Handler>> commands = {
      {"model", "write the model integrals", cmd_model},
      {"scf", "mean-field orbitals and energies", cmd_scf},
      {"fci", "full configuration interaction spectrum", cmd_fci},
      {"solve", "Newton solve of the CC equations", cmd_solve},
      {"multistart", "distinct zeros from random starts", cmd_multistart},
      {"index", "topological index of a solution", cmd_index},
      {"eom", "EOM shifts at a solution", cmd_eom},
      {"trace", "trace a homotopy path from a solution", cmd_trace},
      {"kp-verify", "check the KP energy identity along the KP path", cmd_kp_verify},
      {"kp-exist", "constants of the KP existence conditions", cmd_kp_exist},
      {"error-est", "energy error estimate at the KP endpoint", cmd_error_est},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config file; flags override it");
    for (const FieldDesc& f : fields()) {
      CLI::Option* o = std::visit(
          [&](auto m) -> CLI::Option* {
            using T = std::remove_reference_t<decltype(flags.*m)>;
            if constexpr (std::is_same_v<T, bool>) return sub->add_flag(flag_name(f.key), flags.*m, f.help);
            else return sub->add_option(flag_name(f.key), flags.*m, f.help);
          },
          f.member);
      bound.emplace_back(o, &f);
    }
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    report_error("validation", e.what());
    return 2;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) merge_config(cfg, parse_json_file(config_path));
    for (const auto& [opt, f] : bound) {
      if (opt->count() == 0) continue;
      std::visit([&](auto m) { cfg.*m = flags.*m; }, f->member);
    }
    for (std::size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) return std::get<2>(commands[i])(cfg);
    return 2;
  } catch (const ValidationError& e) {
    report_error("validation", e.what());
    return 2;
  } catch (const json::exception& e) {
    report_error("validation", e.what());
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    report_error("validation", e.what());
    return 2;
  } catch (const NumericalError& e) {
    report_error("numerical", e.what());
    return 3;
  } catch (const std::exception& e) {
    report_error("numerical", e.what());
    return 3;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<char*> argv;
  std::vector<std::string> copy = args;
  for (std::string& s : copy) argv.push_back(s.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace ccdeg::cli
