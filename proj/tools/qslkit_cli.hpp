// Copyright 2026 The qslkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Everything lives in this header so the test suite
// can drive run() in-process.
//
// Exit codes: 0 ok, 1 usage, 2 model or parse error, 3 domain error,
// 4 numeric failure, 5 solver residual above tolerance.
#pragma once

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "qslkit/qslkit.hpp"

namespace qslkit::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kModelError = 2, kDomainError = 3, kNumericError = 4, kResidual = 5 };

class UsageError : public Error {
 public:
  using Error::Error;
};

class ResidualError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline std::string num(double v) { return format_value(v); }

inline std::string num(const ExtendedReal& v) { return v.is_infinite() ? "infinity" : format_value(v.value()); }

inline std::string num(cplx c) {
  if (c.imag() == 0.0) return num(c.real());
  if (c.real() == 0.0) return num(c.imag()) + "i";
  const std::string im = num(c.imag());
  return num(c.real()) + (im.front() == '-' ? "" : "+") + im + "i";
}

inline double round7(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_value(v).c_str(), nullptr);
}

/// Rounds every floating-point leaf to seven significant digits.
inline json rounded(const json& j) {
  if (j.is_number_float()) return round7(j.get<double>());
  if (j.is_array() || j.is_object()) {
    json out = j;
    for (auto& item : out) item = rounded(item);
    return out;
  }
  return j;
}

inline json extended(const ExtendedReal& v) {
  return v.is_infinite() ? json("infinity") : json(v.value());
}

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return out;
}

/// "A:B:N", N >= 1 evenly spaced points including both ends.
inline std::vector<double> parse_range(const std::string& text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
  if (c2 == std::string::npos) throw UsageError("--range: expected A:B:N, got '" + text + "'");
  try {
    std::size_t used = 0;
    const std::string sa = text.substr(0, c1);
    const std::string sb = text.substr(c1 + 1, c2 - c1 - 1);
    const std::string sn = text.substr(c2 + 1);
    const double a = std::stod(sa, &used);
    if (used != sa.size()) throw std::invalid_argument(sa);
    const double b = std::stod(sb, &used);
    if (used != sb.size()) throw std::invalid_argument(sb);
    const int n = std::stoi(sn, &used);
    if (used != sn.size()) throw std::invalid_argument(sn);
    if (n < 1 || n > 1000000) throw DomainError("--range: point count must lie in [1, 1000000]");
    if (!std::isfinite(a) || !std::isfinite(b)) throw DomainError("--range: endpoints must be finite");
    return linspace(a, b, n);
  } catch (const std::invalid_argument&) {
    throw UsageError("--range: expected A:B:N, got '" + text + "'");
  } catch (const std::out_of_range&) {
    throw UsageError("--range: value out of range in '" + text + "'");
  }
}

/// Zeroes entries below 1e-12 of the largest magnitude, for display only.
inline ComplexMatrix chopped(ComplexMatrix m) {
  const double cut = 1e-12 * (m.size() ? m.cwiseAbs().maxCoeff() : 0.0);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    cplx& c = m.data()[i];
    c = cplx(std::abs(c.real()) < cut ? 0.0 : c.real(), std::abs(c.imag()) < cut ? 0.0 : c.imag());
  }
  return m;
}

inline Eigen::VectorXd chopped(Eigen::VectorXd v) {
  const double cut = 1e-12 * (v.size() ? v.cwiseAbs().maxCoeff() : 0.0);
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) < cut) v[i] = 0.0;
  }
  return v;
}

inline std::string matrix_text(const ComplexMatrix& m, const std::string& indent) {
  std::string out;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out += indent + "[";
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out += ", ";
      out += num(m(r, c));
    }
    out += "]\n";
  }
  return out;
}

inline std::string vector_text(const Eigen::VectorXd& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += num(v[i]);
  }
  return out + "]";
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Options shared by the model-driven subcommands.
struct LambdaOptions {
  double lambda = 0.0;
  double theta = 0.0;
  CLI::Option* lambda_opt = nullptr;
  CLI::Option* theta_opt = nullptr;

  void attach(CLI::App* sub) {
    lambda_opt = sub->add_option("--lambda", lambda, "Region radius lambda in (0, 1]");
    theta_opt = sub->add_option("--theta", theta, "Region radius as a relative-purity angle in (0, pi/2]");
    lambda_opt->excludes(theta_opt);
  }

  double resolve(const std::optional<double>& from_model) const {
    if (lambda_opt->count()) return lambda;
    if (theta_opt->count()) return lambda_from_theta(theta);
    if (from_model) return *from_model;
    throw UsageError("one of --lambda or --theta is required (the model file has no lambda)");
  }
};

struct HamiltonianOptions {
  std::string expression;
  bool optimal = false;
  CLI::Option* expression_opt = nullptr;

  void attach(CLI::App* sub) {
    expression_opt = sub->add_option("--hamiltonian", expression, "Replace the model Hamiltonians by this expression");
    auto* opt = sub->add_flag("--optimal", optimal, "Replace the model Hamiltonians by the engineered optimum");
    expression_opt->excludes(opt);
  }

  SystemModel apply(const LoadedModel& loaded) const {
    if (expression_opt->count()) {
      return loaded.model.with_hamiltonians({parse_operator(expression, loaded.model.dim())});
    }
    if (optimal) {
      const EngineeringSolution sol = solve_optimal(EngineeringProblem(loaded.psi0, loaded.model.channels()));
      return loaded.model.with_hamiltonians({sol.h_opt});
    }
    return loaded.model;
  }
};

// Grid outputs: CSV to --out with a summary line, CSV to stdout without
// --out, or the full table as JSON with --json.
struct TableOutput {
  std::string path;
  bool as_json = false;

  void attach(CLI::App* sub) {
    sub->add_option("--out", path, "CSV output file");
    sub->add_flag("--json", as_json, "Print the table as JSON");
  }

  void emit(const std::vector<CsvColumn>& columns, std::ostream& out, const std::string& summary) const {
    if (!path.empty()) {
      write_csv(columns, path);
    }
    if (as_json) {
      json j = json::object();
      for (const auto& c : columns) j[c.name] = c.values;
      if (!path.empty()) j["out"] = path;
      out << rounded(j).dump(2) << "\n";
    } else if (!path.empty()) {
      out << summary << "wrote " << columns.front().values.size() << " rows to " << path << "\n";
    } else {
      out << format_csv(columns);
    }
  }
};

inline std::vector<CsvColumn> report_columns(const std::string& param, const std::vector<double>& grid,
                                             const std::vector<QslReport>& reports) {
  std::vector<CsvColumn> cols{{param, grid},       {"amplitude", {}}, {"excess", {}}, {"k", {}},
                              {"t_star", {}},      {"t_dc", {}},      {"ratio", {}}};
  for (const auto& r : reports) {
    cols[1].values.push_back(r.amplitude);
    cols[2].values.push_back(r.excess);
    cols[3].values.push_back(r.k);
    cols[4].values.push_back(r.t_star.as_double());
    cols[5].values.push_back(r.t_dc.as_double());
    cols[6].values.push_back(r.ratio ? *r.ratio : std::nan(""));
  }
  return cols;
}

inline std::string yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace detail

/// Runs one command line (argv[0] is the program name) and returns the exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  using namespace detail;
  CLI::App app{"Quantum speed limits for Markovian open systems"};
  app.name("qslkit");
  app.require_subcommand(1);

  // qsl
  auto* qsl = app.add_subcommand("qsl", "Bound report for the model's initial state");
  std::string qsl_model;
  bool qsl_json = false;
  LambdaOptions qsl_lambda;
  qsl->add_option("--model", qsl_model, "Model file")->required();
  qsl_lambda.attach(qsl);
  qsl->add_flag("--json", qsl_json, "Print JSON");

  // simulate
  auto* sim = app.add_subcommand("simulate", "Integrate the master equation and record cos Theta_t");
  std::string sim_model;
  double sim_tmax = 0.0;
  double sim_step = 0.0;
  HamiltonianOptions sim_h;
  TableOutput sim_out;
  sim->add_option("--model", sim_model, "Model file")->required();
  sim->add_option("--tmax", sim_tmax, "Final time")->required();
  auto* sim_step_opt = sim->add_option("--step", sim_step, "RK4 step (default 0.01 / (1 + rate scale))");
  sim_h.attach(sim);
  sim_out.attach(sim);

  // escape
  auto* esc = app.add_subcommand("escape", "First exit time from the robustness region");
  std::string esc_model;
  double esc_tmax = 0.0;
  double esc_step = 0.0;
  bool esc_json = false;
  LambdaOptions esc_lambda;
  HamiltonianOptions esc_h;
  esc->add_option("--model", esc_model, "Model file")->required();
  esc_lambda.attach(esc);
  auto* esc_tmax_opt = esc->add_option("--tmax", esc_tmax, "Integration horizon");
  auto* esc_step_opt = esc->add_option("--step", esc_step, "RK4 step");
  esc_h.attach(esc);
  esc->add_flag("--json", esc_json, "Print JSON");

  // rank
  auto* rank = app.add_subcommand("rank", "Order states by T*, most robust first");
  std::string rank_model;
  std::string rank_states_path;
  bool rank_json = false;
  LambdaOptions rank_lambda;
  rank->add_option("--model", rank_model, "Model file")->required();
  rank->add_option("--states", rank_states_path, "States file")->required();
  rank_lambda.attach(rank);
  rank->add_flag("--json", rank_json, "Print JSON");

  // optimize
  auto* opt = app.add_subcommand("optimize", "Hamiltonian that maximizes T* for the initial state");
  std::string opt_model;
  std::string opt_out;
  bool opt_json = false;
  opt->add_option("--model", opt_model, "Model file")->required();
  opt->add_option("--out", opt_out, "Write the solution as JSON");
  opt->add_flag("--json", opt_json, "Print JSON");

  // ratio-grid
  auto* grid = app.add_subcommand("ratio-grid", "T*/T_DC over a (k, lambda) grid");
  double grid_kmax = kMaxExcessRatio;
  double grid_lmax = 1.0;
  int grid_n = 50;
  TableOutput grid_out;
  grid->add_option("--kmax", grid_kmax, "Largest k (at most 1/sqrt(2))");
  grid->add_option("--lmax", grid_lmax, "Largest lambda (at most 1)");
  grid->add_option("--n", grid_n, "Points per axis");
  grid_out.attach(grid);

  // scan
  auto* scan = app.add_subcommand("scan", "Bound report along one parameter");
  std::string scan_model;
  std::string scan_param;
  std::string scan_range;
  double scan_phi = 0.0;
  LambdaOptions scan_lambda;
  TableOutput scan_out;
  scan->add_option("--model", scan_model, "Model file")->required();
  scan->add_option("--param", scan_param, "theta, gamma or lambda")
      ->required()
      ->check(CLI::IsMember({"theta", "gamma", "lambda"}));
  scan->add_option("--range", scan_range, "A:B:N")->required();
  scan->add_option("--phi", scan_phi, "Relative phase for a theta scan");
  scan_lambda.attach(scan);
  scan_out.attach(scan);

  // ensemble-scaling
  auto* ens = app.add_subcommand("ensemble-scaling", "T* of product and GHZ states against qubit number");
  int ens_nmax = 10;
  double ens_gamma = 1.0;
  LambdaOptions ens_lambda;
  TableOutput ens_out;
  ens->add_option("--nmax", ens_nmax, "Largest qubit number (1..12)");
  ens->add_option("--gamma", ens_gamma, "Dephasing rate");
  ens_lambda.attach(ens);
  ens_out.attach(ens);

  // scenario
  auto* scen = app.add_subcommand("scenario", "Write a built-in example as a model file");
  std::string scen_name;
  std::string scen_state;
  std::string scen_out;
  double scen_omega = 1.0;
  double scen_gamma = 1.0;
  double scen_theta = 0.0;
  double scen_phi = 0.0;
  double scen_lambda = 0.0;
  int scen_n = 2;
  bool scen_list = false;
  scen->add_option("name", scen_name, "Scenario name");
  scen->add_flag("--list", scen_list, "List scenario names");
  scen->add_option("--omega", scen_omega, "Hamiltonian frequency");
  scen->add_option("--gamma", scen_gamma, "Channel rate");
  auto* scen_theta_opt = scen->add_option("--theta", scen_theta, "State angle");
  scen->add_option("--phi", scen_phi, "State phase");
  scen->add_option("--n", scen_n, "Qubit number for the ensemble");
  scen->add_option("--state", scen_state, "Bell state (phi+, phi-, psi+, psi-) or ensemble state (product, ghz)");
  auto* scen_lambda_opt = scen->add_option("--lambda", scen_lambda, "Lambda stored in the model file");
  scen->add_option("--out", scen_out, "Output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (qsl->parsed()) {
      const LoadedModel m = load_model(qsl_model);
      const QslReport r = qsl_report(m.model, m.psi0, qsl_lambda.resolve(m.lambda));
      if (qsl_json) {
        out << rounded(to_json(r)).dump(2) << "\n";
        return kOk;
      }
      out << "A = " << num(r.amplitude) << "\n"
          << "E = " << num(r.excess) << "\n"
          << "k = " << num(r.k) << "\n"
          << "lambda = " << num(r.lambda) << "\n"
          << "theta_T = " << num(r.theta_T) << "\n";
      if (r.stationary) {
        out << "T* = infinity (stationary)\n"
            << "T_DC = infinity\n"
            << "T*/T_DC = undefined\n";
      } else {
        out << "T* = " << num(r.t_star) << "\n"
            << "T_DC = " << num(r.t_dc) << "\n"
            << "T*/T_DC = " << num(*r.ratio) << "\n";
      }
      out << "closed system: " << yes_no(r.closed_system) << "\n"
          << "stationary: " << yes_no(r.stationary) << "\n";
      return kOk;
    }

    if (sim->parsed()) {
      const LoadedModel m = load_model(sim_model);
      const SystemModel model = sim_h.apply(m);
      const double h = sim_step_opt->count() ? sim_step : default_step(model);
      EvolveOptions eo;
      eo.store_states = false;
      const Trajectory traj = evolve(model, m.psi0, sim_tmax, h, eo);
      std::size_t imin = 0;
      for (std::size_t i = 1; i < traj.overlaps.size(); ++i) {
        if (traj.overlaps[i] < traj.overlaps[imin]) imin = i;
      }
      const std::string summary = "minimum overlap " + num(traj.overlaps[imin]) + " at t = " +
                                  num(traj.times[imin]) + ", final overlap " + num(traj.overlaps.back()) + "\n";
      sim_out.emit({{"time", traj.times}, {"overlap", traj.overlaps}}, out, summary);
      return kOk;
    }

    if (esc->parsed()) {
      const LoadedModel m = load_model(esc_model);
      const double lambda = esc_lambda.resolve(m.lambda);
      const SystemModel model = esc_h.apply(m);
      const double t_max = esc_tmax_opt->count() ? esc_tmax : default_t_max(model);
      const double h = esc_step_opt->count() ? esc_step : default_step(model);
      const EscapeResult e = escape_time(model, m.psi0, lambda, t_max, h);
      const QslReport r = qsl_report(model, m.psi0, lambda);
      const bool violated = e.escaped && !r.t_star.is_infinite() && e.time < r.t_star.value() * (1.0 - 1e-9);
      if (violated) {
        err << "warning: escape time " << num(e.time) << " is below T* = " << num(r.t_star)
            << "; reduce --step\n";
      }
      if (esc_json) {
        json j = to_json(e);
        j["t_star"] = extended(r.t_star);
        j["t_dc"] = extended(r.t_dc);
        j["bound_holds"] = !violated;
        out << rounded(j).dump(2) << "\n";
        return kOk;
      }
      if (!e.escaped) {
        out << "not escaped within tmax = " << num(t_max) << "\n"
            << "T* = " << num(r.t_star) << "\n";
        return kOk;
      }
      out << "T = " << num(e.time) << "\n"
          << "T* = " << num(r.t_star) << "\n"
          << "T_DC = " << num(r.t_dc) << "\n"
          << "T >= T*: " << yes_no(!violated) << "\n";
      return kOk;
    }

    if (rank->parsed()) {
      const LoadedModel m = load_model(rank_model);
      const double lambda = rank_lambda.resolve(m.lambda);
      const std::vector<NamedState> named = load_states(rank_states_path, m.model.dim());
      std::vector<PureState> states;
      for (const auto& s : named) states.push_back(s.state);
      const std::vector<RankEntry> order = rank_states(m.model, states, lambda);
      if (rank_json) {
        json j = json::array();
        for (std::size_t i = 0; i < order.size(); ++i) {
          j.push_back({{"rank", i + 1}, {"name", named[order[i].index].name}, {"t_star", extended(order[i].t_star)}});
        }
        out << rounded(j).dump(2) << "\n";
        return kOk;
      }
      for (std::size_t i = 0; i < order.size(); ++i) {
        out << (i + 1) << ". " << named[order[i].index].name << "  T* = " << num(order[i].t_star) << "\n";
      }
      return kOk;
    }

    if (opt->parsed()) {
      const LoadedModel m = load_model(opt_model);
      const EngineeringProblem problem(m.psi0, m.model.channels());
      EngineeringSolution sol;
      try {
        sol = solve_optimal(problem);
      } catch (const NumericError& e) {
        throw ResidualError(e.what());
      }
      if (!(sol.residual_norm <= problem.residual_tolerance())) {
        throw ResidualError("optimize: stationarity residual " + num(sol.residual_norm) + " exceeds tolerance " +
                            num(problem.residual_tolerance()));
      }
      const double a_before = amplitude(m.model, m.psi0);
      const double a_after = amplitude(m.model.with_hamiltonians({sol.h_opt}), m.psi0);
      if (!opt_out.empty()) write_report(sol, opt_out);
      if (opt_json) {
        json j = to_json(sol);
        j["amplitude_before"] = a_before;
        j["amplitude_after"] = a_after;
        out << rounded(j).dump(2) << "\n";
        return kOk;
      }
      out << "u = " << vector_text(chopped(sol.u)) << "\n"
          << "H_opt =\n"
          << matrix_text(chopped(sol.h_opt), "  ") << "nullspace dimension = " << sol.nullspace.size() << "\n";
      for (const auto& v : sol.nullspace) out << "  " << vector_text(chopped(v)) << "\n";
      out << "F(H_opt) = " << num(sol.cost_value) << "\n"
          << "residual = " << num(sol.residual_norm) << "\n"
          << "A before = " << num(a_before) << "\n"
          << "A after = " << num(a_after) << "\n";
      return kOk;
    }

    if (grid->parsed()) {
      if (!(grid_kmax > 0.0 && grid_kmax <= kMaxExcessRatio * (1.0 + 1e-9))) {
        throw DomainError("--kmax must lie in (0, 1/sqrt(2)]");
      }
      if (!(grid_lmax > 0.0 && grid_lmax <= 1.0)) throw DomainError("--lmax must lie in (0, 1]");
      if (grid_n < 2 || grid_n > 2000) throw DomainError("--n must lie in [2, 2000]");
      const auto n = static_cast<std::size_t>(grid_n);
      std::vector<double> ks(n * n), lambdas(n * n), ratios(n * n);
      parallel_for(n, [&](std::size_t i) {
        const double k = grid_kmax * static_cast<double>(i) / static_cast<double>(n - 1);
        for (std::size_t j = 0; j < n; ++j) {
          const double lambda = grid_lmax * static_cast<double>(j + 1) / static_cast<double>(n);
          ks[i * n + j] = k;
          lambdas[i * n + j] = lambda;
          ratios[i * n + j] = bound_ratio(k, lambda);
        }
      });
      grid_out.emit({{"k", ks}, {"lambda", lambdas}, {"ratio", ratios}}, out, "");
      return kOk;
    }

    if (scan->parsed()) {
      const LoadedModel m = load_model(scan_model);
      const std::vector<double> values = parse_range(scan_range);
      std::vector<QslReport> reports(values.size());
      if (scan_param == "lambda") {
        parallel_for(values.size(), [&](std::size_t i) { reports[i] = qsl_report(m.model, m.psi0, values[i]); });
      } else if (scan_param == "gamma") {
        const double lambda = scan_lambda.resolve(m.lambda);
        for (double g : values) {
          if (!(g >= 0.0)) throw DomainError("gamma scan: values must be nonnegative");
        }
        parallel_for(values.size(), [&](std::size_t i) {
          reports[i] = qsl_report(m.model.with_channel_strength(values[i]), m.psi0, lambda);
        });
      } else {
        if (m.model.dim() != 2) throw ModelError("theta scan: requires a two-level model");
        const double lambda = scan_lambda.resolve(m.lambda);
        parallel_for(values.size(), [&](std::size_t i) {
          ComplexVector v(2);
          v << std::cos(values[i]), std::polar(1.0, scan_phi) * std::sin(values[i]);
          reports[i] = qsl_report(m.model, PureState::normalized(std::move(v)), lambda);
        });
      }
      scan_out.emit(report_columns(scan_param, values, reports), out, "");
      return kOk;
    }

    if (ens->parsed()) {
      if (ens_nmax < 1 || ens_nmax > kMaxQubits) throw DomainError("--nmax must lie in [1, 12]");
      const double lambda = ens_lambda.resolve(std::optional<double>(0.1));
      CsvColumn ns{"N", {}}, ap{"amplitude_product", {}}, ep{"excess_product", {}}, tp{"t_star_product", {}},
          ag{"amplitude_ghz", {}}, eg{"excess_ghz", {}}, tg{"t_star_ghz", {}};
      for (int n = 1; n <= ens_nmax; ++n) {
        const auto [product, ghz] = ensemble_scenarios(n, ens_gamma);
        const QslReport rp = qsl_report(product.model, product.psi0, lambda);
        const QslReport rg = qsl_report(ghz.model, ghz.psi0, lambda);
        ns.values.push_back(n);
        ap.values.push_back(rp.amplitude);
        ep.values.push_back(rp.excess);
        tp.values.push_back(rp.t_star.as_double());
        ag.values.push_back(rg.amplitude);
        eg.values.push_back(rg.excess);
        tg.values.push_back(rg.t_star.as_double());
      }
      std::string summary;
      if (ens_nmax >= 3) {
        const std::vector<double> x(ns.values.begin() + 1, ns.values.end());
        summary = "log-log slope of T* over N = 2.." + std::to_string(ens_nmax) + ": product " +
                  num(loglog_slope(x, std::vector<double>(tp.values.begin() + 1, tp.values.end()))) + ", GHZ " +
                  num(loglog_slope(x, std::vector<double>(tg.values.begin() + 1, tg.values.end()))) + "\n";
      }
      ens_out.emit({ns, ap, ep, tp, ag, eg, tg}, out, summary);
      return kOk;
    }

    if (scen->parsed()) {
      const std::vector<std::string> names = {"two-level-dephasing", "two-level-decay", "bell-collective",
                                              "bell-local",          "ensemble",        "qutrit-ladder",
                                              "qubit-engineering"};
      if (scen_list) {
        for (const auto& n : names) out << n << "\n";
        return kOk;
      }
      if (scen_name.empty()) throw UsageError("scenario: a name is required (see --list)");

      auto pick = [](std::vector<Scenario> all, const std::string& label) {
        for (auto& s : all) {
          if (s.name.substr(s.name.find('/') + 1) == label) return s;
        }
        throw UsageError("scenario: unknown state '" + label + "'");
      };
      std::optional<Scenario> s;
      if (scen_name == "two-level-dephasing") {
        s = two_level_dephasing(scen_omega, scen_gamma, scen_theta, scen_phi);
      } else if (scen_name == "two-level-decay") {
        s = scen_theta_opt->count() ? two_level_decay(scen_omega, scen_gamma, scen_theta)
                                    : two_level_decay(scen_omega, scen_gamma);
      } else if (scen_name == "bell-collective" || scen_name == "bell-local") {
        s = pick(bell_scenarios(scen_gamma, scen_name == "bell-collective"), scen_state.empty() ? "phi+" : scen_state);
      } else if (scen_name == "ensemble") {
        const auto [product, ghz] = ensemble_scenarios(scen_n, scen_gamma);
        s = pick({product, ghz}, scen_state.empty() ? "product" : scen_state);
      } else if (scen_name == "qutrit-ladder") {
        s = qutrit_ladder(scen_gamma);
      } else if (scen_name == "qubit-engineering") {
        s = qubit_engineering(scen_gamma);
      } else {
        throw UsageError("scenario: unknown name '" + scen_name + "' (see --list)");
      }

      json meta{{"scenario", s->name}};
      if (s->reference.amplitude) meta["reference_amplitude"] = *s->reference.amplitude;
      if (s->reference.excess) meta["reference_excess"] = *s->reference.excess;
      std::optional<double> lambda;
      if (scen_lambda_opt->count()) {
        if (!(scen_lambda > 0.0 && scen_lambda <= 1.0)) throw DomainError("--lambda must lie in (0, 1]");
        lambda = scen_lambda;
      }
      const json model = model_to_json(s->model, s->psi0, lambda, meta);
      if (scen_out.empty()) {
        out << model.dump(2) << "\n";
      } else {
        write_model(scen_out, s->model, s->psi0, lambda, meta);
        out << "wrote " << s->name << " to " << scen_out << "\n";
      }
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ResidualError& e) {
    err << "error: " << e.what() << "\n";
    return kResidual;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kModelError;
  } catch (const ModelError& e) {
    err << "error: " << e.what() << "\n";
    return kModelError;
  } catch (const DimensionError& e) {
    err << "error: " << e.what() << "\n";
    return kModelError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericError;
  }
  return kUsage;
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"qslkit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace qslkit::cli
