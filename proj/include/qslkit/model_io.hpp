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

/**
 * @file model_io.hpp
 * @brief Model files, state lists, JSON reports and CSV tables.
 *
 * A model file is a JSON object:
 *
 *     {
 *       "dimension": 2,
 *       "hamiltonians": ["0.5*sz"],
 *       "channels": ["sqrt(0.1)*sm"],
 *       "initial_state": [0.5, "0.5*sqrt(3)"],
 *       "lambda": 0.1,
 *       "metadata": {"scenario": "qubit-engineering"}
 *     }
 *
 * Operators are either expression strings (see expr.hpp) or explicit
 * matrices {"matrix": [[entry, ...], ...]}. An entry or amplitude is a real
 * number, a [re, im] pair, or a scalar expression string. "lambda" and
 * "metadata" are optional. The initial state is renormalized when its norm
 * is within 1e-6 of one and rejected otherwise.
 */
#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qslkit/bounds.hpp"
#include "qslkit/dynamics.hpp"
#include "qslkit/engineering.hpp"
#include "qslkit/errors.hpp"
#include "qslkit/expr.hpp"
#include "qslkit/operators.hpp"

namespace qslkit {

using nlohmann::json;

struct LoadedModel {
  SystemModel model;
  PureState psi0;
  std::optional<double> lambda;
  json metadata = json::object();
};

struct NamedState {
  std::string name;
  PureState state;
};

namespace io_detail {

inline constexpr double kLoadNormTolerance = 1e-6;

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw ModelError("failed writing '" + path.string() + "'");
}

inline json parse_json_text(std::string_view text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into line:column.
    std::size_t line = 1;
    std::size_t col = 1;
    const std::size_t upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ModelError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
}

inline cplx parse_entry(const json& j, const std::string& field) {
  try {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
      return {j[0].get<double>(), j[1].get<double>()};
    }
    if (j.is_string()) return parse_scalar(j.get<std::string>());
  } catch (const Error& e) {
    throw ModelError(field + ": " + e.what());
  }
  throw ModelError(field + ": expected a number, a [re, im] pair or a scalar expression");
}

inline ComplexMatrix parse_operator_field(const json& j, Eigen::Index dim, const std::string& field) {
  if (j.is_string()) {
    try {
      return parse_operator(j.get<std::string>(), dim);
    } catch (const Error& e) {
      throw ModelError(field + ": " + e.what());
    }
  }
  if (j.is_object() && j.contains("matrix") && j["matrix"].is_array()) {
    const json& rows = j["matrix"];
    if (static_cast<Eigen::Index>(rows.size()) != dim) {
      throw ModelError(field + ": matrix has " + std::to_string(rows.size()) + " rows, expected " +
                       std::to_string(dim));
    }
    ComplexMatrix m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      const json& row = rows[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
        throw ModelError(field + ": row " + std::to_string(r) + " must have " + std::to_string(dim) + " entries");
      }
      for (Eigen::Index c = 0; c < dim; ++c) {
        m(r, c) = parse_entry(row[static_cast<std::size_t>(c)],
                              field + ".matrix[" + std::to_string(r) + "][" + std::to_string(c) + "]");
      }
    }
    return m;
  }
  throw ModelError(field + ": expected an expression string or {\"matrix\": [...]}");
}

inline PureState parse_amplitudes(const json& j, Eigen::Index dim, const std::string& field) {
  if (!j.is_array()) throw ModelError(field + ": expected an array of amplitudes");
  if (static_cast<Eigen::Index>(j.size()) != dim) {
    throw ModelError(field + ": has " + std::to_string(j.size()) + " amplitudes, expected " + std::to_string(dim));
  }
  ComplexVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    v[i] = parse_entry(j[static_cast<std::size_t>(i)], field + "[" + std::to_string(i) + "]");
  }
  const double n = v.norm();
  if (!(std::abs(n - 1.0) <= kLoadNormTolerance)) {
    throw ModelError(field + ": state norm " + std::to_string(n) + " is not within 1e-6 of 1");
  }
  return PureState::normalized(std::move(v));
}

inline std::vector<ComplexMatrix> parse_operator_list(const json& root, const char* key, Eigen::Index dim) {
  std::vector<ComplexMatrix> out;
  if (!root.contains(key)) return out;
  const json& list = root[key];
  if (!list.is_array()) throw ModelError(std::string(key) + ": expected an array");
  for (std::size_t i = 0; i < list.size(); ++i) {
    out.push_back(parse_operator_field(list[i], dim, std::string(key) + "[" + std::to_string(i) + "]"));
  }
  return out;
}

inline json entry_json(cplx c) {
  if (c.imag() == 0.0) return c.real();
  return json::array({c.real(), c.imag()});
}

inline json matrix_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(entry_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return json{{"matrix", std::move(rows)}};
}

inline json extended_json(const ExtendedReal& x) {
  if (x.is_infinite()) return "infinity";
  return x.value();
}

inline ExtendedReal extended_from_json(const json& j, const std::string& field) {
  if (j.is_string() && j.get<std::string>() == "infinity") return ExtendedReal::infinity();
  if (j.is_number()) return ExtendedReal::finite(j.get<double>());
  throw ModelError(field + ": expected a number or \"infinity\"");
}

template <typename T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) throw ModelError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ModelError(std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace io_detail

/// Builds a model from an already-parsed JSON document.
inline LoadedModel parse_model(const json& root) {
  if (!root.is_object()) throw ModelError("model: expected a JSON object");
  const json& dim_field = root.contains("dimension") ? root["dimension"] : json();
  if (!dim_field.is_number_integer() || dim_field.get<long long>() < 1 ||
      dim_field.get<long long>() > kMaxDimension) {
    throw ModelError("dimension: expected an integer in [1, " + std::to_string(kMaxDimension) + "]");
  }
  const auto dim = static_cast<Eigen::Index>(dim_field.get<long long>());
  auto hamiltonians = io_detail::parse_operator_list(root, "hamiltonians", dim);
  auto channels = io_detail::parse_operator_list(root, "channels", dim);
  if (!root.contains("initial_state")) throw ModelError("missing field 'initial_state'");
  PureState psi0 = io_detail::parse_amplitudes(root["initial_state"], dim, "initial_state");

  std::optional<double> lambda;
  if (root.contains("lambda") && !root["lambda"].is_null()) {
    if (!root["lambda"].is_number()) throw ModelError("lambda: expected a number");
    lambda = root["lambda"].get<double>();
  }
  json metadata = root.contains("metadata") ? root["metadata"] : json::object();

  try {
    SystemModel model(dim, std::move(hamiltonians), std::move(channels));
    return LoadedModel{std::move(model), std::move(psi0), lambda, std::move(metadata)};
  } catch (const Error& e) {
    throw ModelError(e.what());
  }
}

inline LoadedModel parse_model_text(std::string_view text, const std::string& origin = "<model>") {
  const json root = io_detail::parse_json_text(text, origin);
  try {
    return parse_model(root);
  } catch (const ModelError& e) {
    throw ModelError(origin + ": " + e.what());
  }
}

inline LoadedModel load_model(const std::filesystem::path& path) {
  return parse_model_text(io_detail::read_file(path), path.string());
}

/// Explicit-matrix form of a model; loads back bit-exactly.
inline json model_to_json(const SystemModel& model, const PureState& psi0, std::optional<double> lambda = {},
                          const json& metadata = json::object()) {
  json j;
  j["dimension"] = model.dim();
  j["hamiltonians"] = json::array();
  for (const auto& h : model.hamiltonians()) j["hamiltonians"].push_back(io_detail::matrix_json(h));
  j["channels"] = json::array();
  for (const auto& m : model.channels()) j["channels"].push_back(io_detail::matrix_json(m));
  j["initial_state"] = json::array();
  for (Eigen::Index i = 0; i < psi0.dim(); ++i) j["initial_state"].push_back(io_detail::entry_json(psi0.amplitudes()[i]));
  if (lambda) j["lambda"] = *lambda;
  j["metadata"] = metadata;
  return j;
}

inline void write_model(const std::filesystem::path& path, const SystemModel& model, const PureState& psi0,
                        std::optional<double> lambda = {}, const json& metadata = json::object()) {
  io_detail::write_file(path, model_to_json(model, psi0, lambda, metadata).dump(2) + "\n");
}

/// A states file: {"states": [{"name": "...", "amplitudes": [...]}, ...]}.
inline std::vector<NamedState> parse_states(const json& root, Eigen::Index dim) {
  const json& list = root.is_object() && root.contains("states") ? root["states"] : root;
  if (!list.is_array() || list.empty()) throw ModelError("states: expected a nonempty array");
  std::vector<NamedState> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string field = "states[" + std::to_string(i) + "]";
    const json& item = list[i];
    std::string name = "state" + std::to_string(i);
    const json* amps = &item;
    if (item.is_object()) {
      if (item.contains("name") && item["name"].is_string()) name = item["name"].get<std::string>();
      if (!item.contains("amplitudes")) throw ModelError(field + ": missing 'amplitudes'");
      amps = &item["amplitudes"];
    }
    out.push_back({std::move(name), io_detail::parse_amplitudes(*amps, dim, field + ".amplitudes")});
  }
  return out;
}

inline std::vector<NamedState> load_states(const std::filesystem::path& path, Eigen::Index dim) {
  const std::string text = io_detail::read_file(path);
  try {
    return parse_states(io_detail::parse_json_text(text, path.string()), dim);
  } catch (const ModelError& e) {
    const std::string what = e.what();
    if (what.rfind(path.string(), 0) == 0) throw;
    throw ModelError(path.string() + ": " + what);
  }
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json to_json(const QslReport& r) {
  return json{{"theta_T", r.theta_T},
              {"lambda", r.lambda},
              {"amplitude", r.amplitude},
              {"excess", r.excess},
              {"k", r.k},
              {"t_star", io_detail::extended_json(r.t_star)},
              {"t_dc", io_detail::extended_json(r.t_dc)},
              {"ratio", r.ratio ? json(*r.ratio) : json(nullptr)},
              {"closed_system", r.closed_system},
              {"stationary", r.stationary}};
}

inline QslReport qsl_report_from_json(const json& j) {
  using io_detail::required;
  QslReport r;
  r.theta_T = required<double>(j, "theta_T");
  r.lambda = required<double>(j, "lambda");
  r.amplitude = required<double>(j, "amplitude");
  r.excess = required<double>(j, "excess");
  r.k = required<double>(j, "k");
  if (!j.contains("t_star") || !j.contains("t_dc")) throw ModelError("report: missing t_star or t_dc");
  r.t_star = io_detail::extended_from_json(j["t_star"], "t_star");
  r.t_dc = io_detail::extended_from_json(j["t_dc"], "t_dc");
  if (j.contains("ratio") && !j["ratio"].is_null()) r.ratio = required<double>(j, "ratio");
  r.closed_system = required<bool>(j, "closed_system");
  r.stationary = required<bool>(j, "stationary");
  return r;
}

inline json to_json(const EscapeResult& e) {
  json j{{"escaped", e.escaped}, {"lambda", e.lambda}, {"t_max", e.t_max}};
  j["time"] = e.escaped ? json(e.time) : json(nullptr);
  return j;
}

inline json to_json(const EngineeringSolution& s) {
  json u = json::array();
  for (Eigen::Index i = 0; i < s.u.size(); ++i) u.push_back(s.u[i]);
  json null = json::array();
  for (const auto& v : s.nullspace) {
    json row = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back(v[i]);
    null.push_back(std::move(row));
  }
  return json{{"u", std::move(u)},
              {"h_opt", io_detail::matrix_json(s.h_opt)["matrix"]},
              {"nullspace", std::move(null)},
              {"nullspace_dimension", s.nullspace.size()},
              {"residual_norm", s.residual_norm},
              {"cost_value", s.cost_value}};
}

inline EngineeringSolution engineering_solution_from_json(const json& j) {
  using io_detail::required;
  EngineeringSolution s;
  const auto u = required<std::vector<double>>(j, "u");
  s.u = Eigen::Map<const Eigen::VectorXd>(u.data(), static_cast<Eigen::Index>(u.size()));
  const auto dim = static_cast<Eigen::Index>(j.contains("h_opt") && j["h_opt"].is_array() ? j["h_opt"].size() : 0);
  s.h_opt = io_detail::parse_operator_field(json{{"matrix", j["h_opt"]}}, dim, "h_opt");
  for (const auto& row : required<std::vector<std::vector<double>>>(j, "nullspace")) {
    s.nullspace.emplace_back(Eigen::Map<const Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(row.size())));
  }
  s.residual_norm = required<double>(j, "residual_norm");
  s.cost_value = required<double>(j, "cost_value");
  return s;
}

template <typename Report>
void write_report(const Report& report, const std::filesystem::path& path) {
  io_detail::write_file(path, to_json(report).dump(2) + "\n");
}

inline QslReport read_qsl_report(const std::filesystem::path& path) {
  return qsl_report_from_json(io_detail::parse_json_text(io_detail::read_file(path), path.string()));
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

/// Seven significant digits, '.' decimal point, "inf"/"nan" for non-finite values.
inline std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.7g", v);
  return buf;
}

struct CsvColumn {
  std::string name;
  std::vector<double> values;
};

inline std::string format_csv(const std::vector<CsvColumn>& columns) {
  if (columns.empty()) throw DomainError("csv: no columns");
  const std::size_t rows = columns.front().values.size();
  for (const auto& c : columns) {
    if (c.values.size() != rows) throw DimensionError("csv: column '" + c.name + "' has a different length");
  }
  std::string out;
  for (std::size_t k = 0; k < columns.size(); ++k) {
    if (k) out += ',';
    out += columns[k].name;
  }
  out += '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      if (k) out += ',';
      out += format_value(columns[k].values[r]);
    }
    out += '\n';
  }
  return out;
}

inline void write_csv(const std::vector<CsvColumn>& columns, const std::filesystem::path& path) {
  io_detail::write_file(path, format_csv(columns));
}

}  // namespace qslkit
