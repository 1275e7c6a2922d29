// Copyright 2026 The eurqsi Authors
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

// Scenario files and JSON forms of every report.
//
// A scenario is
//
//   {
//     "dims":   [dA, dB] or [dA, dB, dE],
//     "labels": ["A", "B"] or ["A", "B", "E"]          (optional)
//     "state":  rows of [re, im] pairs,
//     "x_pvm":  [P_0, P_1, ...]  projectors as matrices of [re, im],
//     "z_pvm":  [Q_0, Q_1, ...],
//     "relation": "bipartite_refined" | ...             (optional)
//   }
//
// Outcome k of a measurement is the k-th projector. Structural problems
// (bad JSON, missing keys, wrong types) are ParseErrors; a well-formed file
// whose contents break a state or PVM invariant raises InvariantError or
// DimensionError from validate().

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "eurqsi/eur.hpp"
#include "eurqsi/gallery.hpp"
#include "eurqsi/qstate.hpp"
#include "eurqsi/recovery.hpp"
#include "eurqsi/simx.hpp"

namespace eurqsi {

using Json = nlohmann::json;

class ParseError : public std::runtime_error {
 public:
  ParseError(std::string source, std::size_t line, std::size_t column, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) +
                           ": " + what),
        line_(line),
        column_(column) {}

  /// 1-based; 0 when the error has no single position (missing key).
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// ---------------------------------------------------------------------------
// Numbers and matrices

/// Finite doubles as JSON numbers; infinities and NaN as "+inf", "-inf",
/// "nan".
inline Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "+inf" : "-inf";
}

inline Json matrix_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back(Json::array({m(i, j).real(), m(i, j).imag()}));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace detail {

[[noreturn]] inline void shape_error(const std::string& source, const std::string& what) {
  throw ParseError(source, 0, 0, what);
}

inline double real_entry(const Json& j, const std::string& source, const std::string& where) {
  if (!j.is_number()) shape_error(source, where + ": expected a number");
  return j.get<double>();
}

inline CMatrix matrix_from(const Json& j, const std::string& source, const std::string& where) {
  if (!j.is_array() || j.empty()) shape_error(source, where + ": expected a non-empty array of rows");
  const std::size_t n = j.size();
  CMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    const Json& row = j[r];
    const std::string rw = where + "[" + std::to_string(r) + "]";
    if (!row.is_array() || row.size() != n) {
      shape_error(source, rw + ": expected a row of " + std::to_string(n) + " entries");
    }
    for (std::size_t c = 0; c < n; ++c) {
      const Json& e = row[c];
      const std::string ew = rw + "[" + std::to_string(c) + "]";
      if (!e.is_array() || e.size() != 2) shape_error(source, ew + ": expected [re, im]");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          Complex(real_entry(e[0], source, ew), real_entry(e[1], source, ew));
    }
  }
  return m;
}

inline const Json& field(const Json& j, const char* key, const std::string& source) {
  const auto it = j.find(key);
  if (it == j.end()) shape_error(source, std::string("missing key \"") + key + "\"");
  return *it;
}

inline Dims dims_from(const Json& j, const std::string& source, const std::string& where) {
  if (!j.is_array() || j.empty()) shape_error(source, where + ": expected a non-empty array");
  Dims d;
  for (const Json& e : j) {
    if (!e.is_number_integer() || e.get<std::int64_t>() <= 0) {
      shape_error(source, where + ": entries must be positive integers");
    }
    d.push_back(static_cast<std::size_t>(e.get<std::int64_t>()));
  }
  return d;
}

inline std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace detail

/// Parses JSON text, turning syntax errors into ParseError with line and
/// column.
inline Json parse_json(std::string_view text, const std::string& source = "<input>") {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, column] = detail::line_column(text, e.byte);
    std::string what = e.what();
    // drop nlohmann's "[json.exception.parse_error.101] parse error at line 1, column 2: "
    if (const auto p = what.find(": "); p != std::string::npos) what = what.substr(p + 2);
    throw ParseError(source, line, column, what);
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// Scenario

struct Scenario {
  Dims dims;
  Labels labels;
  CMatrix state;
  std::vector<CMatrix> x_pvm;
  std::vector<CMatrix> z_pvm;
  std::optional<Relation> relation;
};

/// A scenario whose state and measurements passed their invariants.
struct ValidScenario {
  DensityOperator rho;
  Pvm x;
  Pvm z;
  Relation relation;
};

inline Labels default_scenario_labels(std::size_t n) {
  return n == 3 ? Labels{"A", "B", "E"} : Labels{"A", "B"};
}

inline Relation default_relation(std::size_t subsystems) {
  return subsystems == 3 ? Relation::tripartite_refined : Relation::bipartite_refined;
}

inline Scenario scenario_from_json(const Json& j, const std::string& source = "<input>") {
  using namespace detail;
  if (!j.is_object()) shape_error(source, "scenario must be a JSON object");
  Scenario s;
  s.dims = dims_from(field(j, "dims", source), source, "dims");
  if (s.dims.size() != 2 && s.dims.size() != 3) {
    shape_error(source, "dims: expected 2 (A, B) or 3 (A, B, E) subsystems");
  }
  if (const auto it = j.find("labels"); it != j.end()) {
    if (!it->is_array()) shape_error(source, "labels: expected an array of strings");
    for (const Json& l : *it) {
      if (!l.is_string()) shape_error(source, "labels: expected an array of strings");
      s.labels.push_back(l.get<std::string>());
    }
  } else {
    s.labels = default_scenario_labels(s.dims.size());
  }
  s.state = matrix_from(field(j, "state", source), source, "state");
  for (const char* key : {"x_pvm", "z_pvm"}) {
    const Json& list = field(j, key, source);
    if (!list.is_array() || list.empty()) {
      shape_error(source, std::string(key) + ": expected a non-empty array of projectors");
    }
    auto& out = std::string(key) == "x_pvm" ? s.x_pvm : s.z_pvm;
    for (std::size_t k = 0; k < list.size(); ++k) {
      out.push_back(matrix_from(list[k], source, std::string(key) + "[" + std::to_string(k) + "]"));
    }
  }
  if (const auto it = j.find("relation"); it != j.end()) {
    if (!it->is_string()) shape_error(source, "relation: expected a string");
    s.relation = parse_relation(it->get<std::string>());
    if (!s.relation) shape_error(source, "relation: unknown relation \"" + it->get<std::string>() + "\"");
  }
  return s;
}

inline Scenario parse_scenario(std::string_view text, const std::string& source = "<input>") {
  return scenario_from_json(parse_json(text, source), source);
}

inline Scenario load_scenario(const std::string& path) {
  return parse_scenario(read_file(path), path);
}

inline Json to_json(const Scenario& s) {
  Json j;
  j["dims"] = s.dims;
  j["labels"] = s.labels;
  j["state"] = matrix_json(s.state);
  for (const char* key : {"x_pvm", "z_pvm"}) {
    Json list = Json::array();
    for (const CMatrix& p : std::string(key) == "x_pvm" ? s.x_pvm : s.z_pvm) {
      list.push_back(matrix_json(p));
    }
    j[key] = std::move(list);
  }
  if (s.relation) j["relation"] = to_string(*s.relation);
  return j;
}

inline std::string dump_scenario(const Scenario& s) { return to_json(s).dump(2) + "\n"; }

/// Builds the state and PVMs; throws InvariantError / DimensionError naming
/// the broken property.
inline ValidScenario validate(const Scenario& s) {
  if (s.labels.size() != s.dims.size()) {
    throw DimensionError("scenario: one label per subsystem required");
  }
  const Labels expect = default_scenario_labels(s.dims.size());
  Labels sorted = s.labels;
  std::sort(sorted.begin(), sorted.end());
  if (sorted != expect) {
    throw DimensionError("scenario: labels must be A, B (and E for tripartite scenarios)");
  }
  DensityOperator rho(s.state, s.dims, s.labels);
  const std::size_t da = s.dims[rho.index_of("A")];
  for (const auto* pvm : {&s.x_pvm, &s.z_pvm}) {
    for (const CMatrix& p : *pvm) {
      if (static_cast<std::size_t>(p.rows()) != da) {
        throw DimensionError("scenario: projector dimension must equal dim(A) = " + std::to_string(da));
      }
    }
  }
  const Relation rel = s.relation.value_or(default_relation(s.dims.size()));
  if (is_tripartite(rel) != (s.dims.size() == 3)) {
    throw DimensionError("scenario: relation " + to_string(rel) + " does not match " +
                         std::to_string(s.dims.size()) + " subsystems");
  }
  return ValidScenario{std::move(rho), Pvm(s.x_pvm), Pvm(s.z_pvm), rel};
}

inline Scenario make_scenario(const DensityOperator& rho, const Pvm& x, const Pvm& z,
                              std::optional<Relation> relation = std::nullopt) {
  return Scenario{rho.dims(), rho.labels(), rho.matrix(), x.projectors(), z.projectors(), relation};
}

// ---------------------------------------------------------------------------
// CP maps

inline Json to_json(const CpMap& map) {
  Json j;
  j["kind"] = "cp_map";
  j["convention"] = "J = sum_ij |i><j| (x) N(|i><j|), input factor first";
  j["in_dims"] = map.in_dims();
  j["out_dims"] = map.out_dims();
  j["choi"] = matrix_json(map.choi());
  return j;
}

inline CpMap cp_map_from_json(const Json& j, const std::string& source = "<input>") {
  using namespace detail;
  if (!j.is_object() || !j.contains("kind") || j["kind"] != "cp_map") {
    shape_error(source, "expected an object with \"kind\": \"cp_map\"");
  }
  return CpMap::from_choi(matrix_from(field(j, "choi", source), source, "choi"),
                          dims_from(field(j, "in_dims", source), source, "in_dims"),
                          dims_from(field(j, "out_dims", source), source, "out_dims"));
}

// ---------------------------------------------------------------------------
// Reports

inline Json to_json(const EurReport& r) {
  Json j;
  j["relation"] = to_string(r.relation);
  j["H_X_given_B"] = number(r.h_xb);
  j["H_Z_given_B"] = number(r.h_zb);
  j["H_Z_given_E"] = number(r.h_ze);
  j["H_A_given_B"] = number(r.h_ab);
  j["c"] = number(r.c);
  j["neg_log_c"] = number(r.neg_log_c());
  j["f"] = number(r.f);
  j["neg_log_f"] = number(r.neg_log_f());
  j["lhs"] = number(r.lhs);
  j["rhs_original"] = number(r.rhs_original);
  j["rhs_refined"] = number(r.rhs_refined);
  j["slack_original"] = number(r.slack_original);
  j["slack_refined"] = number(r.slack_refined);
  j["entropy_tolerance"] = r.entropy_tolerance;
  j["fidelity_tolerance"] = r.fidelity_tolerance;
  j["holds"] = r.holds();
  j["refinement_consistent"] = r.refinement_consistent();
  return j;
}

/// Aligned two-column text form of a report.
inline std::string to_table(const EurReport& r) {
  const std::vector<std::pair<std::string, double>> rows{
      {"H(X|B)", r.h_xb},          {"H(Z|B)", r.h_zb},
      {"H(Z|E)", r.h_ze},          {"H(A|B)", r.h_ab},
      {"c", r.c},                  {"-log c", r.neg_log_c()},
      {"f", r.f},                  {"-log f", r.neg_log_f()},
      {"lhs", r.lhs},              {"rhs original", r.rhs_original},
      {"rhs refined", r.rhs_refined}, {"slack original", r.slack_original},
      {"slack refined", r.slack_refined}};
  std::ostringstream os;
  os << "relation        " << to_string(r.relation) << "\n";
  char buf[64];
  for (const auto& [name, v] : rows) {
    std::snprintf(buf, sizeof buf, "%-15s %22.15g\n", name.c_str(), v);
    os << buf;
  }
  os << "holds           " << (r.holds() ? "yes" : "no") << "\n";
  return os.str();
}

inline Json to_json(const FuzzConfig& c) {
  Json j;
  j["relation"] = to_string(c.relation);
  j["trials"] = c.trials;
  j["dim_a"] = c.dim_a;
  j["dim_b"] = c.dim_b;
  j["pvms"] = to_string(c.pvms);
  j["seed"] = c.seed;
  j["tolerance"] = c.tolerance;
  return j;
}

inline Json to_json(const FuzzSummary& s) {
  Json j;
  j["config"] = to_json(s.config);
  j["trials"] = s.trials;
  j["min_slack_original"] = number(s.min_slack_original);
  j["min_slack_refined"] = number(s.min_slack_refined);
  j["max_refinement_excess"] = number(s.max_refinement_excess);
  j["violations"] = s.violations;
  j["passed"] = s.passed();
  if (s.worst) {
    Json w;
    w["trial"] = s.worst->instance.trial;
    w["seed"] = s.worst->instance.seed;
    w["report"] = to_json(s.worst->report);
    w["scenario"] = to_json(make_scenario(s.worst->instance.rho, s.worst->instance.x,
                                          s.worst->instance.z, s.config.relation));
    j["worst"] = std::move(w);
  } else {
    j["worst"] = nullptr;
  }
  return j;
}

inline Json to_json(const gallery::Ledger& l) {
  Json j;
  j["cases"] = l.cases;
  j["passed"] = l.passed();
  j["failures"] = l.failures();
  Json entries = Json::array();
  for (const auto& e : l.entries) {
    Json x;
    x["case"] = e.case_id;
    x["quantity"] = e.quantity;
    x["class"] = to_string(e.cls);
    x["expected"] = e.expected ? number(*e.expected) : Json(nullptr);
    x["computed"] = e.computed ? number(*e.computed) : Json(nullptr);
    x["residual"] = number(e.residual);
    x["tolerance"] = e.tolerance;
    x["passed"] = e.passed;
    entries.push_back(std::move(x));
  }
  j["entries"] = std::move(entries);
  return j;
}

inline Json to_json(const simx::ShotTable& t) {
  Json j;
  j["basis"] = t.basis;
  j["shots"] = t.shots;
  Json rows = Json::array();
  for (std::size_t k = 0; k < t.counts.size(); ++k) {
    rows.push_back({{"outcome", t.outcomes[k]},
                    {"count", t.counts[k]},
                    {"frequency", t.frequency(k)},
                    {"stderr", t.stderr_of(k)},
                    {"probability", t.probabilities[k]}});
  }
  j["outcomes"] = std::move(rows);
  return j;
}

inline Json to_json(const simx::ExperimentResult& r) {
  Json j;
  j["experiment"] = r.id;
  j["shots"] = r.shots;
  j["seed"] = r.seed;
  j["sampler"] = r.sampler;
  j["noise"] = {{"depolarizing", r.noise.depolarizing_p}, {"readout", r.noise.readout_flip}};
  Json tables = Json::array();
  for (const auto& t : r.tables) tables.push_back(to_json(t));
  j["tables"] = std::move(tables);
  const bool pair = r.id >= 5;
  j["estimate_kind"] = pair ? "correlations" : "bloch";
  j["estimate"] = r.estimate;
  j["estimate_stderr"] = r.estimate_stderr;
  j["estimated_state"] = matrix_json(r.estimated_state);
  j["model_state"] = matrix_json(r.model_state);
  j["ideal_state"] = matrix_json(r.ideal_state);
  j["model_fidelity"] = r.model_fidelity;
  j["fidelity_estimate"] = r.fidelity_estimate ? Json(*r.fidelity_estimate) : Json(nullptr);
  j["fidelity_stderr"] = r.fidelity_stderr ? Json(*r.fidelity_stderr) : Json(nullptr);
  return j;
}

}  // namespace eurqsi
