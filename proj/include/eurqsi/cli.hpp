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

// The eurqsi command-line front end. run_cli() is the whole program minus
// main(), so tests can drive it with in-memory streams.
//
// Exit codes: 0 pass, 1 tolerance failure, 2 parse error (command line or
// input file), 3 validation error (well-formed input breaking an invariant).

#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eurqsi/eur.hpp"
#include "eurqsi/gallery.hpp"
#include "eurqsi/scenario.hpp"
#include "eurqsi/simx.hpp"

namespace eurqsi::cli {

enum ExitCode : int { kPass = 0, kToleranceFail = 1, kParseError = 2, kValidationError = 3 };

/// Name of the environment variable that redirects output into a directory.
inline constexpr const char* kOutDirEnv = "EURQSI_OUT_DIR";

/// Thrown for values that parse but are out of range (exit 3).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// "depolarizing=P,readout=Q" (either key optional) or "none".
inline simx::NoiseSpec parse_noise(const std::string& text) {
  simx::NoiseSpec n;
  if (text.empty() || text == "none") return n;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("--noise", "expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--noise", "'" + value + "' is not a number");
    }
    if (key == "depolarizing") {
      n.depolarizing_p = v;
    } else if (key == "readout") {
      n.readout_flip = v;
    } else {
      throw CLI::ValidationError("--noise", "unknown key '" + key + "' (depolarizing, readout)");
    }
  }
  try {
    n.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  return n;
}

inline std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

struct Output {
  std::string text;
  std::string extension;  // json, csv, txt
};

inline std::string extension_of(const std::string& format) {
  return format == "json" ? "json" : format == "csv" ? "csv" : "txt";
}

inline std::string json_text(const Json& j) { return j.dump(2) + "\n"; }

/// Writes next to the destination and renames over it.
inline void write_atomically(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << text;
    f.flush();
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

inline void require_positive(double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol)) throw ValidationError("--tolerance must be positive and finite");
}

// --- examples -------------------------------------------------------------

inline int examples(const std::optional<double>& tol, const std::string& format, Output& out) {
  gallery::Tolerances t;
  if (tol) {
    require_positive(*tol);
    t = gallery::Tolerances::uniform(*tol);
  }
  const gallery::Ledger ledger = gallery::run_all(t);
  if (format == "json") {
    Json j;
    j["command"] = "examples";
    j["tolerance_override"] = tol ? Json(*tol) : Json(nullptr);
    j["ledger"] = to_json(ledger);
    out.text = json_text(j);
  } else if (format == "csv") {
    std::string s = "case,quantity,class,expected,computed,residual,tolerance,passed\n";
    for (const auto& e : ledger.entries) {
      s += e.case_id + "," + e.quantity + "," + to_string(e.cls) + "," +
           (e.expected ? g17(*e.expected) : "") + "," + (e.computed ? g17(*e.computed) : "") + "," +
           g17(e.residual) + "," + g17(e.tolerance) + "," + (e.passed ? "true" : "false") + "\n";
    }
    out.text = s;
  } else {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-16s %-24s %-9s %12s %10s  %s\n", "case", "quantity", "class",
                  "residual", "tolerance", "status");
    os << buf;
    for (const auto& e : ledger.entries) {
      std::snprintf(buf, sizeof buf, "%-16s %-24s %-9s %12.3e %10.1e  %s\n", e.case_id.c_str(),
                    e.quantity.c_str(), to_string(e.cls).c_str(), e.residual, e.tolerance,
                    e.passed ? "ok" : "FAIL");
      os << buf;
    }
    os << ledger.cases.size() << " cases, " << ledger.entries.size() << " checks, "
       << ledger.failures() << " failed\n";
    out.text = os.str();
  }
  return ledger.passed() ? kPass : kToleranceFail;
}

// --- check ----------------------------------------------------------------

inline int check(const std::string& path, double tol, const std::string& format, Output& out) {
  require_positive(tol);
  const Scenario sc = load_scenario(path);
  const ValidScenario v = validate(sc);
  const EurReport r = eurqsi::check(v.relation, v.rho, v.x, v.z);
  const double slack = is_refined(r.relation) ? r.slack_refined : r.slack_original;
  const bool passed = slack >= -tol;
  if (format == "json") {
    Json j;
    j["command"] = "check";
    j["scenario"] = path;
    j["tolerance"] = tol;
    j["passed"] = passed;
    j["report"] = to_json(r);
    out.text = json_text(j);
  } else if (format == "csv") {
    std::string s = "quantity,value\n";
    const Json j = to_json(r);
    for (const char* k : {"H_X_given_B", "H_Z_given_B", "H_Z_given_E", "H_A_given_B", "c", "neg_log_c",
                          "f", "neg_log_f", "lhs", "rhs_original", "rhs_refined", "slack_original",
                          "slack_refined"}) {
      s += std::string(k) + "," + (j[k].is_number() ? g17(j[k].get<double>()) : j[k].get<std::string>()) + "\n";
    }
    out.text = s;
  } else {
    out.text = to_table(r) + "tolerance       " + g17(tol) + "\nresult          " +
               (passed ? "pass" : "FAIL") + "\n";
  }
  return passed ? kPass : kToleranceFail;
}

// --- fuzz -----------------------------------------------------------------

inline int fuzz(FuzzConfig cfg, const std::string& pvms, const std::string& format, Output& out) {
  require_positive(cfg.tolerance);
  if (cfg.trials < 1) throw ValidationError("--trials must be at least 1");
  if (cfg.dim_a < 2) throw ValidationError("--dim must be at least 2");
  cfg.pvms = pvms == "pauli" ? PvmFamily::pauli
             : pvms == "random" ? PvmFamily::random
                                : (cfg.dim_a == 2 ? PvmFamily::pauli : PvmFamily::random);
  if (cfg.pvms == PvmFamily::pauli && cfg.dim_a != 2) {
    throw ValidationError("--pvms pauli needs --dim 2");
  }
  const FuzzSummary s = eurqsi::fuzz(cfg);
  if (format == "json") {
    Json j = to_json(s);
    j["command"] = "fuzz";
    out.text = json_text(j);
  } else {
    const std::vector<std::pair<std::string, std::string>> rows{
        {"relation", to_string(cfg.relation)},
        {"trials", std::to_string(s.trials)},
        {"dim", std::to_string(cfg.dim_a)},
        {"pvms", to_string(cfg.pvms)},
        {"seed", std::to_string(cfg.seed)},
        {"tolerance", g17(cfg.tolerance)},
        {"min_slack_original", g17(s.min_slack_original)},
        {"min_slack_refined", g17(s.min_slack_refined)},
        {"max_refinement_excess", g17(s.max_refinement_excess)},
        {"violations", std::to_string(s.violations)},
        {"worst_trial", s.worst ? std::to_string(s.worst->instance.trial) : ""},
        {"passed", s.passed() ? "true" : "false"}};
    std::string t = format == "csv" ? "quantity,value\n" : "";
    char buf[128];
    for (const auto& [k, v] : rows) {
      if (format == "csv") {
        t += k + "," + v + "\n";
      } else {
        std::snprintf(buf, sizeof buf, "%-22s %s\n", k.c_str(), v.c_str());
        t += buf;
      }
    }
    out.text = t;
  }
  return s.passed() ? kPass : kToleranceFail;
}

// --- experiment -----------------------------------------------------------

/// Every frequency within four standard errors of the model probability.
inline bool consistent(const simx::ExperimentResult& r) {
  for (const auto& t : r.tables) {
    for (std::size_t k = 0; k < t.counts.size(); ++k) {
      const double p = t.probabilities[k];
      const double sigma = std::sqrt(p * (1.0 - p) / double(t.shots));
      if (std::abs(t.frequency(k) - p) > 4.0 * sigma + 1e-12) return false;
    }
  }
  return true;
}

inline int experiment(int id, std::uint64_t shots, const std::string& noise, std::uint64_t seed,
                      const std::string& format, Output& out) {
  if (id < 1 || id > 6) throw ValidationError("experiment id must be 1..6");
  if (shots < 1) throw ValidationError("--shots must be at least 1");
  const simx::NoiseSpec n = parse_noise(noise);
  const simx::ExperimentResult r = simx::run_experiment(id, shots, n, seed);
  const bool ok = consistent(r);
  if (format == "json") {
    Json j = to_json(r);
    j["command"] = "experiment";
    j["model_consistent"] = ok;
    out.text = json_text(j);
  } else if (format == "csv") {
    std::string s = "outcome,count,frequency,stderr\n";
    for (const auto& t : r.tables) {
      for (std::size_t k = 0; k < t.counts.size(); ++k) {
        s += t.basis + "/" + t.outcomes[k] + "," + std::to_string(t.counts[k]) + "," +
             g17(t.frequency(k)) + "," + g17(t.stderr_of(k)) + "\n";
      }
    }
    out.text = s;
  } else {
    std::ostringstream os;
    char buf[160];
    os << "experiment " << id << "  shots " << shots << "  seed " << seed << "  sampler "
       << r.sampler << "\n";
    std::snprintf(buf, sizeof buf, "%-10s %8s %10s %10s %10s\n", "outcome", "count", "frequency",
                  "stderr", "model");
    os << buf;
    for (const auto& t : r.tables) {
      for (std::size_t k = 0; k < t.counts.size(); ++k) {
        const std::string label = t.basis + "/" + t.outcomes[k];
        std::snprintf(buf, sizeof buf, "%-10s %8llu %10.6f %10.6f %10.6f\n", label.c_str(),
                      static_cast<unsigned long long>(t.counts[k]), t.frequency(k), t.stderr_of(k),
                      t.probabilities[k]);
        os << buf;
      }
    }
    std::snprintf(buf, sizeof buf, "%s (%.4f, %.4f, %.4f) +- (%.4f, %.4f, %.4f)\n",
                  id >= 5 ? "correlations" : "bloch", r.estimate[0], r.estimate[1], r.estimate[2],
                  r.estimate_stderr[0], r.estimate_stderr[1], r.estimate_stderr[2]);
    os << buf;
    std::snprintf(buf, sizeof buf, "model fidelity %.6f\n", r.model_fidelity);
    os << buf;
    out.text = os.str();
  }
  return ok ? kPass : kToleranceFail;
}

}  // namespace detail

/// Runs the program on `args` (without the program name).
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Entropic uncertainty relations with quantum side information", "eurqsi"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "eurqsi 0.1.0");

  std::string format = "json";
  const auto add_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"json", "csv", "table"}))
        ->capture_default_str();
  };

  std::optional<double> tolerance;
  double check_tol = kFidelityTolerance;
  std::string scenario_path, relation = "bipartite_refined", pvms = "auto", noise = "none";
  std::size_t trials = 1000, dim = 2;
  std::uint64_t seed = 0, shots = 8192;
  int experiment_id = 0;

  CLI::App* ex = app.add_subcommand("examples", "Run the four gallery cases against their expected values");
  ex->add_option("--tolerance", tolerance, "Uniform tolerance overriding every class");
  add_format(ex);

  CLI::App* ck = app.add_subcommand("check", "Evaluate the relations on a scenario file");
  ck->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  ck->add_option("--tolerance", check_tol, "Allowed negative slack")->capture_default_str();
  add_format(ck);

  CLI::App* fz = app.add_subcommand("fuzz", "Check the relations on seeded random instances");
  fz->add_option("--trials", trials, "Number of instances")->capture_default_str();
  fz->add_option("--dim", dim, "Dimension of A and of B")->capture_default_str();
  fz->add_option("--seed", seed, "Base seed")->capture_default_str();
  fz->add_option("--tolerance", check_tol, "Allowed negative slack")->capture_default_str();
  fz->add_option("--relation", relation, "Relation to check")
      ->check(CLI::IsMember({"tripartite", "tripartite_refined", "bipartite", "bipartite_refined"}))
      ->capture_default_str();
  fz->add_option("--pvms", pvms, "pauli, random, or auto (pauli in dimension 2)")
      ->check(CLI::IsMember({"auto", "pauli", "random"}))
      ->capture_default_str();
  add_format(fz);

  CLI::App* xp = app.add_subcommand("experiment", "Simulate one of the six reversal experiments");
  xp->add_option("id", experiment_id, "Experiment number, 1 to 6")->required();
  xp->add_option("--shots", shots, "Shots per measurement setting")->capture_default_str();
  xp->add_option("--noise", noise, "none or depolarizing=P,readout=Q")->capture_default_str();
  xp->add_option("--seed", seed, "Sampler seed")->capture_default_str();
  add_format(xp);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::CallForVersion&) {
    out << "eurqsi 0.1.0\n";
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }

  detail::Output result;
  std::string name;
  int code = kPass;
  try {
    if (ex->parsed()) {
      name = "examples";
      code = detail::examples(tolerance, format, result);
    } else if (ck->parsed()) {
      name = "check";
      code = detail::check(scenario_path, check_tol, format, result);
    } else if (fz->parsed()) {
      name = "fuzz";
      FuzzConfig cfg;
      cfg.relation = *parse_relation(relation);
      cfg.trials = trials;
      cfg.dim_a = cfg.dim_b = dim;
      cfg.seed = seed;
      cfg.tolerance = check_tol;
      code = detail::fuzz(cfg, pvms, format, result);
    } else {
      name = "experiment";
      code = detail::experiment(experiment_id, shots, noise, seed, format, result);
    }
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const CLI::ValidationError& e) {
    err << "parse error: " << e.what() << "\n";
    return kParseError;
  } catch (const std::invalid_argument& e) {
    // InvariantError, DimensionError, ValidationError
    err << "validation error: " << e.what() << "\n";
    return kValidationError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kParseError;
  }

  if (const char* dir = std::getenv(kOutDirEnv); dir != nullptr && *dir != '\0') {
    const std::filesystem::path path =
        std::filesystem::path(dir) / (name + "." + detail::extension_of(format));
    try {
      std::filesystem::create_directories(dir);
      detail::write_atomically(path, result.text);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kParseError;
    }
    err << "wrote " << path.string() << "\n";
  } else {
    out << result.text;
  }
  return code;
}

}  // namespace eurqsi::cli
