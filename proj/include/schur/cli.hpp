// Copyright 2026 The schur-stream Authors
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

// The `schur` command line. Exit codes: 0 success, 1 invalid input or
// arguments, 2 a size guardrail or branch cap was hit, 3 internal numerical
// failure.

#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "schur/cg.hpp"
#include "schur/io.hpp"
#include "schur/oracle.hpp"
#include "schur/resources.hpp"
#include "schur/sampler.hpp"

namespace schur::cli {

using io::json;

enum ExitCode : int { kOk = 0, kInvalid = 1, kLimit = 2, kNumerical = 3 };

struct RunConfig {
  std::string command;
  int d = 2;
  int n = 0;
  std::string stream_path;
  std::string state_path;
  std::string compare_path;
  std::string lambda;
  std::string dump_path;
  std::uint64_t seed = 0;
  int trials = 1;
  double prune = kDefaultPrune;
  std::size_t cap = kDefaultBranchCap;
  std::size_t max_dim = kOracleMaxDim;
  std::string format = "json";
  ModelParams model;
  int measure_limit = 12;  // largest k whose CG matrices are decomposed in `resources`

  void validate() const {
    if (d < 2) throw ValidationError("--d must be at least 2");
    if (trials < 1) throw ValidationError("--trials must be at least 1");
    if (!(prune >= 0.0 && prune <= 1e-6)) throw ValidationError("--prune must lie in [0, 1e-6]");
    if (cap < 1 || max_dim < 1) throw ValidationError("guardrails must be positive");
    if (format != "json" && format != "csv") throw ValidationError("--format must be json or csv");
  }

  json to_json() const {
    json c;
    c["command"] = command;
    c["d"] = d;
    if (command == "resources" || command == "oracle") c["n"] = n;
    if (!stream_path.empty()) c["stream"] = stream_path;
    if (!state_path.empty()) c["state"] = state_path;
    if (!compare_path.empty()) c["compare"] = compare_path;
    if (!lambda.empty()) c["lambda"] = lambda;
    if (command == "sample") c["trials"] = trials;
    if (command == "dist" || command == "full") {
      c["prune"] = prune;
      c["branch_cap"] = cap;
    }
    if (command == "full" || command == "oracle") c["max_dim"] = max_dim;
    if (command == "resources") {
      c["epsilon"] = model.epsilon;
      c["p"] = model.p;
      c["c"] = model.c;
      c["kappa"] = model.kappa;
      c["measure_limit"] = measure_limit;
    }
    c["format"] = format;
    return c;
  }
};

struct Output {
  json report;
  std::string csv;  // filled when format == csv
};

inline json envelope(const RunConfig& cfg, bool seeded) {
  json r;
  r["tool"] = "schur";
  r["version"] = kVersion;
  r["command"] = cfg.command;
  r["config"] = cfg.to_json();
  r["seed"] = seeded ? json(cfg.seed) : json(nullptr);
  return r;
}

inline std::string csv_line(const std::vector<std::string>& fields) {
  std::string s;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) s += ',';
    const bool quote = fields[i].find(',') != std::string::npos;
    s += quote ? "\"" + fields[i] + "\"" : fields[i];
  }
  return s + "\n";
}

inline json ledger_json(const ResourceLedger& ledger) {
  json records = json::array();
  for (const auto& r : ledger.records) {
    records.push_back({{"k", r.k},
                       {"width", r.width},
                       {"removal", r.removal},
                       {"cg_size", r.cg_size},
                       {"givens", r.givens},
                       {"iteration_bound", io::big_string(r.iteration_bound)}});
  }
  return {{"records", records},
          {"totals",
           {{"givens", ledger.total_givens()},
            {"iteration_bound", io::big_string(ledger.total_iteration_bound())},
            {"removals", ledger.removals()},
            {"peak_width", ledger.peak_width()}}}};
}

inline json distribution_json(const BranchDistribution& dist) {
  json entries = json::array();
  for (const auto& [path, p] : dist.entries)
    entries.push_back({{"lambda", path.end().to_string()}, {"path", path.to_string()}, {"probability", p}});
  json marginal = json::object();
  // most boxes in the first row first
  for (auto it = dist.marginal.rbegin(); it != dist.marginal.rend(); ++it)
    marginal[it->first.to_string()] = it->second;
  return {{"n", dist.n},
          {"d", dist.d},
          {"marginal", marginal},
          {"paths", entries},
          {"pruned", dist.pruned},
          {"branches", dist.branches},
          {"max_normalization_error", dist.max_normalization_error}};
}

inline std::string distribution_csv(const BranchDistribution& dist) {
  std::string out = csv_line({"lambda", "path", "probability"});
  for (const auto& [path, p] : dist.entries)
    out += csv_line({path.end().to_string(), path.to_string(), io::format_double(p)});
  return out;
}

// ---------------------------------------------------------------- commands

inline Output cmd_sample(const RunConfig& cfg) {
  const Stream stream = io::parse_stream(io::read_json_file(cfg.stream_path), cfg.d);
  Output out;
  out.report = envelope(cfg, true);
  json trials = json::array();
  std::map<Partition, int> histogram;
  std::string csv = csv_line({"trial", "lambda", "path", "probability"});
  ResourceLedger ledger;
  for (int t = 0; t < cfg.trials; ++t) {
    RunResult r = run_stream(stream, cfg.seed, static_cast<std::uint64_t>(t));
    double prob = 1.0;
    for (double p : r.step_probabilities) prob *= p;
    trials.push_back({{"trial", t},
                      {"lambda", r.lambda.to_string()},
                      {"path", r.path.to_string()},
                      {"probability", prob},
                      {"step_probabilities", r.step_probabilities}});
    csv += csv_line({std::to_string(t), r.lambda.to_string(), r.path.to_string(), io::format_double(prob)});
    ++histogram[r.lambda];
    if (t == 0) ledger = r.ledger;
  }
  json hist = json::object();
  for (auto it = histogram.rbegin(); it != histogram.rend(); ++it) hist[it->first.to_string()] = it->second;
  out.report["result"] = {{"n", stream.size()}, {"trials", trials}, {"histogram", hist},
                          {"ledger_trial_0", ledger_json(ledger)}};
  out.csv = csv;
  return out;
}

inline Output cmd_dist(const RunConfig& cfg) {
  const Stream stream = io::parse_stream(io::read_json_file(cfg.stream_path), cfg.d);
  const auto dist = branch_distribution(stream, {cfg.prune, cfg.cap});
  Output out;
  out.report = envelope(cfg, false);
  out.report["result"] = distribution_json(dist);
  out.csv = distribution_csv(dist);
  return out;
}

inline Output cmd_full(const RunConfig& cfg) {
  const auto state = io::parse_state(io::read_json_file(cfg.state_path));
  const BranchOptions opt{cfg.prune, cfg.cap};
  const BranchDistribution dist =
      std::holds_alternative<CVector>(state)
          ? run_full_state(std::get<CVector>(state), cfg.d, opt, cfg.max_dim)
          : run_full_state(std::get<CMatrix>(state), cfg.d, opt, cfg.max_dim);
  Output out;
  out.report = envelope(cfg, false);
  out.report["result"] = distribution_json(dist);
  out.csv = distribution_csv(dist);
  return out;
}

inline Output cmd_oracle(RunConfig cfg) {
  CMatrix rho;
  std::optional<Stream> compare;
  if (!cfg.state_path.empty()) {
    const auto state = io::parse_state(io::read_json_file(cfg.state_path));
    if (std::holds_alternative<CVector>(state)) {
      const CVector& psi = std::get<CVector>(state);
      rho = psi * psi.adjoint();
    } else {
      rho = std::get<CMatrix>(state);
    }
  } else if (!cfg.compare_path.empty()) {
    compare = io::parse_stream(io::read_json_file(cfg.compare_path), cfg.d);
    checked_pow(static_cast<std::size_t>(cfg.d), compare->size(), cfg.max_dim);
    rho = stream_density(*compare);
  }
  if (rho.size() > 0) {
    cfg.n = infer_qudits(rho.rows(), cfg.d, cfg.max_dim);
  } else {
    if (cfg.n < 1) throw ValidationError("oracle needs --n, --state or --compare");
    const auto dim = static_cast<Eigen::Index>(
        checked_pow(static_cast<std::size_t>(cfg.d), static_cast<std::size_t>(cfg.n), cfg.max_dim));
    rho = CMatrix::Identity(dim, dim) / static_cast<double>(dim);
  }
  const SchurUnitary su = schur_transform(cfg.n, cfg.d, cfg.max_dim);
  const WeakSchurProbs probs = weak_schur_probs(rho, su);

  Output out;
  out.report = envelope(cfg, false);
  json marginal = json::object();
  std::string csv = csv_line({"lambda", "probability"});
  for (auto it = probs.by_lambda.rbegin(); it != probs.by_lambda.rend(); ++it) {
    marginal[it->first.to_string()] = it->second;
    csv += csv_line({it->first.to_string(), io::format_double(it->second)});
  }
  json result = {{"n", cfg.n},
                 {"d", cfg.d},
                 {"input", cfg.state_path.empty() ? (compare ? "stream product" : "maximally mixed") : "state"},
                 {"marginal", marginal},
                 {"route_gap", probs.route_gap}};
  if (compare) {
    const auto dist = branch_distribution(*compare);
    double gap = 0.0, path_gap = 0.0;
    for (const auto& [lambda, p] : probs.by_lambda) {
      auto it = dist.marginal.find(lambda);
      gap = std::max(gap, std::abs(p - (it == dist.marginal.end() ? 0.0 : it->second)));
    }
    for (const auto& [path, p] : probs.by_path) {
      auto it = dist.entries.find(path);
      path_gap = std::max(path_gap, std::abs(p - (it == dist.entries.end() ? 0.0 : it->second)));
    }
    result["max_deviation"] = gap;
    result["max_path_deviation"] = path_gap;
  }
  out.report["result"] = result;
  out.csv = csv;
  return out;
}

inline Output cmd_cg(const RunConfig& cfg) {
  if (cfg.format == "csv") throw ValidationError("cg emits JSON only");
  const Partition lambda = Partition::parse(cfg.lambda, cfg.d);
  auto t = cg_transform(lambda);
  const SparsityReport sp = verify_sparsity(*t);
  Output out;
  out.report = envelope(cfg, false);
  json blocks = json::array();
  for (const auto& b : t->blocks)
    blocks.push_back({{"j", b.j}, {"target", b.target.to_string()}, {"offset", b.offset}, {"dim", b.dim}});
  json matrix = json::array();
  for (Eigen::Index r = 0; r < t->size(); ++r)
    for (Eigen::Index c = 0; c < t->size(); ++c) {
      matrix.push_back(t->matrix(r, c).real());
      matrix.push_back(t->matrix(r, c).imag());
    }
  json result = {{"lambda", lambda.to_string()},
                 {"d", cfg.d},
                 {"size", t->size()},
                 {"construction", cfg.d == 2 ? "closed form" : "numeric"},
                 {"unitarity_error", unitarity_error(t->matrix)},
                 {"blocks", blocks},
                 {"sparsity",
                  {{"nonzeros_below_diagonal", sp.below_diagonal},
                   {"max_below_diagonal_per_row", sp.max_below_per_row},
                   {"max_below_diagonal_per_column", sp.max_below_per_column},
                   {"max_nonzeros_per_row", sp.max_per_row},
                   {"two_per_row_holds", sp.two_per_row_holds},
                   {"givens_rotations", sp.givens_rotations},
                   {"row_sparsity_bound", 2}}}};
  // row-major (re, im) pairs
  json dump = {{"rows", t->size()}, {"cols", t->size()}, {"data", matrix}};
  if (cfg.dump_path.empty()) {
    result["matrix"] = dump;
  } else {
    std::ofstream f(cfg.dump_path);
    if (!f) throw ValidationError("cannot write " + cfg.dump_path);
    json file = {{"lambda", lambda.to_string()}, {"d", cfg.d}, {"blocks", blocks}, {"matrix", dump}};
    f << file.dump(2) << "\n";
    result["dump"] = cfg.dump_path;
  }
  out.report["result"] = result;
  return out;
}

inline Output cmd_resources(const RunConfig& cfg) {
  if (cfg.n < 2) throw ValidationError("--n must be at least 2");
  const MemoryProfile mem = memory_profile(cfg.n, cfg.d);
  Output out;
  out.report = envelope(cfg, false);
  json records = json::array();
  std::string csv = csv_line({"k", "width", "removal", "cg_size", "givens", "iteration_bound"});
  const int dim_limit = cfg.d == 2 ? cfg.measure_limit : std::min(cfg.measure_limit, 12 / cfg.d);
  std::size_t measured_total = 0;
  bool all_measured = true;
  for (int k = 1; k < cfg.n; ++k) {
    const auto& w = mem.widths[k - 1];
    // worst case over partitions of k: largest CG matrix and its rotations
    std::optional<std::size_t> givens;
    Eigen::Index size = 0;
    if (k <= dim_limit) {
      std::size_t worst = 0;
      for (const auto& lambda : partitions_of(k, cfg.d)) {
        worst = std::max(worst, cg_givens_count(lambda));
        size = std::max(size, static_cast<Eigen::Index>(dim_unitary_size(lambda)) * cfg.d);
      }
      givens = worst;
      measured_total += worst;
    } else {
      all_measured = false;
    }
    const std::string bound = io::big_string(iteration_bound(k, cfg.d));
    records.push_back({{"k", k},
                       {"width", w},
                       {"removal", static_cast<bool>(mem.removals[k - 1])},
                       {"cg_size", givens ? json(size) : json(nullptr)},
                       {"givens", givens ? json(*givens) : json(nullptr)},
                       {"iteration_bound", bound}});
    csv += csv_line({std::to_string(k), std::to_string(w), mem.removals[k - 1] ? "1" : "0",
                     givens ? std::to_string(size) : "", givens ? std::to_string(*givens) : "", bound});
  }
  int removals = 0;
  for (bool r : mem.removals) removals += r ? 1 : 0;
  json totals = {{"peak_width", mem.peak},
                 {"removals", removals},
                 {"givens_measured", all_measured ? json(measured_total) : json(nullptr)}};
  json model;
  if (cfg.d == 2) {
    const auto g = qubit_gate_count(cfg.n, cfg.model);
    totals["two_level_bound"] = io::big_string(g.two_level);
    model["qubit"] = {{"two_level_bound", io::big_string(g.two_level)},
                      {"delta", g.delta},
                      {"bits_per_rotation", g.bits},
                      {"clifford_t_estimate", g.clifford_t},
                      {"formula", "two_level * (kappa * n) * ceil(log2(1/delta)), delta = epsilon / (c n^2)"}};
  }
  const auto q = qudit_gate_bound(cfg.n, cfg.d, cfg.model);
  model["qudit"] = {{"m_sum", io::big_string(q.m_sum)},
                    {"integral_bound", q.integral_bound},
                    {"delta", q.delta},
                    {"log_factor", q.log_factor},
                    {"total_estimate", q.total},
                    {"formula", "M * n * ceil(log2(1/delta)^p), delta = epsilon / (c d n^(2d-1))"}};
  model["notice"] = kModelNotice;
  out.report["result"] = {{"n", cfg.n}, {"d", cfg.d}, {"records", records}, {"totals", totals}, {"model", model}};
  out.csv = csv;
  return out;
}

// ------------------------------------------------------------------ driver

/// Parses argv, runs the command, writes the report to `out` and
/// diagnostics to `err`; returns the exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Streaming weak Schur sampling: sampler, oracle, CG transforms and resource counts", "schur"};
  app.set_version_flag("--version", std::string(kVersion));
  std::string schema_name;
  auto* schema_opt = app.add_option("--schema", schema_name, "print a JSON schema: stream, state or report")
                         ->expected(0, 1);
  RunConfig cfg;

  auto common = [&](CLI::App* sub) { sub->add_option("--d", cfg.d, "local dimension")->capture_default_str(); };
  auto format = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "json or csv")->capture_default_str();
  };

  auto* sample = app.add_subcommand("sample", "sample lambda from a product stream");
  common(sample);
  sample->add_option("--stream", cfg.stream_path, "stream JSON file")->required();
  sample->add_option("--seed", cfg.seed, "RNG seed")->capture_default_str();
  sample->add_option("--trials", cfg.trials, "independent trials")->capture_default_str();
  format(sample);

  auto* dist = app.add_subcommand("dist", "exact branch distribution of a product stream");
  common(dist);
  dist->add_option("--stream", cfg.stream_path, "stream JSON file")->required();
  dist->add_option("--prune", cfg.prune, "drop branches below this probability")->capture_default_str();
  dist->add_option("--cap", cfg.cap, "live branch cap")->capture_default_str();
  format(dist);

  auto* full = app.add_subcommand("full", "branch distribution of an arbitrary n-qudit state");
  common(full);
  full->add_option("--state", cfg.state_path, "state JSON file")->required();
  full->add_option("--prune", cfg.prune, "drop branches below this probability")->capture_default_str();
  full->add_option("--cap", cfg.cap, "branch cap")->capture_default_str();
  full->add_option("--max-dim", cfg.max_dim, "largest d^n accepted")->capture_default_str();
  format(full);

  auto* oracle = app.add_subcommand("oracle", "brute-force lambda distribution");
  common(oracle);
  oracle->add_option("--n", cfg.n, "qudits (maximally mixed input when no state is given)");
  oracle->add_option("--state", cfg.state_path, "state JSON file");
  oracle->add_option("--compare", cfg.compare_path, "stream JSON file to compare with the sampler");
  oracle->add_option("--max-dim", cfg.max_dim, "largest d^n accepted")->capture_default_str();
  format(oracle);

  auto* cg = app.add_subcommand("cg", "Clebsch-Gordan transform of one partition");
  common(cg);
  cg->add_option("--lambda", cfg.lambda, "partition such as 3,1")->required();
  cg->add_option("--dump", cfg.dump_path, "write the matrix to this file instead of the report");

  auto* res = app.add_subcommand("resources", "register widths and gate-count models");
  common(res);
  res->add_option("--n", cfg.n, "qudits")->required();
  res->add_option("--epsilon", cfg.model.epsilon, "target accuracy")->capture_default_str();
  res->add_option("--p", cfg.model.p, "log exponent for qudit gate sets")->capture_default_str();
  res->add_option("--c", cfg.model.c, "constant in delta")->capture_default_str();
  res->add_option("--kappa", cfg.model.kappa, "gates per two-level unitary, per qubit")->capture_default_str();
  res->add_option("--measure-limit", cfg.measure_limit, "decompose CG matrices up to this k")
      ->capture_default_str();
  format(res);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInvalid;
  }

  if (schema_opt->count() > 0) {
    const json all = io::schemas();
    if (schema_name.empty()) {
      out << all.dump(2) << "\n";
    } else if (all.contains(schema_name)) {
      out << all.at(schema_name).dump(2) << "\n";
    } else {
      err << "unknown schema '" << schema_name << "' (stream, state, report)\n";
      return kInvalid;
    }
    return kOk;
  }

  try {
    Output result;
    if (sample->parsed()) {
      cfg.command = "sample";
      cfg.validate();
      result = cmd_sample(cfg);
    } else if (dist->parsed()) {
      cfg.command = "dist";
      cfg.validate();
      result = cmd_dist(cfg);
    } else if (full->parsed()) {
      cfg.command = "full";
      cfg.validate();
      result = cmd_full(cfg);
    } else if (oracle->parsed()) {
      cfg.command = "oracle";
      cfg.validate();
      result = cmd_oracle(cfg);
    } else if (cg->parsed()) {
      cfg.command = "cg";
      cfg.validate();
      result = cmd_cg(cfg);
    } else if (res->parsed()) {
      cfg.command = "resources";
      cfg.validate();
      result = cmd_resources(cfg);
    } else {
      err << app.help();
      return kInvalid;
    }
    if (cfg.format == "csv") out << result.csv;
    else out << result.report.dump(2) << "\n";
    return kOk;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kInvalid;
  } catch (const LimitError& e) {
    err << "limit: " << e.what() << "\n";
    return kLimit;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed input: " << e.what() << "\n";
    return kInvalid;
  }
}

}  // namespace schur::cli
