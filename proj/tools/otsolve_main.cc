// Copyright 2026 The otsolve Authors
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

// otsolve: command-line front end for the transport solvers.

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "otsolve/bench.h"
#include "otsolve/error.h"
#include "otsolve/instance.h"
#include "otsolve/pdhg.h"
#include "otsolve/report.h"
#include "otsolve/sinkhorn.h"

namespace {

using namespace otsolve;

void WriteText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::kInvalidArgument, "write failed: " + path);
}

struct SolveArgs {
  std::string instance;
  std::string method = "pdot";
  double tol = 1e-4;
  double time_limit = 3600.0;
  double penalty = 1e-3;
  std::string restart = "adaptive";
  double beta = 0.5;
  bool deterministic = false;
  std::string out;
};

int RunSolve(const SolveArgs& a) {
  const OTProblem problem = LoadInstance(a.instance);
  SolveReport report;
  if (a.method == "pdot") {
    SolverConfig config;
    if (ParseRestartMode(a.restart) == RestartMode::kFixedBeta) {
      config = SolverConfig::FixedBeta(a.beta);
    } else {
      config.beta = a.beta;
    }
    config.tol = a.tol;
    config.time_limit_s = a.time_limit;
    config.deterministic = a.deterministic;
    report = Solve(problem, config).report;
  } else {
    SinkhornConfig config;
    config.penalty = a.penalty;
    config.tol = a.tol;
    config.time_limit_s = a.time_limit;
    config.deterministic = a.deterministic;
    report = SinkhornSolve(problem, config).report;
  }
  WriteText(a.out, EmitReport(report));
  return 0;
}

struct GenArgs {
  std::string cls;
  int resolution = 4;
  std::string norm = "l2";
  std::uint64_t seed = 0;
  bool normalize_cost = false;
  std::string out;
};

int RunGen(const GenArgs& a) {
  if (a.resolution < 1) {
    throw Error(ErrorCode::kInvalidArgument, "resolution must be positive");
  }
  const auto [source, target] =
      SynthInstance(ParseImageClass(a.cls), a.resolution, a.seed);
  const OTProblem problem =
      ProblemFromImages(source, target, ParseNormKind(a.norm), a.normalize_cost);
  if (a.out.empty() || a.out == "-") {
    WriteInstance(problem, std::cout);
  } else {
    SaveInstance(problem, a.out);
  }
  return 0;
}

struct BenchArgs {
  std::string instances;
  std::string methods = "pdot";
  std::string summary;
  std::string json;
  double tol = 1e-4;
  double time_limit = 3600.0;
  bool deterministic = false;
};

int RunBenchCommand(const BenchArgs& a) {
  BenchOptions options;
  options.instances = a.instances;
  options.methods = ParseMethods(a.methods);
  options.pdot.tol = a.tol;
  options.pdot.time_limit_s = a.time_limit;
  options.pdot.deterministic = a.deterministic;
  options.sinkhorn.tol = a.tol;
  options.sinkhorn.time_limit_s = a.time_limit;
  options.sinkhorn.deterministic = a.deterministic;
  const BenchSummary summary = RunBench(options);
  for (const std::string& m : summary.missing) {
    std::cerr << "otsolve: skipped " << m << '\n';
  }
  if (!a.summary.empty()) {
    std::ostringstream csv;
    WriteSummaryCsv(summary, csv);
    WriteText(a.summary, csv.str());
  }
  const std::string json = SummaryToJson(summary).dump(2) + "\n";
  if (!a.json.empty()) WriteText(a.json, json);
  for (const GroupSummary& g : summary.groups) {
    std::cout << g.method << ": solved " << g.solved << "/" << g.instances
              << ", sgm10 " << g.sgm10_time << " s, geomean gap "
              << g.geomean_gap << (g.gap_floored ? " (floored)" : "") << '\n';
  }
  return 0;
}

int RunOracle(const std::string& path) {
  const OTProblem problem = LoadInstance(path);
  const ExactOracleResult r = ExactOracle(problem);
  nlohmann::json plan = nlohmann::json::array();
  for (Eigen::Index i = 0; i < r.plan.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < r.plan.cols(); ++j) row.push_back(r.plan(i, j));
    plan.push_back(row);
  }
  nlohmann::json out = {{"objective", r.objective},
                        {"plan", plan},
                        {"p", std::vector<double>(r.p.begin(), r.p.end())},
                        {"q", std::vector<double>(r.q.begin(), r.q.end())},
                        {"trees", r.trees}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal transport by restarted PDHG, with a Sinkhorn baseline"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance");
  solve_cmd->add_option("--instance", solve.instance, "Instance file")->required();
  solve_cmd->add_option("--method", solve.method)
      ->check(CLI::IsMember({"pdot", "sinkhorn"}));
  solve_cmd->add_option("--tol", solve.tol, "Relative KKT (pdot) or marginal L1 (sinkhorn) tolerance");
  solve_cmd->add_option("--time-limit", solve.time_limit, "Seconds");
  solve_cmd->add_option("--penalty", solve.penalty, "Sinkhorn entropic penalty");
  solve_cmd->add_option("--restart", solve.restart)
      ->check(CLI::IsMember({"adaptive", "fixed"}));
  solve_cmd->add_option("--beta", solve.beta, "Restart decay factor for --restart fixed");
  solve_cmd->add_flag("--deterministic", solve.deterministic,
                      "Report zero wall time so reports are reproducible");
  solve_cmd->add_option("--out", solve.out, "Report path (default stdout)");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic grid instance");
  gen_cmd->add_option("--class", gen.cls)
      ->required()
      ->check(CLI::IsMember({"whitenoise", "shapes", "cauchy_like"}));
  gen_cmd->add_option("--resolution", gen.resolution)->required();
  gen_cmd->add_option("--norm", gen.norm)->check(CLI::IsMember({"l1", "l2", "linf"}));
  gen_cmd->add_option("--seed", gen.seed);
  gen_cmd->add_flag("--normalize-cost", gen.normalize_cost,
                    "Divide the cost by its largest entry");
  gen_cmd->add_option("--out", gen.out, "Instance path (default stdout)");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run a benchmark over an instance set");
  bench_cmd->add_option("--instances", bench.instances,
                        "Directory of *.ot files or a file listing paths")
      ->required();
  bench_cmd->add_option("--methods", bench.methods,
                        "Comma list: pdot, sinkhorn, sinkhorn:<eps>");
  bench_cmd->add_option("--summary", bench.summary, "Summary CSV path");
  bench_cmd->add_option("--json", bench.json, "Full JSON path");
  bench_cmd->add_option("--tol", bench.tol);
  bench_cmd->add_option("--time-limit", bench.time_limit, "Seconds per cell");
  bench_cmd->add_flag("--deterministic", bench.deterministic);

  std::string oracle_path;
  auto* oracle_cmd = app.add_subcommand("oracle", "Exact optimum of a small instance");
  oracle_cmd->add_option("--instance", oracle_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve_cmd) return RunSolve(solve);
    if (*gen_cmd) return RunGen(gen);
    if (*bench_cmd) return RunBenchCommand(bench);
    if (*oracle_cmd) return RunOracle(oracle_path);
  } catch (const std::exception& e) {
    std::cerr << "otsolve: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
