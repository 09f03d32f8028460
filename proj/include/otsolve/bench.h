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

#ifndef OTSOLVE_BENCH_H_
#define OTSOLVE_BENCH_H_

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "otsolve/instance.h"
#include "otsolve/linalg.h"
#include "otsolve/pdhg.h"
#include "otsolve/report.h"
#include "otsolve/sinkhorn.h"

namespace otsolve {

// Shifted geometric mean (prod (t_i + 10))^(1/n) - 10, with the time of every
// unsolved run replaced by time_limit.
double Sgm10(std::span<const double> times, const std::vector<bool>& solved,
             double time_limit);

struct GeomeanGapResult {
  double value = 0.0;
  bool floored = false;  // some gap was <= 0 and counted as 1e-16
};

inline constexpr double kGapFloor = 1e-16;

// exp(mean log gap_i).
GeomeanGapResult GeomeanGap(std::span<const double> gaps);

inline constexpr Eigen::Index kOracleMaxSize = 12;  // m + n

struct ExactOracleResult {
  double objective = 0.0;
  Matrix plan;
  // Dual solution of an optimal basis: p_i + q_j = C_ij on the tree,
  // C - p 1^T - 1 q^T >= 0 elsewhere (up to roundoff), p_0 = 0.
  Vector p;
  Vector q;
  long trees = 0;  // spanning trees visited
};

// Exact LP optimum by enumerating every spanning tree of K_{m,n}; each tree
// is a basis and its flows follow from peeling leaves. Handles degenerate
// instances. Throws Error(kSizeGuard) when m + n > kOracleMaxSize.
ExactOracleResult ExactOracle(const OTProblem& problem);

struct MethodSpec {
  std::string name;  // "pdot" or "sinkhorn"
  double penalty = 0.0;  // sinkhorn only

  std::string Label() const;
};

// Comma separated tokens: "pdot", "sinkhorn" (penalty 1e-3) or
// "sinkhorn:<eps>".
std::vector<MethodSpec> ParseMethods(std::string_view csv);

struct BenchOptions {
  // A directory (every *.ot file in it, sorted by name) or a text file
  // listing one instance path per line.
  std::filesystem::path instances;
  std::vector<MethodSpec> methods;
  SolverConfig pdot;
  SinkhornConfig sinkhorn;  // penalty overridden per method
};

struct BenchRecord {
  std::string instance;
  MethodSpec method;
  SolveReport report;
};

struct GroupSummary {
  std::string method;  // MethodSpec::Label()
  double time_limit_s = 0.0;
  long instances = 0;
  long solved = 0;
  double sgm10_time = 0.0;
  double geomean_gap = 0.0;
  bool gap_floored = false;
};

struct BenchSummary {
  std::vector<BenchRecord> records;
  std::vector<GroupSummary> groups;
  std::vector<std::string> missing;  // unreadable or invalid instance files
};

// Runs every (instance, method) cell. Timings exclude loading. When pdot is
// among the methods it runs first on each instance; a sinkhorn cell on the
// same instance then also records |<C, X_feas> - pdot dual objective| as
// config_echo["gap_vs_pdot_dual"]. The sinkhorn duality_gap itself pairs the
// rounded plan with its own potentials.
BenchSummary RunBench(const BenchOptions& options);

void WriteSummaryCsv(const BenchSummary& summary, std::ostream& out);
nlohmann::json SummaryToJson(const BenchSummary& summary);

}  // namespace otsolve

#endif  // OTSOLVE_BENCH_H_
