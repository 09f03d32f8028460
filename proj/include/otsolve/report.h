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

#ifndef OTSOLVE_REPORT_H_
#define OTSOLVE_REPORT_H_

#include <string>
#include <vector>

#include "json.hpp"

namespace otsolve {

// Per-solve record shared by both methods and emitted by the CLI as a flat
// JSON object with snake_case keys.
struct SolveReport {
  std::string method;  // "pdot" or "sinkhorn"
  bool solved = false;
  double wall_time_s = 0.0;
  long iterations = 0;
  long restarts = 0;
  double final_relative_kkt = 0.0;
  // ||X 1 - f||_1 + ||X^T 1 - g||_1 of the plan before rounding.
  double primal_feasibility = 0.0;
  // <C, X_feas> for the rounded, exactly feasible plan.
  double rounded_objective = 0.0;
  // |<C, X_feas> - dual_objective|.
  double duality_gap = 0.0;
  double dual_objective = 0.0;
  std::string termination_reason;
  // KKT value at each epoch start; entry 0 is the initial point, so the
  // vector has restarts + 1 entries. Empty for sinkhorn.
  std::vector<double> restart_kkt;
  // Inner iterations of each completed epoch.
  std::vector<long> restart_lengths;
  nlohmann::json config_echo = nlohmann::json::object();

  bool operator==(const SolveReport&) const = default;
};

nlohmann::json ReportToJson(const SolveReport& report);
// Throws Error(kParse) on missing or mistyped keys.
SolveReport ReportFromJson(const nlohmann::json& j);

std::string EmitReport(const SolveReport& report);
SolveReport ParseReport(const std::string& text);

}  // namespace otsolve

#endif  // OTSOLVE_REPORT_H_
