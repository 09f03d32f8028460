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

#include "otsolve/report.h"

#include "otsolve/error.h"

namespace otsolve {

nlohmann::json ReportToJson(const SolveReport& report) {
  return {
      {"method", report.method},
      {"solved", report.solved},
      {"wall_time_s", report.wall_time_s},
      {"iterations", report.iterations},
      {"restarts", report.restarts},
      {"final_relative_kkt", report.final_relative_kkt},
      {"primal_feasibility", report.primal_feasibility},
      {"rounded_objective", report.rounded_objective},
      {"duality_gap", report.duality_gap},
      {"dual_objective", report.dual_objective},
      {"termination_reason", report.termination_reason},
      {"restart_kkt", report.restart_kkt},
      {"restart_lengths", report.restart_lengths},
      {"config_echo", report.config_echo},
  };
}

SolveReport ReportFromJson(const nlohmann::json& j) {
  try {
    SolveReport r;
    j.at("method").get_to(r.method);
    j.at("solved").get_to(r.solved);
    j.at("wall_time_s").get_to(r.wall_time_s);
    j.at("iterations").get_to(r.iterations);
    j.at("restarts").get_to(r.restarts);
    j.at("final_relative_kkt").get_to(r.final_relative_kkt);
    j.at("primal_feasibility").get_to(r.primal_feasibility);
    j.at("rounded_objective").get_to(r.rounded_objective);
    j.at("duality_gap").get_to(r.duality_gap);
    j.at("dual_objective").get_to(r.dual_objective);
    j.at("termination_reason").get_to(r.termination_reason);
    j.at("restart_kkt").get_to(r.restart_kkt);
    j.at("restart_lengths").get_to(r.restart_lengths);
    r.config_echo = j.at("config_echo");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad report JSON: ") + e.what());
  }
}

std::string EmitReport(const SolveReport& report) {
  return ReportToJson(report).dump(2) + "\n";
}

SolveReport ParseReport(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad report JSON: ") + e.what());
  }
  return ReportFromJson(j);
}

}  // namespace otsolve
