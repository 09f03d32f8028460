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

#ifndef OTSOLVE_SINKHORN_H_
#define OTSOLVE_SINKHORN_H_

#include <optional>

#include "json.hpp"
#include "otsolve/instance.h"
#include "otsolve/linalg.h"
#include "otsolve/report.h"

namespace otsolve {

struct SinkhornConfig {
  double penalty = 1e-3;  // entropic regularization epsilon
  // Stop once ||X 1 - f||_1 + ||X^T 1 - g||_1 <= tol.
  double tol = 1e-4;
  long max_iters = 100'000'000;
  double time_limit_s = 3600.0;
  bool deterministic = false;

  void Validate() const;
};

nlohmann::json ConfigToJson(const SinkhornConfig& config);

// Log-domain dual potentials; the plan is exp((phi_i + psi_j - C_ij) / eps).
struct Potentials {
  Vector phi;
  Vector psi;
};

struct SinkhornResult {
  Matrix plan;  // before rounding
  Potentials potentials;
  SolveReport report;
};

// Entropic OT by alternating log-domain updates
//   phi_i <- eps log f_i - eps logsumexp_j((psi_j - C_ij) / eps)
//   psi_j <- eps log g_j - eps logsumexp_i((phi_i - C_ij) / eps)
// with max-shifted logsumexp, so nothing overflows at small eps. Rows and
// columns with zero mass are dropped for the iteration and come back as zero
// rows/columns of the plan (their potentials are reported as 0). The report's
// gap pairs the rounded plan with f^T phi + g^T psi, which at convergence is
// about eps times the entropy of the plan; see SinkhornReportGap for pairing
// with an LP dual bound instead.
SinkhornResult SinkhornSolve(const OTProblem& problem,
                             const SinkhornConfig& config);

// Rounds `plan` and returns |<C, X_feas> - D| where D is
// `reference_dual_objective` when given (e.g. f^T p + g^T q from a PDHG run
// on the same instance) and f^T phi + g^T psi otherwise.
double SinkhornReportGap(const OTProblem& problem, const Matrix& plan,
                         const Potentials& potentials,
                         std::optional<double> reference_dual_objective =
                             std::nullopt);

}  // namespace otsolve

#endif  // OTSOLVE_SINKHORN_H_
