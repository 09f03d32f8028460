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

#include "otsolve/sinkhorn.h"

#include <chrono>
#include <cmath>
#include <limits>
#include <vector>

#include "otsolve/error.h"
#include "otsolve/kkt.h"
#include "otsolve/rounding.h"

namespace otsolve {
namespace {

constexpr double kNegInfinity = -std::numeric_limits<double>::infinity();

std::vector<Eigen::Index> Support(const Vector& weights) {
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) support.push_back(i);
  }
  return support;
}

// log sum_j exp((psi_j - C_ij) / eps) for every row i.
void RowLogSumExp(const Matrix& cost, const Vector& psi, double eps,
                  Eigen::ArrayXd& work, Vector& out) {
  const Eigen::Index m = cost.rows();
  out.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    work = psi.array() - cost.row(i).transpose().array();
    const double shift = work.maxCoeff();
    out[i] = shift / eps + std::log(((work - shift) / eps).exp().sum());
  }
}

// log sum_i exp((phi_i - C_ij) / eps) for every column j.
void ColLogSumExp(const Matrix& cost, const Vector& phi, double eps,
                  Eigen::ArrayXd& shift, Eigen::ArrayXd& acc, Vector& out) {
  const Eigen::Index m = cost.rows();
  const Eigen::Index n = cost.cols();
  shift.setConstant(n, kNegInfinity);
  acc.setZero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    shift = shift.max(phi[i] - cost.row(i).transpose().array());
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    acc += ((phi[i] - cost.row(i).transpose().array() - shift) / eps).exp();
  }
  out = (shift / eps + acc.log()).matrix();
}

void CheckFinite(const Vector& v) {
  if (!v.allFinite()) {
    throw Error(ErrorCode::kNumericalFailure,
                "numerical failure: non-finite Sinkhorn potential");
  }
}

}  // namespace

void SinkhornConfig::Validate() const {
  if (!(penalty > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "penalty must be positive");
  }
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tol must be positive");
  if (max_iters <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_iters must be positive");
  }
  if (!(time_limit_s > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "time limit must be positive");
  }
}

nlohmann::json ConfigToJson(const SinkhornConfig& config) {
  return {{"penalty", config.penalty},
          {"tol", config.tol},
          {"max_iters", config.max_iters},
          {"time_limit_s", config.time_limit_s},
          {"deterministic", config.deterministic}};
}

SinkhornResult SinkhornSolve(const OTProblem& problem,
                             const SinkhornConfig& config) {
  config.Validate();
  const auto start_time = std::chrono::steady_clock::now();
  const double eps = config.penalty;

  const auto rows = Support(problem.f());
  const auto cols = Support(problem.g());
  const auto ms = static_cast<Eigen::Index>(rows.size());
  const auto ns = static_cast<Eigen::Index>(cols.size());
  Matrix cost(ms, ns);
  Vector log_f(ms);
  Vector log_g(ns);
  Vector f(ms);
  for (Eigen::Index a = 0; a < ms; ++a) {
    for (Eigen::Index b = 0; b < ns; ++b) {
      cost(a, b) = problem.cost()(rows[a], cols[b]);
    }
    f[a] = problem.f()[rows[a]];
    log_f[a] = std::log(f[a]);
  }
  for (Eigen::Index b = 0; b < ns; ++b) log_g[b] = std::log(problem.g()[cols[b]]);

  Vector phi = Vector::Zero(ms);
  Vector psi = Vector::Zero(ns);
  Vector row_lse;
  Vector col_lse;
  Eigen::ArrayXd row_work;
  Eigen::ArrayXd col_shift;
  Eigen::ArrayXd col_acc;

  SolveReport report;
  report.method = "sinkhorn";
  report.config_echo = ConfigToJson(config);
  long iterations = 0;
  std::string reason;
  for (;;) {
    RowLogSumExp(cost, psi, eps, row_work, row_lse);
    if (iterations > 0) {
      // Columns are exact after the psi update, so the row error of the
      // current plan, exp(phi_i / eps + row_lse_i) - f_i, is the whole
      // marginal violation.
      const double row_error =
          ((phi / eps + row_lse).array().exp().matrix() - f).lpNorm<1>();
      if (row_error <= config.tol) {
        reason = "feasible";
        break;
      }
    }
    if (iterations >= config.max_iters) {
      reason = "iteration_limit";
      break;
    }
    if (std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      start_time)
            .count() >= config.time_limit_s) {
      reason = "time_limit";
      break;
    }
    phi = eps * (log_f - row_lse);
    CheckFinite(phi);
    ColLogSumExp(cost, phi, eps, col_shift, col_acc, col_lse);
    psi = eps * (log_g - col_lse);
    CheckFinite(psi);
    ++iterations;
  }

  SinkhornResult result;
  result.plan = Matrix::Zero(problem.rows(), problem.cols());
  result.potentials.phi = Vector::Zero(problem.rows());
  result.potentials.psi = Vector::Zero(problem.cols());
  for (Eigen::Index a = 0; a < ms; ++a) {
    result.potentials.phi[rows[a]] = phi[a];
    for (Eigen::Index b = 0; b < ns; ++b) {
      result.plan(rows[a], cols[b]) =
          std::exp((phi[a] + psi[b] - cost(a, b)) / eps);
    }
  }
  for (Eigen::Index b = 0; b < ns; ++b) result.potentials.psi[cols[b]] = psi[b];

  const Matrix rounded = RoundToFeasible(problem, result.plan);
  const Iterate as_iterate{result.plan, result.potentials.phi,
                           result.potentials.psi};
  KktEvaluator kkt(problem);
  const KktSummary s =
      kkt.Evaluate(as_iterate, std::max(1.0, IterateNorm(as_iterate)));

  report.iterations = iterations;
  report.termination_reason = reason;
  report.primal_feasibility = MarginalViolationL1(problem, result.plan);
  report.solved = reason == "feasible";
  report.final_relative_kkt = s.relative_composite;
  report.rounded_objective = PairwiseDot(AsSpan(problem.cost()), AsSpan(rounded));
  report.dual_objective = s.dual_objective;
  report.duality_gap = std::abs(report.rounded_objective - report.dual_objective);
  report.wall_time_s =
      config.deterministic
          ? 0.0
          : std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          start_time)
                .count();
  result.report = std::move(report);
  return result;
}

double SinkhornReportGap(const OTProblem& problem, const Matrix& plan,
                         const Potentials& potentials,
                         std::optional<double> reference_dual_objective) {
  const Matrix rounded = RoundToFeasible(problem, plan);
  const double objective = PairwiseDot(AsSpan(problem.cost()), AsSpan(rounded));
  const double dual = reference_dual_objective.value_or(
      PairwiseDot(AsSpan(problem.f()), AsSpan(potentials.phi)) +
      PairwiseDot(AsSpan(problem.g()), AsSpan(potentials.psi)));
  return std::abs(objective - dual);
}

}  // namespace otsolve
