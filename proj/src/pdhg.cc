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

#include "otsolve/pdhg.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "otsolve/error.h"
#include "otsolve/operator.h"
#include "otsolve/rounding.h"
#include "pdhg_internal.h"

namespace otsolve {
namespace internal {

void FusedStep(const OTProblem& problem, const Iterate& it, double tau,
               double sigma, Iterate& next, StepWorkspace& ws) {
  const Eigen::Index m = problem.rows();
  const Eigen::Index n = problem.cols();
  const Matrix& cost = problem.cost();
  ws.extrapolated_rows.resize(m);
  ws.delta_rows.resize(m);
  ws.extrapolated_cols.setZero(n);
  ws.delta_cols.setZero(n);
  next.X.resize(m, n);

  double delta_sq = 0.0;
  double x_sq = 0.0;
  const double* q = it.q.data();
  double* ext_cols = ws.extrapolated_cols.data();
  double* d_cols = ws.delta_cols.data();
  for (Eigen::Index i = 0; i < m; ++i) {
    const double* c = cost.data() + i * n;
    const double* x = it.X.data() + i * n;
    double* x_next = next.X.data() + i * n;
    const double pi = it.p[i];
    double ext_row = 0.0;
    double d_row = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double xn = std::max(x[j] - tau * (c[j] - (pi + q[j])), 0.0);
      x_next[j] = xn;
      const double ext = 2.0 * xn - x[j];
      const double d = xn - x[j];
      ext_row += ext;
      ext_cols[j] += ext;
      d_row += d;
      d_cols[j] += d;
      delta_sq += d * d;
      x_sq += xn * xn;
    }
    ws.extrapolated_rows[i] = ext_row;
    ws.delta_rows[i] = d_row;
  }
  next.p = it.p + sigma * (problem.f() - ws.extrapolated_rows);
  next.q = it.q + sigma * (problem.g() - ws.extrapolated_cols);
  ws.delta_x_sq = delta_sq;
  ws.next_x_sq = x_sq;
}

}  // namespace internal

namespace {

using internal::FusedStep;
using internal::StepWorkspace;


constexpr double kInfinity = std::numeric_limits<double>::infinity();

double BoundFromParts(double omega, double delta_x_sq, double delta_pq_sq,
                      double interaction, double eps_zero) {
  const double denominator = 2.0 * std::abs(interaction);
  if (denominator <= eps_zero) return kInfinity;
  return (omega * delta_x_sq + delta_pq_sq / omega) / denominator;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since)
      .count();
}

void CheckFinite(const KktSummary& s) {
  if (!std::isfinite(s.relative_composite) || !std::isfinite(s.composite)) {
    throw Error(ErrorCode::kNumericalFailure,
                "numerical failure: non-finite KKT error");
  }
}

}  // namespace

std::string_view RestartModeName(RestartMode mode) {
  return mode == RestartMode::kFixedBeta ? "fixed" : "adaptive";
}

RestartMode ParseRestartMode(std::string_view name) {
  if (name == "fixed") return RestartMode::kFixedBeta;
  if (name == "adaptive") return RestartMode::kAdaptive;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown restart mode '" + std::string(name) + "'");
}

void SolverConfig::Validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
  };
  require(tol > 0.0, "tol must be positive");
  require(time_limit_s > 0.0, "time limit must be positive");
  require(max_iters > 0, "max_iters must be positive");
  require(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)");
  require(beta_sufficient > 0.0 && beta_sufficient < beta_necessary &&
              beta_necessary < 1.0,
          "need 0 < beta_sufficient < beta_necessary < 1");
  require(beta_artificial > 0.0, "beta_artificial must be positive");
  require(theta >= 0.0 && theta <= 1.0, "theta must lie in [0, 1]");
  require(eps_zero > 0.0, "eps_zero must be positive");
  require(step_shrink > 0.0 && step_shrink < 1.0,
          "step_shrink must lie in (0, 1)");
  require(step_growth >= 1.0, "step_growth must be >= 1");
  require(!initial_step_size || *initial_step_size > 0.0,
          "initial step size must be positive");
  require(initial_primal_weight > 0.0, "initial primal weight must be positive");
  require(kkt_stride >= 1, "kkt_stride must be >= 1");
}

SolverConfig SolverConfig::FixedBeta(double beta) {
  SolverConfig config;
  config.restart_mode = RestartMode::kFixedBeta;
  config.beta = beta;
  config.adaptive_step_size = false;
  config.primal_weight_update = false;
  return config;
}

nlohmann::json ConfigToJson(const SolverConfig& config) {
  nlohmann::json j = {
      {"tol", config.tol},
      {"time_limit_s", config.time_limit_s},
      {"max_iters", config.max_iters},
      {"restart_mode", RestartModeName(config.restart_mode)},
      {"kkt_mode",
       config.kkt_mode == KktMode::kRelative ? "relative" : "absolute"},
      {"beta", config.beta},
      {"beta_sufficient", config.beta_sufficient},
      {"beta_necessary", config.beta_necessary},
      {"beta_artificial", config.beta_artificial},
      {"theta", config.theta},
      {"eps_zero", config.eps_zero},
      {"adaptive_step_size", config.adaptive_step_size},
      {"primal_weight_update", config.primal_weight_update},
      {"step_shrink", config.step_shrink},
      {"step_growth", config.step_growth},
      {"initial_primal_weight", config.initial_primal_weight},
      {"kkt_stride", config.kkt_stride},
      {"deterministic", config.deterministic},
  };
  j["initial_step_size"] = config.initial_step_size
                               ? nlohmann::json(*config.initial_step_size)
                               : nlohmann::json(nullptr);
  return j;
}

Iterate PdhgStep(const OTProblem& problem, const Iterate& it, double tau,
                 double sigma) {
  if (!(tau > 0.0 && sigma > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "step sizes must be positive");
  }
  Iterate next;
  next.X = (it.X - tau * (problem.cost() - ApplyAt(it.p, it.q))).cwiseMax(0.0);
  const Marginals ext = ApplyA(2.0 * next.X - it.X);
  next.p = it.p + sigma * (problem.f() - ext.rows);
  next.q = it.q + sigma * (problem.g() - ext.cols);
  return next;
}

double StepSizeBound(const Iterate& it, const Iterate& next, double omega,
                     double eps_zero) {
  const Matrix dx = next.X - it.X;
  const Vector dp = next.p - it.p;
  const Vector dq = next.q - it.q;
  const Marginals a_dx = ApplyA(dx);
  const double interaction = dp.dot(a_dx.rows) + dq.dot(a_dx.cols);
  return BoundFromParts(omega, dx.squaredNorm(),
                        dp.squaredNorm() + dq.squaredNorm(), interaction,
                        eps_zero);
}

StepSizeDecision AdaptiveStepSize(double bound, double eta_current,
                                  const SolverConfig& config) {
  StepSizeDecision d;
  d.bound = bound;
  d.accepted_eta = eta_current;
  while (d.accepted_eta > bound) {
    d.accepted_eta *= config.step_shrink;
    ++d.halvings;
  }
  d.next_eta = std::min(config.step_growth * d.accepted_eta, bound);
  return d;
}

StepSizeDecision AdaptiveStepSize(const Iterate& it, const Iterate& next,
                                  double omega, double eta_current,
                                  const SolverConfig& config) {
  return AdaptiveStepSize(StepSizeBound(it, next, omega, config.eps_zero),
                          eta_current, config);
}

double PrimalWeightUpdate(double delta_x, double delta_pq, double omega_prev,
                          double theta, double eps_zero) {
  if (delta_x > eps_zero && delta_pq > eps_zero) {
    return std::exp(theta * std::log(delta_pq / delta_x) +
                    (1.0 - theta) * std::log(omega_prev));
  }
  return omega_prev;
}

CandidateSource ChooseRestartCandidate(double current_kkt, double average_kkt) {
  return current_kkt < average_kkt ? CandidateSource::kCurrent
                                   : CandidateSource::kAverage;
}

Iterate RestartCandidate(const Iterate& current, const Iterate& average,
                         const OTProblem& problem, double scale_R) {
  const double current_kkt =
      KktError(problem, current, scale_R).relative_composite;
  const double average_kkt =
      KktError(problem, average, scale_R).relative_composite;
  return ChooseRestartCandidate(current_kkt, average_kkt) ==
                 CandidateSource::kCurrent
             ? current
             : average;
}

bool ShouldRestart(const SolverConfig& config, double candidate_kkt,
                   double epoch_start_kkt, double prev_candidate_kkt, long k,
                   long total_iterations) {
  if (config.restart_mode == RestartMode::kFixedBeta) {
    return candidate_kkt <= config.beta * epoch_start_kkt;
  }
  const bool sufficient = candidate_kkt <= config.beta_sufficient * epoch_start_kkt;
  const bool necessary = candidate_kkt <= config.beta_necessary * epoch_start_kkt &&
                         candidate_kkt > prev_candidate_kkt;
  const bool artificial =
      static_cast<double>(k) >=
      config.beta_artificial * static_cast<double>(total_iterations);
  return sufficient || necessary || artificial;
}

RestartState::RestartState(Iterate start)
    : epoch_start_(std::move(start)), average_(epoch_start_) {}

void RestartState::Accumulate(const Iterate& it) {
  const double k = static_cast<double>(inner_index_);
  const double keep = k / (k + 1.0);
  const double take = 1.0 / (k + 1.0);
  average_.X = keep * average_.X + take * it.X;
  average_.p = keep * average_.p + take * it.p;
  average_.q = keep * average_.q + take * it.q;
  ++inner_index_;
}

void RestartState::Restart(Iterate point) {
  epoch_start_ = std::move(point);
  average_ = epoch_start_;
  inner_index_ = 0;
  ++outer_index_;
}

PdhgResult Solve(const OTProblem& problem, const SolverConfig& config,
                 std::optional<Iterate> initial,
                 const SolveObserver* observer) {
  config.Validate();
  const auto start_time = std::chrono::steady_clock::now();
  const Eigen::Index m = problem.rows();
  const Eigen::Index n = problem.cols();
  const OTShape shape{m, n};

  PdhgResult result;
  SolveReport& report = result.report;
  report.method = "pdot";
  report.config_echo = ConfigToJson(config);

  KktEvaluator kkt(problem);
  auto finish = [&](Iterate it, const std::string& reason, double scale_R) {
    const KktSummary s = kkt.Evaluate(it, scale_R);
    const Matrix rounded = RoundToFeasible(problem, it.X);
    report.final_relative_kkt = s.relative_composite;
    report.solved = s.relative_composite <= config.tol;
    report.termination_reason = reason;
    report.primal_feasibility = MarginalViolationL1(problem, it.X);
    report.rounded_objective =
        PairwiseDot(AsSpan(problem.cost()), AsSpan(rounded));
    report.dual_objective = s.dual_objective;
    report.duality_gap = std::abs(report.rounded_objective - s.dual_objective);
    report.wall_time_s = config.deterministic ? 0.0 : Seconds(start_time);
    result.iterate = std::move(it);
    return result;
  };

  if (m == 1 || n == 1) {
    // The only feasible plan is f g^T; duals from the reduced-cost system on
    // the single row or column make the gap vanish.
    Iterate forced = Iterate::Zero(shape);
    forced.X = problem.f() * problem.g().transpose();
    if (m == 1) {
      forced.q = problem.cost().row(0).transpose();
    } else {
      forced.p = problem.cost().col(0);
    }
    return finish(std::move(forced), "forced_plan", 1.0);
  }

  Iterate current = initial ? std::move(*initial) : Iterate::Zero(shape);
  if (current.X.rows() != m || current.X.cols() != n || current.p.size() != m ||
      current.q.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "initial iterate does not match the problem shape");
  }
  current.X = current.X.cwiseMax(0.0);

  const auto restart_measure = [&config](const KktSummary& s) {
    return config.kkt_mode == KktMode::kRelative ? s.relative_composite
                                                 : s.composite;
  };

  double scale_R = std::max(1.0, IterateNorm(current));
  StepState step;
  step.eta = config.initial_step_size.value_or(
      1.0 / (2.0 * std::sqrt(static_cast<double>(m + n))));
  step.omega = config.initial_primal_weight;

  const KktSummary start_summary = kkt.Evaluate(current, scale_R);
  CheckFinite(start_summary);
  double epoch_start_kkt = restart_measure(start_summary);
  double prev_candidate_kkt = epoch_start_kkt;
  report.restart_kkt.push_back(epoch_start_kkt);

  RestartState state(current);
  if (observer && observer->on_restart) {
    observer->on_restart({0, 0, 0, epoch_start_kkt,
                          start_summary.relative_composite,
                          CandidateSource::kAverage, &state.epoch_start(),
                          step});
  }
  if (start_summary.relative_composite <= config.tol) {
    return finish(std::move(current), "optimal", scale_R);
  }

  Iterate next = current;
  StepWorkspace ws;
  long total = 0;

  for (;;) {
    if (total >= config.max_iters || Seconds(start_time) >= config.time_limit_s) {
      const KktSummary cur = kkt.Evaluate(current, scale_R);
      const KktSummary avg = kkt.Evaluate(state.average(), scale_R);
      report.iterations = total;
      const std::string reason =
          total >= config.max_iters ? "iteration_limit" : "time_limit";
      if (state.inner_index() > 0 &&
          avg.relative_composite <= cur.relative_composite) {
        return finish(state.average(), reason, scale_R);
      }
      return finish(std::move(current), reason, scale_R);
    }

    double eta = step.eta;
    double bound = kInfinity;
    for (;;) {
      FusedStep(problem, current, eta / step.omega, eta * step.omega, next, ws);
      if (!config.adaptive_step_size) break;
      const Vector dp = next.p - current.p;
      const Vector dq = next.q - current.q;
      const double interaction = dp.dot(ws.delta_rows) + dq.dot(ws.delta_cols);
      bound = BoundFromParts(step.omega, ws.delta_x_sq,
                             dp.squaredNorm() + dq.squaredNorm(), interaction,
                             config.eps_zero);
      const StepSizeDecision d = AdaptiveStepSize(bound, eta, config);
      if (d.halvings == 0) {
        step.eta = d.next_eta;
        break;
      }
      eta = d.accepted_eta;
      if (!(eta > 0.0)) {
        throw Error(ErrorCode::kNumericalFailure,
                    "numerical failure: step size underflow");
      }
    }
    std::swap(current, next);
    ++total;
    scale_R = std::max(scale_R, std::sqrt(ws.next_x_sq + current.p.squaredNorm() +
                                          current.q.squaredNorm()));
    if (observer && observer->on_step) {
      observer->on_step({total, eta, bound, step});
    }
    state.Accumulate(current);

    if (total % config.kkt_stride != 0) continue;

    const KktSummary cur = kkt.Evaluate(current, scale_R);
    const KktSummary avg = kkt.Evaluate(state.average(), scale_R);
    CheckFinite(cur);
    CheckFinite(avg);
    if (std::min(cur.relative_composite, avg.relative_composite) <= config.tol) {
      report.iterations = total;
      if (avg.relative_composite <= cur.relative_composite) {
        return finish(state.average(), "optimal", scale_R);
      }
      return finish(std::move(current), "optimal", scale_R);
    }

    CandidateSource source = CandidateSource::kAverage;
    if (config.restart_mode == RestartMode::kAdaptive) {
      source = ChooseRestartCandidate(restart_measure(cur), restart_measure(avg));
    }
    const KktSummary& candidate =
        source == CandidateSource::kCurrent ? cur : avg;
    const double candidate_kkt = restart_measure(candidate);
    const long k = state.inner_index();

    if (!ShouldRestart(config, candidate_kkt, epoch_start_kkt,
                       prev_candidate_kkt, k, total)) {
      prev_candidate_kkt = candidate_kkt;
      continue;
    }

    Iterate point =
        source == CandidateSource::kCurrent ? current : state.average();
    if (config.primal_weight_update) {
      const Iterate& previous = state.epoch_start();
      const double delta_x = (point.X - previous.X).norm();
      const double delta_pq = std::sqrt((point.p - previous.p).squaredNorm() +
                                        (point.q - previous.q).squaredNorm());
      step.omega = PrimalWeightUpdate(delta_x, delta_pq, step.omega,
                                      config.theta, config.eps_zero);
    }
    report.restart_lengths.push_back(k);
    report.restarts += 1;
    report.restart_kkt.push_back(candidate_kkt);
    epoch_start_kkt = candidate_kkt;
    prev_candidate_kkt = candidate_kkt;
    current = point;
    state.Restart(std::move(point));
    if (observer && observer->on_restart) {
      observer->on_restart({state.outer_index(), total, k, candidate_kkt,
                            candidate.relative_composite, source,
                            &state.epoch_start(), step});
    }
  }
}

}  // namespace otsolve
