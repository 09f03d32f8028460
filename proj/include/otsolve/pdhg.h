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

#ifndef OTSOLVE_PDHG_H_
#define OTSOLVE_PDHG_H_

#include <functional>
#include <optional>
#include <string_view>

#include "json.hpp"
#include "otsolve/instance.h"
#include "otsolve/kkt.h"
#include "otsolve/report.h"

namespace otsolve {

enum class RestartMode {
  // Restart to the running average once its KKT error has decayed by `beta`
  // relative to the epoch start.
  kFixedBeta,
  // Restart to the better of current/average on sufficient decay, necessary
  // decay without local progress, or an overly long inner loop.
  kAdaptive,
};

// Which KKT measure drives restart tests. Termination always uses the
// relative measure.
enum class KktMode { kRelative, kAbsolute };

std::string_view RestartModeName(RestartMode mode);
RestartMode ParseRestartMode(std::string_view name);  // "fixed" | "adaptive"

struct SolverConfig {
  double tol = 1e-4;
  double time_limit_s = 3600.0;
  long max_iters = 10'000'000;
  RestartMode restart_mode = RestartMode::kAdaptive;
  KktMode kkt_mode = KktMode::kRelative;
  double beta = 0.5;
  double beta_sufficient = 0.1;
  double beta_necessary = 0.9;
  double beta_artificial = 0.36;
  // Exponential smoothing of the primal weight at restarts.
  double theta = 0.5;
  double eps_zero = 1e-10;
  bool adaptive_step_size = true;
  bool primal_weight_update = true;
  // Line-search constants: shrink on rejection, growth proposal on
  // acceptance.
  double step_shrink = 0.5;
  double step_growth = 1.05;
  // Defaults to 1 / (2 sqrt(m + n)).
  std::optional<double> initial_step_size;
  double initial_primal_weight = 1.0;
  // KKT is evaluated every `kkt_stride` iterations; restart and termination
  // tests only run at evaluated iterations.
  int kkt_stride = 1;
  // Reproducible reports: the wall time is reported as zero.
  bool deterministic = false;

  // Throws Error(kInvalidArgument) when a parameter is out of range.
  void Validate() const;

  // Plain restarted PDHG: fixed-beta restarts to the average with a constant
  // step size 1 / (2 sqrt(m + n)) and unit primal weight.
  static SolverConfig FixedBeta(double beta);
};

nlohmann::json ConfigToJson(const SolverConfig& config);

// tau = eta / omega, sigma = eta * omega.
struct StepState {
  double eta = 1.0;
  double omega = 1.0;

  double tau() const { return eta / omega; }
  double sigma() const { return eta * omega; }
};

// One PDHG iteration on the transport saddle point:
//   X+ = max(0, X - tau (C - A^T(p, q)))
//   p+ = p + sigma (f - (2 X+ - X) 1)
//   q+ = q + sigma (g - (2 X+ - X)^T 1)
Iterate PdhgStep(const OTProblem& problem, const Iterate& it, double tau,
                 double sigma);

// Largest step size the line search accepts for the move it -> next:
//
//   (omega ||dX||_F^2 + ||(dp, dq)||^2 / omega)
//     / (2 |dp^T dX 1 + dq^T dX^T 1|),
//
// +infinity when the denominator is <= eps_zero.
double StepSizeBound(const Iterate& it, const Iterate& next, double omega,
                     double eps_zero);

struct StepSizeDecision {
  double bound = 0.0;
  // Largest eta_current * shrink^k (k >= 0) not exceeding `bound`.
  double accepted_eta = 0.0;
  // min(growth * accepted_eta, bound): the proposal for the next iteration.
  double next_eta = 0.0;
  int halvings = 0;
};

StepSizeDecision AdaptiveStepSize(const Iterate& it, const Iterate& next,
                                  double omega, double eta_current,
                                  const SolverConfig& config);
// Same decision from an already computed bound.
StepSizeDecision AdaptiveStepSize(double bound, double eta_current,
                                  const SolverConfig& config);

// exp(theta log(delta_pq / delta_x) + (1 - theta) log(omega_prev)) when both
// movements exceed eps_zero, omega_prev otherwise.
double PrimalWeightUpdate(double delta_x, double delta_pq, double omega_prev,
                          double theta, double eps_zero);

enum class CandidateSource { kCurrent, kAverage };

// Current wins only on a strictly smaller KKT value.
CandidateSource ChooseRestartCandidate(double current_kkt, double average_kkt);
// Returns a copy of current or average by relative KKT.
Iterate RestartCandidate(const Iterate& current, const Iterate& average,
                         const OTProblem& problem, double scale_R);

// `k` is the number of inner iterations completed in this epoch and
// `total_iterations` the count over the whole solve.
bool ShouldRestart(const SolverConfig& config, double candidate_kkt,
                   double epoch_start_kkt, double prev_candidate_kkt, long k,
                   long total_iterations);

// Inner-loop bookkeeping between restarts.
class RestartState {
 public:
  explicit RestartState(Iterate start);

  // Folds the newest inner iterate into the running mean:
  //   avg <- k/(k+1) avg + 1/(k+1) it.
  void Accumulate(const Iterate& it);
  // Starts a new epoch at `point`.
  void Restart(Iterate point);

  const Iterate& epoch_start() const { return epoch_start_; }
  const Iterate& average() const { return average_; }
  long inner_index() const { return inner_index_; }
  int outer_index() const { return outer_index_; }

 private:
  Iterate epoch_start_;
  Iterate average_;
  long inner_index_ = 0;
  int outer_index_ = 0;
};

struct RestartEvent {
  int outer_index = 0;         // t of the epoch that starts here
  long total_iterations = 0;   // iteration count at the restart
  long previous_length = 0;    // inner iterations of the epoch just closed
  double kkt = 0.0;            // restart-test KKT of the new epoch start
  double relative_kkt = 0.0;
  CandidateSource source = CandidateSource::kAverage;
  const Iterate* point = nullptr;  // the new epoch start
  StepState step;
};

struct AcceptedStep {
  long iteration = 0;
  double eta = 0.0;
  double bound = 0.0;  // +inf when the step-size bound is inactive
  StepState step;
};

// Optional hooks for tests and diagnostics. on_restart also fires once for
// the initial point (outer_index 0).
struct SolveObserver {
  std::function<void(const RestartEvent&)> on_restart;
  std::function<void(const AcceptedStep&)> on_step;
};

struct PdhgResult {
  Iterate iterate;  // before rounding
  SolveReport report;
};

// Restarted PDHG for the transport LP. Starts from `initial` or from zero,
// stops when the relative KKT error of the current or averaged iterate drops
// to config.tol, or at the time / iteration limit (then returns whichever of
// the two is better). The report's objective and gap are computed on the
// rounded plan. Problems with a single row or column have a unique feasible
// plan and are answered directly.
PdhgResult Solve(const OTProblem& problem, const SolverConfig& config,
                 std::optional<Iterate> initial = std::nullopt,
                 const SolveObserver* observer = nullptr);

}  // namespace otsolve

#endif  // OTSOLVE_PDHG_H_
