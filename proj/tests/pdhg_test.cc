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

#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "otsolve/error.h"
#include "otsolve/instance.h"
#include "otsolve/kkt.h"
#include "otsolve/operator.h"
#include "otsolve/pdhg.h"
#include "pdhg_internal.h"

using namespace otsolve;

namespace {

OTProblem Swap2x2(double f0 = 0.5, double g0 = 0.5) {
  Matrix c(2, 2);
  c << 0, 1, 1, 0;
  Vector f(2), g(2);
  f << f0, 1 - f0;
  g << g0, 1 - g0;
  return OTProblem(CostMatrix{c, NormKind::kExplicit}, Marginal::FromWeights(f),
                   Marginal::FromWeights(g));
}

OTProblem RandomProblem(Eigen::Index m, Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix c(m, n);
  for (double& v : c.reshaped()) v = u(rng);
  Vector f(m), g(n);
  for (double& v : f) v = u(rng) + 0.1;
  for (double& v : g) v = u(rng) + 0.1;
  return OTProblem(CostMatrix{c, NormKind::kExplicit}, Marginal::FromWeights(f),
                   Marginal::FromWeights(g));
}

Iterate RandomIterate(Eigen::Index m, Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Iterate it = Iterate::Zero({m, n});
  for (double& v : it.X.reshaped()) v = std::max(0.0, u(rng) + 0.2);
  for (double& v : it.p) v = u(rng);
  for (double& v : it.q) v = u(rng);
  return it;
}

double MaxDiff(const Iterate& a, const Iterate& b) {
  return std::max({(a.X - b.X).cwiseAbs().maxCoeff(), (a.p - b.p).cwiseAbs().maxCoeff(),
                   (a.q - b.q).cwiseAbs().maxCoeff()});
}

}  // namespace

TEST_CASE("step at the optimum is a fixed point") {
  const OTProblem p = Swap2x2();
  const Iterate opt{Matrix::Identity(2, 2) * 0.5, Vector::Zero(2), Vector::Zero(2)};
  for (double tau : {0.01, 0.3, 1.0}) {
    CHECK(MaxDiff(PdhgStep(p, opt, tau, tau), opt) <= 1e-14);
  }
}

TEST_CASE("first step from zero") {
  const OTProblem p = Swap2x2(0.3, 0.6);
  const Iterate next = PdhgStep(p, Iterate::Zero({2, 2}), 0.1, 0.1);
  CHECK(next.X.isZero(0.0));
  CHECK((next.p - 0.1 * p.f()).cwiseAbs().maxCoeff() <= 1e-16);
  CHECK((next.q - 0.1 * p.g()).cwiseAbs().maxCoeff() <= 1e-16);
  CHECK_THROWS_AS(PdhgStep(p, Iterate::Zero({2, 2}), 0.0, 0.1), Error);
}

TEST_CASE("matrix form equals dense vectorized PDHG") {
  std::mt19937_64 rng(2024);
  for (Eigen::Index m = 1; m <= 5; ++m) {
    for (Eigen::Index n = 1; n <= 5; ++n) {
      const OTProblem prob = RandomProblem(m, n, rng);
      const Eigen::MatrixXd a = MaterializeA({m, n});
      const Eigen::VectorXd c = Vectorize(prob.cost());
      Eigen::VectorXd b(m + n);
      b << prob.f(), prob.g();
      const double eta = 1.0 / (2.0 * std::sqrt(static_cast<double>(m + n)));
      const double tau = eta / 1.3;
      const double sigma = eta * 1.3;

      Iterate it = RandomIterate(m, n, rng);
      Eigen::VectorXd x = Vectorize(it.X);
      Eigen::VectorXd y(m + n);
      y << it.p, it.q;
      for (int k = 0; k < 50; ++k) {
        it = PdhgStep(prob, it, tau, sigma);
        const Eigen::VectorXd xn = (x - tau * (c - a.transpose() * y)).cwiseMax(0.0);
        y += sigma * (b - a * (2.0 * xn - x));
        x = xn;
      }
      CHECK((Vectorize(it.X) - x).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK((it.p - y.head(m)).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK((it.q - y.tail(n)).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("fused kernel agrees with the reference step") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index m = 1 + trial % 6;
    const Eigen::Index n = 2 + trial % 5;
    const OTProblem prob = RandomProblem(m, n, rng);
    const Iterate it = RandomIterate(m, n, rng);
    const Iterate ref = PdhgStep(prob, it, 0.2, 0.7);
    Iterate fused;
    internal::StepWorkspace ws;
    internal::FusedStep(prob, it, 0.2, 0.7, fused, ws);
    CHECK(MaxDiff(ref, fused) <= 1e-14);
    const Matrix dx = ref.X - it.X;
    CHECK(ws.delta_x_sq == doctest::Approx(dx.squaredNorm()).epsilon(1e-13));
    CHECK(ws.next_x_sq == doctest::Approx(ref.X.squaredNorm()).epsilon(1e-13));
    CHECK((ws.delta_rows - dx.rowwise().sum()).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((ws.delta_cols - dx.colwise().sum().transpose()).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("step size bound") {
  const Iterate it = Iterate::Zero({2, 2});
  CHECK(std::isinf(StepSizeBound(it, it, 1.0, 1e-10)));

  Iterate next = it;
  next.X(0, 0) = 1.0;
  next.p[0] = 1.0;
  CHECK(StepSizeBound(it, next, 1.0, 1e-10) == doctest::Approx(1.0));
  // Weighting: omega = 2 gives (2 + 1/2) / 2.
  CHECK(StepSizeBound(it, next, 2.0, 1e-10) == doctest::Approx(1.25));
  // Sign of the interaction term does not matter.
  next.p[0] = -1.0;
  CHECK(StepSizeBound(it, next, 1.0, 1e-10) == doctest::Approx(1.0));
}

TEST_CASE("line search decisions") {
  const SolverConfig config;
  const StepSizeDecision inf = AdaptiveStepSize(std::numeric_limits<double>::infinity(),
                                                0.3, config);
  CHECK(inf.accepted_eta == 0.3);
  CHECK(inf.halvings == 0);

  const StepSizeDecision d = AdaptiveStepSize(1.0, 4.0, config);
  CHECK(d.accepted_eta <= 1.0);
  CHECK(d.halvings <= 2);
  CHECK(d.next_eta <= d.bound);

  const StepSizeDecision grow = AdaptiveStepSize(10.0, 1.0, config);
  CHECK(grow.accepted_eta == 1.0);
  CHECK(grow.next_eta == doctest::Approx(1.05));

  const Iterate zero = Iterate::Zero({2, 2});
  CHECK(AdaptiveStepSize(zero, zero, 1.0, 0.7, config).accepted_eta == 0.7);
}

TEST_CASE("primal weight update") {
  CHECK(PrimalWeightUpdate(1.0, 4.0, 1.0, 0.5, 1e-10) == doctest::Approx(2.0));
  CHECK(PrimalWeightUpdate(1e-12, 4.0, 3.0, 0.5, 1e-10) == 3.0);
  CHECK(PrimalWeightUpdate(4.0, 1e-12, 3.0, 0.5, 1e-10) == 3.0);
  CHECK(PrimalWeightUpdate(2.0, 2.0, 1.0, 0.5, 1e-10) == doctest::Approx(1.0));
  CHECK(PrimalWeightUpdate(2.0, 2.0, 4.0, 0.5, 1e-10) == doctest::Approx(2.0));
}

TEST_CASE("restart candidate") {
  CHECK(ChooseRestartCandidate(0.5, 0.0) == CandidateSource::kAverage);
  CHECK(ChooseRestartCandidate(0.0, 0.5) == CandidateSource::kCurrent);
  CHECK(ChooseRestartCandidate(0.3, 0.3) == CandidateSource::kAverage);

  const OTProblem p = Swap2x2();
  const Iterate opt{Matrix::Identity(2, 2) * 0.5, Vector::Zero(2), Vector::Zero(2)};
  const Iterate off{Matrix::Constant(2, 2, 0.1), Vector::Ones(2), Vector::Zero(2)};
  CHECK(MaxDiff(RestartCandidate(off, opt, p, 1.0), opt) == 0.0);
  CHECK(MaxDiff(RestartCandidate(opt, off, p, 1.0), opt) == 0.0);
  CHECK(MaxDiff(RestartCandidate(opt, opt, p, 1.0), opt) == 0.0);
}

TEST_CASE("restart conditions") {
  const SolverConfig adaptive;
  CHECK(ShouldRestart(adaptive, 0.05, 1.0, 0.04, 1, 1000));
  CHECK(ShouldRestart(adaptive, 0.5, 1.0, 0.4, 1, 1000));
  CHECK_FALSE(ShouldRestart(adaptive, 0.5, 1.0, 0.6, 1, 1000));
  CHECK_FALSE(ShouldRestart(adaptive, 0.95, 1.0, 0.9, 1, 1000));
  CHECK(ShouldRestart(adaptive, 2.0, 1.0, 3.0, 36, 100));
  CHECK_FALSE(ShouldRestart(adaptive, 2.0, 1.0, 3.0, 35, 100));

  const SolverConfig fixed = SolverConfig::FixedBeta(0.5);
  CHECK(ShouldRestart(fixed, 0.5, 1.0, 0.4, 1, 1000));
  CHECK_FALSE(ShouldRestart(fixed, 0.51, 1.0, 0.6, 1, 1000));
  CHECK_FALSE(ShouldRestart(fixed, 0.6, 1.0, 0.5, 500, 1000));
}

TEST_CASE("running average") {
  std::mt19937_64 rng(5);
  const Iterate start = RandomIterate(3, 4, rng);
  RestartState state(start);
  Iterate sum{Matrix::Zero(3, 4), Vector::Zero(3), Vector::Zero(4)};
  for (int k = 1; k <= 25; ++k) {
    const Iterate it = RandomIterate(3, 4, rng);
    state.Accumulate(it);
    sum.X += it.X;
    sum.p += it.p;
    sum.q += it.q;
    const Iterate mean{sum.X / k, sum.p / k, sum.q / k};
    CHECK(MaxDiff(state.average(), mean) <= 1e-14);
    CHECK(state.inner_index() == k);
  }
  state.Restart(start);
  CHECK(state.inner_index() == 0);
  CHECK(state.outer_index() == 1);
  CHECK(MaxDiff(state.epoch_start(), start) == 0.0);
}

TEST_CASE("config validation") {
  SolverConfig c;
  CHECK_NOTHROW(c.Validate());
  c.beta = 1.0;
  CHECK_THROWS_AS(c.Validate(), Error);
  c = SolverConfig{};
  c.beta_sufficient = 0.95;
  CHECK_THROWS_AS(c.Validate(), Error);
  c = SolverConfig{};
  c.tol = 0.0;
  CHECK_THROWS_AS(c.Validate(), Error);
  CHECK(ParseRestartMode("fixed") == RestartMode::kFixedBeta);
  CHECK_THROWS_AS(ParseRestartMode("sometimes"), Error);
}

TEST_CASE("single cell problem") {
  const OTProblem p(CostMatrix{Matrix::Zero(1, 1), NormKind::kExplicit},
                    Marginal::FromWeights(Vector::Ones(1)),
                    Marginal::FromWeights(Vector::Ones(1)));
  const PdhgResult r = Solve(p, SolverConfig{});
  CHECK(r.iterate.X(0, 0) == 1.0);
  CHECK(r.report.solved);
  CHECK(r.report.duality_gap == 0.0);
  CHECK(r.report.iterations == 0);
}

TEST_CASE("single row problem has the forced plan") {
  Matrix c(1, 3);
  c << 1, 2, 3;
  const OTProblem p(CostMatrix{c, NormKind::kExplicit},
                    Marginal::FromWeights(Vector::Ones(1)),
                    Marginal::FromWeights((Vector(3) << 0.2, 0.3, 0.5).finished()));
  const PdhgResult r = Solve(p, SolverConfig{});
  CHECK(r.report.solved);
  CHECK(r.report.rounded_objective == doctest::Approx(0.2 + 0.6 + 1.5));
  CHECK(r.report.duality_gap <= 1e-15);
}

TEST_CASE("two by two optimum") {
  const OTProblem p = Swap2x2(0.3, 0.6);
  SolverConfig config;
  config.tol = 1e-6;
  const PdhgResult r = Solve(p, config);
  CHECK(r.report.solved);
  CHECK(r.report.termination_reason == "optimal");
  CHECK(r.report.final_relative_kkt <= 1e-6);
  CHECK(std::abs(r.report.rounded_objective - 0.3) <= 1e-4);
  CHECK(r.report.restart_kkt.size() == static_cast<std::size_t>(r.report.restarts + 1));
  CHECK(r.report.restart_lengths.size() == static_cast<std::size_t>(r.report.restarts));
}

TEST_CASE("fixed beta restarts decay geometrically") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    const OTProblem p = RandomProblem(4, 5, rng);
    SolverConfig config = SolverConfig::FixedBeta(0.5);
    config.tol = 1e-8;
    const PdhgResult r = Solve(p, config);
    CHECK(r.report.solved);
    const auto& log = r.report.restart_kkt;
    REQUIRE(log.size() >= 2);
    for (std::size_t t = 1; t < log.size(); ++t) CHECK(log[t] <= 0.5 * log[t - 1]);
  }
}

TEST_CASE("accepted steps respect the bound and iterates stay finite") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 5; ++trial) {
    const OTProblem p = RandomProblem(5, 6, rng);
    bool ok = true;
    bool finite = true;
    SolveObserver obs;
    obs.on_step = [&](const AcceptedStep& s) { ok = ok && s.eta <= s.bound; };
    obs.on_restart = [&](const RestartEvent& e) {
      finite = finite && e.point->X.allFinite() && e.point->p.allFinite() &&
               e.point->q.allFinite();
    };
    SolverConfig config;
    config.tol = 1e-7;
    const PdhgResult r = Solve(p, config, std::nullopt, &obs);
    CHECK(r.report.solved);
    CHECK(ok);
    CHECK(finite);
  }
}

TEST_CASE("iteration limit is reported, not thrown") {
  const auto [s, t] = SynthInstance(ImageClass::kWhiteNoise, 4, 3);
  const OTProblem p = ProblemFromImages(s, t, NormKind::kL2);
  SolverConfig config;
  config.tol = 1e-12;
  config.max_iters = 7;
  const PdhgResult r = Solve(p, config);
  CHECK_FALSE(r.report.solved);
  CHECK(r.report.termination_reason == "iteration_limit");
  CHECK(r.report.iterations == 7);
}

TEST_CASE("time limit is reported, not thrown") {
  const auto [s, t] = SynthInstance(ImageClass::kWhiteNoise, 8, 3);
  const OTProblem p = ProblemFromImages(s, t, NormKind::kL2);
  SolverConfig config;
  config.tol = 1e-14;
  config.time_limit_s = 0.05;
  const PdhgResult r = Solve(p, config);
  CHECK_FALSE(r.report.solved);
  CHECK(r.report.termination_reason == "time_limit");
  CHECK(r.report.wall_time_s < 1.0);
}

TEST_CASE("kkt stride and absolute restart mode still converge") {
  const auto [s, t] = SynthInstance(ImageClass::kShapes, 4, 9);
  const OTProblem p = ProblemFromImages(s, t, NormKind::kL1);
  SolverConfig strided;
  strided.kkt_stride = 8;
  CHECK(Solve(p, strided).report.solved);
  SolverConfig absolute;
  absolute.kkt_mode = KktMode::kAbsolute;
  CHECK(Solve(p, absolute).report.solved);
}

TEST_CASE("deterministic reports repeat exactly") {
  const auto [s, t] = SynthInstance(ImageClass::kCauchyLike, 5, 2);
  const OTProblem p = ProblemFromImages(s, t, NormKind::kLinf);
  SolverConfig config;
  config.deterministic = true;
  const PdhgResult a = Solve(p, config);
  const PdhgResult b = Solve(p, config);
  CHECK(a.report == b.report);
  CHECK(a.report.wall_time_s == 0.0);
  CHECK(a.iterate.X == b.iterate.X);
}

TEST_CASE("whitenoise 16x16 with l2 cost") {
  const auto [s, t] = SynthInstance(ImageClass::kWhiteNoise, 16, 1);
  const OTProblem p = ProblemFromImages(s, t, NormKind::kL2);
  const PdhgResult r = Solve(p, SolverConfig{});
  CHECK(r.report.solved);
  CHECK(r.report.final_relative_kkt <= 1e-4);
  // Gap of the returned primal-dual pair. The gap after rounding is
  // exercised by the acceptance suite.
  const double objective = (p.cost().array() * r.iterate.X.array()).sum();
  CHECK(DualityGap(p, r.iterate) <= 1e-3 * (1.0 + std::abs(objective)));
}
