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
#include <random>

#include "doctest.h"
#include "otsolve/error.h"
#include "otsolve/kkt.h"

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

Iterate Make(const Matrix& x, Vector p, Vector q) { return {x, std::move(p), std::move(q)}; }

OTProblem RandomProblem(Eigen::Index m, Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix c(m, n);
  for (double& v : c.reshaped()) v = 3.0 * u(rng);
  Vector f(m), g(n);
  for (double& v : f) v = u(rng) + 0.05;
  for (double& v : g) v = u(rng) + 0.05;
  return OTProblem(CostMatrix{c, NormKind::kExplicit}, Marginal::FromWeights(f),
                   Marginal::FromWeights(g));
}

}  // namespace

TEST_CASE("kkt at the optimum") {
  const OTProblem p = Swap2x2();
  const Iterate opt = Make(Matrix::Identity(2, 2) * 0.5, Vector::Zero(2), Vector::Zero(2));
  const KKTReport r = KktError(p, opt, 1.0);
  CHECK(r.composite == 0.0);
  CHECK(r.relative_composite == 0.0);
  CHECK(DualityGap(p, opt) == 0.0);
}

TEST_CASE("kkt hand evaluation") {
  const OTProblem p = Swap2x2();
  Matrix x = Matrix::Zero(2, 2);
  x(0, 0) = 0.5;
  const KKTReport r = KktError(p, Make(x, (Vector(2) << 1, 0).finished(), Vector::Zero(2)), 1.0);
  Matrix viol(2, 2);
  viol << 1, 0, 0, 0;
  CHECK(r.dual_violation == viol);
  CHECK(r.gap == doctest::Approx(-0.5));
  CHECK(r.primal_row == Vector((Vector(2) << 0, -0.5).finished()));
  CHECK(r.primal_col == Vector((Vector(2) << 0, -0.5).finished()));
  // Primal residual (0, -0.5, 0, -0.5) enters too.
  CHECK(r.composite == doctest::Approx(std::sqrt(1.0 + 0.25 + 0.5)));

  // With a feasible plan only the violation and gap remain.
  const KKTReport s = KktError(p, Make(Matrix::Identity(2, 2) * 0.5,
                                       (Vector(2) << 1, 0).finished(), Vector::Zero(2)),
                               1.0);
  CHECK(s.composite == doctest::Approx(std::sqrt(1.0 + 0.25)));
}

TEST_CASE("kkt of the zero iterate") {
  const OTProblem p = Swap2x2(0.3, 0.6);
  const KKTReport r = KktError(p, Iterate::Zero({2, 2}), 1.0);
  const double fg = std::sqrt(p.f().squaredNorm() + p.g().squaredNorm());
  CHECK(r.composite == doctest::Approx(fg).epsilon(1e-15));
  CHECK_THROWS_AS(KktError(p, Iterate::Zero({2, 2}), 0.0), Error);
}

TEST_CASE("duality gap examples") {
  const OTProblem p = Swap2x2();
  Matrix x = Matrix::Zero(2, 2);
  x(0, 0) = 0.5;
  CHECK(DualityGap(p, Make(x, Vector::Ones(2), Vector::Zero(2))) == doctest::Approx(1.0));
  const Matrix product = p.f() * p.g().transpose();
  CHECK(DualityGap(p, Make(product, Vector::Zero(2), Vector::Zero(2))) ==
        doctest::Approx((p.cost().array() * product.array()).sum()));
}

TEST_CASE("composite vanishes only at optimal pairs") {
  const OTProblem p = Swap2x2();
  const Iterate opt = Make(Matrix::Identity(2, 2) * 0.5, Vector::Zero(2), Vector::Zero(2));
  CHECK(KktError(p, opt, 1.0).composite == 0.0);
  // Shifting p up and q down keeps the pair optimal.
  CHECK(KktError(p, Make(opt.X, Vector::Constant(2, 0.3), Vector::Constant(2, -0.3)), 1.0)
            .composite <= 1e-15);
  // Feasible but suboptimal plan with a dual-feasible pair: gap only.
  const Matrix product = Matrix::Constant(2, 2, 0.25);
  CHECK(KktError(p, Make(product, Vector::Zero(2), Vector::Zero(2)), 1.0).composite > 0.0);
  // Optimal plan with infeasible duals.
  CHECK(KktError(p, Make(opt.X, Vector::Constant(2, 0.6), Vector::Zero(2)), 1.0).composite >
        0.0);
  // Infeasible plan.
  CHECK(KktError(p, Make(opt.X * 2.0, Vector::Zero(2), Vector::Zero(2)), 1.0).composite >
        0.0);
}

TEST_CASE("primal term of the relative error under joint scaling") {
  // Marginals are always normalized, so doubling f and g is done by hand:
  // the residual doubles. The "1 +" in the normalizer means the primal term
  // itself is not scale invariant, so it is checked against the formula.
  const OTProblem p = Swap2x2(0.3, 0.6);
  Matrix x(2, 2);
  x << 0.2, 0.05, 0.35, 0.3;
  const KKTReport r = KktError(p, Make(x, Vector::Zero(2), Vector::Zero(2)), 1.0);
  const double residual =
      std::sqrt(r.primal_row.squaredNorm() + r.primal_col.squaredNorm());
  const double primal_term = residual / (1.0 + p.f().norm() + p.g().norm());
  const double gap_term =
      std::abs(r.gap) / (1.0 + std::abs(r.primal_objective) + std::abs(r.dual_objective));
  CHECK(r.relative_composite == doctest::Approx(primal_term + gap_term).epsilon(1e-14));

  const Matrix x2 = 2.0 * x;
  const Vector rows2 = x2.rowwise().sum() - 2.0 * p.f();
  const Vector cols2 = x2.colwise().sum().transpose() - 2.0 * p.g();
  CHECK(std::sqrt(rows2.squaredNorm() + cols2.squaredNorm()) ==
        doctest::Approx(2.0 * residual));
}

TEST_CASE("streaming evaluator agrees with the reference") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.5, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index m = 1 + trial % 7;
    const Eigen::Index n = 1 + (trial * 3) % 11;
    const OTProblem p = RandomProblem(m, n, rng);
    Iterate it = Iterate::Zero({m, n});
    for (double& v : it.X.reshaped()) v = std::max(0.0, u(rng)) / static_cast<double>(m * n);
    for (double& v : it.p) v = u(rng);
    for (double& v : it.q) v = u(rng);
    const double scale = std::max(1.0, IterateNorm(it));
    const KKTReport ref = KktError(p, it, scale);
    KktEvaluator eval(p);
    const KktSummary s = eval.Evaluate(it, scale);
    CHECK(s.composite == doctest::Approx(ref.composite).epsilon(1e-12));
    CHECK(s.relative_composite == doctest::Approx(ref.relative_composite).epsilon(1e-12));
    CHECK(s.gap == doctest::Approx(ref.gap).epsilon(1e-12));
    CHECK(s.primal_objective == doctest::Approx(ref.primal_objective).epsilon(1e-12));
    CHECK(s.dual_objective == doctest::Approx(ref.dual_objective).epsilon(1e-12));
  }
}
