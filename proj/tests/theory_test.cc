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
#include "otsolve/bench.h"
#include "otsolve/error.h"
#include "otsolve/operator.h"
#include "otsolve/pdhg.h"
#include "otsolve/theory.h"

using namespace otsolve;

namespace {

OTProblem Explicit(const Matrix& c, const Vector& f, const Vector& g) {
  return OTProblem(CostMatrix{c, NormKind::kExplicit}, Marginal::FromWeights(f),
                   Marginal::FromWeights(g));
}

Matrix Swap() {
  Matrix c(2, 2);
  c << 0, 1, 1, 0;
  return c;
}

}  // namespace

TEST_CASE("partition of the uniform 2x2 optimum") {
  const OTProblem p = Explicit(Swap(), Vector::Constant(2, 0.5), Vector::Constant(2, 0.5));
  const Iterate opt{Matrix::Identity(2, 2) * 0.5, Vector::Zero(2), Vector::Zero(2)};
  const Partition part = PartitionAndDelta(p, opt, 1e-9);
  CHECK(part.N == std::vector<Cell>{{0, 1}, {1, 0}});
  CHECK(part.B1 == std::vector<Cell>{{0, 0}, {1, 1}});
  CHECK(part.B2.empty());
  CHECK(part.delta == doctest::Approx(0.5));
  CHECK(CheckIdentification(part, p, opt, 1e-9));

  Iterate leak = opt;
  leak.X(0, 1) = 10 * 1e-9;
  CHECK_FALSE(CheckIdentification(part, p, leak, 1e-9));
  Iterate lost = opt;
  lost.X(1, 1) = 0.0;
  CHECK_FALSE(CheckIdentification(part, p, lost, 1e-9));
}

TEST_CASE("partition edge cases") {
  const OTProblem one = Explicit(Matrix::Constant(1, 1, 2.0), Vector::Ones(1), Vector::Ones(1));
  const Partition p1 =
      PartitionAndDelta(one, {Matrix::Ones(1, 1), Vector::Constant(1, 2.0), Vector::Zero(1)},
                        1e-9);
  CHECK(p1.N.empty());
  CHECK(p1.B1.size() == 1);
  CHECK(p1.B2.empty());
  CHECK(p1.delta == 1.0);

  // All-zero cost: every reduced cost vanishes, empty cells go to B2.
  const OTProblem flat = Explicit(Matrix::Zero(2, 2), Vector::Constant(2, 0.5),
                                  Vector::Constant(2, 0.5));
  const Partition p2 = PartitionAndDelta(
      flat, {Matrix::Identity(2, 2) * 0.5, Vector::Zero(2), Vector::Zero(2)}, 1e-9);
  CHECK(p2.B2 == std::vector<Cell>{{0, 1}, {1, 0}});

  try {
    PartitionAndDelta(flat, Iterate::Zero({2, 2}), 1e-9);
    FAIL("empty B1 accepted");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("inconsistent optimal input") != std::string::npos);
  }
  CHECK(DefaultPartitionTolerance(one) == doctest::Approx(3e-7));
}

TEST_CASE("delta matches a direct scan") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix c(3, 4);
    for (double& v : c.reshaped()) v = u(rng);
    Vector f(3), g(4);
    for (double& v : f) v = u(rng) + 0.1;
    for (double& v : g) v = u(rng) + 0.1;
    const OTProblem p = Explicit(c, f, g);
    const ExactOracleResult o = ExactOracle(p);
    const Iterate opt{o.plan, o.p, o.q};
    const Partition part = PartitionAndDelta(p, opt, 1e-9);
    CHECK(part.N.size() + part.B1.size() + part.B2.size() == 12);
    double expected = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < 3; ++i) {
      for (Eigen::Index j = 0; j < 4; ++j) {
        const double r = c(i, j) - o.p[i] - o.q[j];
        if (r > 1e-9) expected = std::min(expected, r / std::sqrt(7.0));
        else if (o.plan(i, j) > 1e-9) expected = std::min(expected, o.plan(i, j));
      }
    }
    CHECK(part.delta == expected);
  }
}

TEST_CASE("identification along restarts on the 2x2 instance") {
  const OTProblem p = Explicit(Swap(), (Vector(2) << 0.3, 0.7).finished(),
                               (Vector(2) << 0.6, 0.4).finished());
  const ExactOracleResult o = ExactOracle(p);
  const Partition part = PartitionAndDelta(p, {o.plan, o.p, o.q}, 1e-9);
  CHECK(part.B1.size() == 3);

  std::vector<bool> seen;
  SolveObserver obs;
  obs.on_restart = [&](const RestartEvent& e) {
    seen.push_back(CheckIdentification(part, p, *e.point, 1e-9));
  };
  SolverConfig config = SolverConfig::FixedBeta(0.5);
  config.tol = 1e-10;
  Solve(p, config, std::nullopt, &obs);
  REQUIRE(seen.size() >= 3);
  CHECK_FALSE(seen.front());
  const auto first = std::find(seen.begin(), seen.end(), true);
  REQUIRE(first != seen.end());
  CHECK(std::all_of(first, seen.end(), [](bool b) { return b; }));
}

TEST_CASE("inverses of constraint submatrices") {
  const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
  const auto inv = InverseIfNonsingular(one);
  REQUIRE(inv);
  CHECK((*inv)(0, 0) == 1.0);
  CHECK_FALSE(InverseIfNonsingular(Eigen::MatrixXd::Ones(2, 2)));
  CHECK_FALSE(IsTernary(Eigen::MatrixXd::Constant(1, 1, 0.5)));
  CHECK_FALSE(IsTernary(Eigen::MatrixXd::Constant(1, 1, 2.0)));

  // Every 3x3 submatrix of the 4x4 constraint matrix of a 2x2 plan.
  const Eigen::MatrixXd a = MaterializeA({2, 2});
  int nonsingular = 0;
  for (int rows = 0; rows < 16; ++rows) {
    if (__builtin_popcount(rows) != 3) continue;
    for (int cols = 0; cols < 16; ++cols) {
      if (__builtin_popcount(cols) != 3) continue;
      Eigen::MatrixXd sub(3, 3);
      int r = 0;
      for (int i = 0; i < 4; ++i) {
        if (!(rows >> i & 1)) continue;
        int c = 0;
        for (int j = 0; j < 4; ++j) {
          if (cols >> j & 1) sub(r, c++) = a(i, j);
        }
        ++r;
      }
      if (const auto s = InverseIfNonsingular(sub)) {
        ++nonsingular;
        CHECK(IsTernary(*s));
      }
    }
  }
  CHECK(nonsingular > 0);

  const TuCheckResult rand = TuSubmatrixCheck({3, 4}, 200, 17);
  CHECK(rand.passed);
  CHECK(rand.checked == 200);
  CHECK(rand.max_size <= 6);
}

TEST_CASE("data precision") {
  const OTProblem p = Explicit(Swap(), Vector::Constant(2, 0.5), Vector::Constant(2, 0.5));
  const TheoryBounds b = DataPrecision(p, 2, 0.5);
  CHECK(b.Delta == 0.5);
  CHECK(b.H == 1.0);
  CHECK(b.global_restart_bound == doctest::Approx(393216.0));
  CHECK(b.local_restart_bound == doctest::Approx(256.0));

  const OTProblem ints = Explicit(Matrix::Constant(1, 1, 6.0), Vector::Ones(1), Vector::Ones(1));
  CHECK(DataPrecision(ints, 1).Delta == 1.0);
  CHECK(DataPrecision(ints, 1).H == 6.0);

  Matrix c(2, 2);
  c << 0, 0.5, 1.5, 2;
  const OTProblem halves = Explicit(c, Vector::Constant(2, 0.5), Vector::Constant(2, 0.5));
  CHECK(DataPrecision(halves, 4).Delta == 0.5);

  const OTProblem thirds = Explicit(Swap(), (Vector(2) << 1.0, 2.0).finished(),
                                    Vector::Constant(2, 0.5));
  CHECK_THROWS_AS(DataPrecision(thirds, 2), Error);
  CHECK(DataPrecision(thirds, 6).Delta == doctest::Approx(1.0 / 6.0));
  CHECK_THROWS_AS(DataPrecision(p, 0), Error);
}
