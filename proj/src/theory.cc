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

#include "otsolve/theory.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "Eigen/LU"
#include "otsolve/error.h"

namespace otsolve {
namespace {

double MaxDataEntry(const OTProblem& problem) {
  return std::max({problem.cost().cwiseAbs().maxCoeff(),
                   problem.f().cwiseAbs().maxCoeff(),
                   problem.g().cwiseAbs().maxCoeff()});
}

}  // namespace

double DefaultPartitionTolerance(const OTProblem& problem) {
  return 1e-7 * (1.0 + MaxDataEntry(problem));
}

Partition PartitionAndDelta(const OTProblem& problem, const Iterate& optimum,
                            double tol) {
  const Eigen::Index m = problem.rows();
  const Eigen::Index n = problem.cols();
  const double root = std::sqrt(static_cast<double>(m + n));
  Partition part;
  double delta = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double reduced =
          problem.cost()(i, j) - optimum.p[i] - optimum.q[j];
      const double x = optimum.X(i, j);
      if (reduced > tol) {
        part.N.push_back({i, j});
        delta = std::min(delta, reduced / root);
      } else if (x > tol) {
        part.B1.push_back({i, j});
        delta = std::min(delta, x);
      } else {
        part.B2.push_back({i, j});
      }
    }
  }
  if (part.B1.empty()) {
    throw Error(ErrorCode::kDegenerate, "inconsistent optimal input");
  }
  part.delta = delta;
  return part;
}

bool CheckIdentification(const Partition& partition, const OTProblem& problem,
                         const Iterate& it, double tol) {
  for (const Cell& c : partition.N) {
    const double reduced = problem.cost()(c.i, c.j) - it.p[c.i] - it.q[c.j];
    if (it.X(c.i, c.j) > tol || reduced <= tol) return false;
  }
  for (const Cell& c : partition.B1) {
    if (it.X(c.i, c.j) <= tol) return false;
  }
  return true;
}

std::optional<Eigen::MatrixXd> InverseIfNonsingular(const Eigen::MatrixXd& a) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
  if (!lu.isInvertible()) return std::nullopt;
  return lu.inverse();
}

bool IsTernary(const Eigen::MatrixXd& inverse, double tol) {
  for (double v : inverse.reshaped()) {
    const double r = std::round(v);
    if (std::abs(v - r) > tol || std::abs(r) > 1.0) return false;
  }
  return true;
}

TuCheckResult TuSubmatrixCheck(OTShape shape, int trials, std::uint64_t seed,
                               int max_order) {
  const Eigen::MatrixXd a = MaterializeA(shape);
  const Eigen::Index m = shape.m;
  const Eigen::Index total_rows = shape.m + shape.n;
  const Eigen::Index total_cols = shape.m * shape.n;
  // rank(A) = m + n - 1, so larger submatrices are always singular.
  const int order_cap = static_cast<int>(std::min<Eigen::Index>(
      {static_cast<Eigen::Index>(max_order), total_rows - 1, total_cols}));

  TuCheckResult result;
  if (order_cap < 1) return result;
  std::mt19937_64 rng(seed);
  const long attempt_limit = 10'000L * std::max(trials, 1);

  std::vector<Eigen::Index> all_cols(static_cast<std::size_t>(total_cols));
  std::iota(all_cols.begin(), all_cols.end(), 0);
  while (result.checked < trials && result.attempts < attempt_limit) {
    ++result.attempts;
    const int order =
        1 + static_cast<int>(rng() % static_cast<std::uint64_t>(order_cap));
    std::shuffle(all_cols.begin(), all_cols.end(), rng);
    std::vector<Eigen::Index> cols(all_cols.begin(), all_cols.begin() + order);

    // Rows untouched by the chosen columns would give a zero row.
    std::vector<Eigen::Index> touched;
    for (Eigen::Index c : cols) {
      touched.push_back(c % m);
      touched.push_back(m + c / m);
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    if (static_cast<int>(touched.size()) < order) continue;
    std::shuffle(touched.begin(), touched.end(), rng);

    Eigen::MatrixXd sub(order, order);
    for (int r = 0; r < order; ++r) {
      for (int c = 0; c < order; ++c) sub(r, c) = a(touched[r], cols[c]);
    }
    const auto inverse = InverseIfNonsingular(sub);
    if (!inverse) continue;
    ++result.checked;
    result.max_size = std::max(result.max_size, order);
    if (!IsTernary(*inverse)) result.passed = false;
  }
  if (result.checked < trials) result.passed = false;
  return result;
}

TheoryBounds DataPrecision(const OTProblem& problem, std::int64_t denominator,
                           double beta) {
  if (denominator < 1) {
    throw Error(ErrorCode::kInvalidArgument, "denominator must be positive");
  }
  if (!(beta > 0.0 && beta < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "beta must lie in (0, 1)");
  }
  std::int64_t common = 0;
  auto absorb = [&](double value) {
    const double scaled = value * static_cast<double>(denominator);
    const double rounded = std::round(scaled);
    if (std::abs(scaled - rounded) > 1e-9) {
      throw Error(ErrorCode::kInvalidArgument,
                  "data entry " + std::to_string(value) +
                      " is not a multiple of 1/" + std::to_string(denominator));
    }
    common = std::gcd(common, static_cast<std::int64_t>(std::abs(rounded)));
  };
  for (double v : problem.cost().reshaped()) absorb(v);
  for (double v : problem.f()) absorb(v);
  for (double v : problem.g()) absorb(v);

  TheoryBounds bounds;
  bounds.beta = beta;
  bounds.H = MaxDataEntry(problem);
  bounds.Delta = static_cast<double>(std::max<std::int64_t>(common, 1)) /
                 static_cast<double>(denominator);
  const double size = static_cast<double>(problem.rows() + problem.cols());
  bounds.local_restart_bound = 16.0 / beta * std::pow(size, 1.5);
  bounds.global_restart_bound =
      1536.0 / beta * (bounds.H / bounds.Delta) * size * size * size;
  return bounds;
}

}  // namespace otsolve
