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

#include "otsolve/rounding.h"

#include <algorithm>
#include <cmath>

#include "otsolve/error.h"
#include "otsolve/operator.h"

namespace otsolve {
namespace {

double ScaleFor(double target, double current) {
  if (current <= 0.0) return 1.0;
  return std::min(target / current, 1.0);
}

}  // namespace

double MarginalViolationL1(const OTProblem& problem, const Matrix& plan) {
  const Marginals ax = ApplyA(plan);
  return (problem.f() - ax.rows).lpNorm<1>() +
         (problem.g() - ax.cols).lpNorm<1>();
}

Matrix RoundToFeasible(const OTProblem& problem, const Matrix& plan) {
  if (plan.rows() != problem.rows() || plan.cols() != problem.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "plan does not match the problem shape");
  }
  const Vector& f = problem.f();
  const Vector& g = problem.g();
  const Eigen::Index m = plan.rows();
  const Eigen::Index n = plan.cols();

  Matrix out = plan;
  Vector rows;
  Vector cols;
  ApplyA(out, rows, cols);
  for (Eigen::Index i = 0; i < m; ++i) out.row(i) *= ScaleFor(f[i], rows[i]);

  ApplyA(out, rows, cols);
  Vector col_scale(n);
  for (Eigen::Index j = 0; j < n; ++j) col_scale[j] = ScaleFor(g[j], cols[j]);
  for (Eigen::Index i = 0; i < m; ++i) {
    out.row(i) = out.row(i).cwiseProduct(col_scale.transpose());
  }

  ApplyA(out, rows, cols);
  // Both deficits are non-negative in exact arithmetic; clamp rounding noise.
  const Vector err_r = (f - rows).cwiseMax(0.0);
  const Vector err_c = (g - cols).cwiseMax(0.0);
  const double err_norm = err_r.lpNorm<1>();
  if (err_norm <= 1e-14) return out;
  for (Eigen::Index i = 0; i < m; ++i) {
    out.row(i) += (err_r[i] / err_norm) * err_c.transpose();
  }
  return out;
}

bool RoundingBoundCheck(const OTProblem& problem, const Matrix& plan,
                        const Matrix& rounded, double slack) {
  const double moved = (rounded - plan).cwiseAbs().sum();
  return moved <= 2.0 * MarginalViolationL1(problem, plan) + slack;
}

}  // namespace otsolve
