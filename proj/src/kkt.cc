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

#include "otsolve/kkt.h"

#include <algorithm>
#include <cmath>

#include "otsolve/error.h"

namespace otsolve {
namespace {

double RelativeComposite(double primal_residual, double dual_residual,
                         double gap, double primal_objective,
                         double dual_objective, double f_norm, double g_norm,
                         double cost_norm) {
  return primal_residual / (1.0 + f_norm + g_norm) +
         dual_residual / (1.0 + cost_norm) +
         std::abs(gap) /
             (1.0 + std::abs(primal_objective) + std::abs(dual_objective));
}

double DualObjective(const OTProblem& problem, const Iterate& it) {
  return PairwiseDot(AsSpan(problem.f()), AsSpan(it.p)) +
         PairwiseDot(AsSpan(problem.g()), AsSpan(it.q));
}

void CheckShapes(const OTProblem& problem, const Iterate& it) {
  if (it.X.rows() != problem.rows() || it.X.cols() != problem.cols() ||
      it.p.size() != problem.rows() || it.q.size() != problem.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "iterate does not match the problem shape");
  }
}

}  // namespace

Iterate Iterate::Zero(OTShape shape) {
  return {Matrix::Zero(shape.m, shape.n), Vector::Zero(shape.m),
          Vector::Zero(shape.n)};
}

double IterateNorm(const Iterate& it) {
  return std::sqrt(PairwiseSquaredNorm(AsSpan(it.X)) +
                   PairwiseSquaredNorm(AsSpan(it.p)) +
                   PairwiseSquaredNorm(AsSpan(it.q)));
}

KKTReport KktError(const OTProblem& problem, const Iterate& it,
                   double scale_R) {
  if (!(scale_R > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "scale_R must be positive");
  }
  CheckShapes(problem, it);
  KKTReport report;
  const Marginals ax = ApplyA(it.X);
  report.primal_row = ax.rows - problem.f();
  report.primal_col = ax.cols - problem.g();
  report.dual_violation =
      (ApplyAt(it.p, it.q) - problem.cost()).cwiseMax(0.0);
  report.primal_objective = PairwiseDot(AsSpan(problem.cost()), AsSpan(it.X));
  report.dual_objective = DualObjective(problem, it);
  report.gap = report.primal_objective - report.dual_objective;
  report.scale_R = scale_R;

  const double primal_sq = PairwiseSquaredNorm(AsSpan(report.primal_row)) +
                           PairwiseSquaredNorm(AsSpan(report.primal_col));
  const double dual_sq = PairwiseSquaredNorm(AsSpan(report.dual_violation));
  const double scaled_gap = report.gap / scale_R;
  report.composite = std::sqrt(primal_sq + dual_sq + scaled_gap * scaled_gap);
  report.relative_composite = RelativeComposite(
      std::sqrt(primal_sq), std::sqrt(dual_sq), report.gap,
      report.primal_objective, report.dual_objective, problem.f().norm(),
      problem.g().norm(), problem.cost().norm());
  return report;
}

double DualityGap(const OTProblem& problem, const Iterate& it) {
  CheckShapes(problem, it);
  return std::abs(PairwiseDot(AsSpan(problem.cost()), AsSpan(it.X)) -
                  DualObjective(problem, it));
}

KktEvaluator::KktEvaluator(const OTProblem& problem)
    : problem_(problem),
      f_norm_(problem.f().norm()),
      g_norm_(problem.g().norm()),
      cost_norm_(problem.cost().norm()),
      row_partials_(static_cast<std::size_t>(problem.rows())),
      objective_partials_(static_cast<std::size_t>(problem.rows())) {}

KktSummary KktEvaluator::Evaluate(const Iterate& it, double scale_R) {
  const Eigen::Index m = problem_.rows();
  const Eigen::Index n = problem_.cols();
  const Matrix& cost = problem_.cost();

  ApplyA(it.X, rows_, cols_);
  rows_ -= problem_.f();
  cols_ -= problem_.g();
  const double primal_sq =
      PairwiseSquaredNorm(AsSpan(rows_)) + PairwiseSquaredNorm(AsSpan(cols_));

  // One pass over C for the positive-part violation and <C, X>.
  for (Eigen::Index i = 0; i < m; ++i) {
    const double* c = cost.data() + i * n;
    const double* x = it.X.data() + i * n;
    const double* q = it.q.data();
    const double pi = it.p[i];
    double viol = 0.0;
    double obj = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double r = std::max(pi + q[j] - c[j], 0.0);
      viol += r * r;
      obj += c[j] * x[j];
    }
    row_partials_[i] = viol;
    objective_partials_[i] = obj;
  }

  KktSummary s;
  s.primal_residual = std::sqrt(primal_sq);
  s.dual_residual = std::sqrt(PairwiseSum(row_partials_));
  s.primal_objective = PairwiseSum(objective_partials_);
  s.dual_objective = DualObjective(problem_, it);
  s.gap = s.primal_objective - s.dual_objective;
  const double scaled_gap = s.gap / scale_R;
  s.composite = std::sqrt(primal_sq + s.dual_residual * s.dual_residual +
                          scaled_gap * scaled_gap);
  s.relative_composite =
      RelativeComposite(s.primal_residual, s.dual_residual, s.gap,
                        s.primal_objective, s.dual_objective, f_norm_, g_norm_,
                        cost_norm_);
  return s;
}

}  // namespace otsolve
