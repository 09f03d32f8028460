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

#ifndef OTSOLVE_KKT_H_
#define OTSOLVE_KKT_H_

#include <vector>

#include "otsolve/instance.h"
#include "otsolve/linalg.h"
#include "otsolve/operator.h"

namespace otsolve {

// Primal plan X (m x n) with row duals p (m) and column duals q (n).
struct Iterate {
  Matrix X;
  Vector p;
  Vector q;

  static Iterate Zero(OTShape shape);
  OTShape shape() const { return {X.rows(), X.cols()}; }
};

// ||(vec X, p, q)||_2.
double IterateNorm(const Iterate& it);

// Full KKT breakdown of an iterate. `composite` is
//
//   || ( X 1 - f,  X^T 1 - g,  vec([p 1^T + 1 q^T - C]^+),  gap / R ) ||_2
//
// and `relative_composite` is the normalized three-term sum used for restart
// and termination decisions:
//
//   ||primal residual|| / (1 + ||f|| + ||g||)
//     + ||dual violation||_F / (1 + ||C||_F)
//     + |gap| / (1 + |<C, X>| + |f^T p + g^T q|).
struct KKTReport {
  Vector primal_row;
  Vector primal_col;
  Matrix dual_violation;
  double gap = 0.0;  // signed: <C, X> - f^T p - g^T q
  double scale_R = 1.0;
  double composite = 0.0;
  double relative_composite = 0.0;
  double primal_objective = 0.0;  // <C, X>
  double dual_objective = 0.0;    // f^T p + g^T q
};

// Requires scale_R > 0. Everything goes through ApplyA / ApplyAt.
KKTReport KktError(const OTProblem& problem, const Iterate& it,
                   double scale_R);

// |<C, X> - f^T p - g^T q|.
double DualityGap(const OTProblem& problem, const Iterate& it);

// Scalar-only KKT terms, as used inside the solver loop.
struct KktSummary {
  double primal_residual = 0.0;  // ||(X 1 - f, X^T 1 - g)||_2
  double dual_residual = 0.0;    // ||[p 1^T + 1 q^T - C]^+||_F
  double gap = 0.0;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double composite = 0.0;
  double relative_composite = 0.0;
};

// Streams over the data without materializing the dual-violation matrix.
// Caches the problem norms and the marginal workspace, so one evaluator
// should be reused for a whole solve. Agrees with KktError to rounding.
class KktEvaluator {
 public:
  explicit KktEvaluator(const OTProblem& problem);

  KktSummary Evaluate(const Iterate& it, double scale_R);

 private:
  const OTProblem& problem_;
  double f_norm_;
  double g_norm_;
  double cost_norm_;
  Vector rows_;
  Vector cols_;
  std::vector<double> row_partials_;
  std::vector<double> objective_partials_;
};

}  // namespace otsolve

#endif  // OTSOLVE_KKT_H_
