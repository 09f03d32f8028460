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

#ifndef OTSOLVE_ROUNDING_H_
#define OTSOLVE_ROUNDING_H_

#include "otsolve/instance.h"
#include "otsolve/linalg.h"

namespace otsolve {

// ||f - X 1||_1 + ||g - X^T 1||_1.
double MarginalViolationL1(const OTProblem& problem, const Matrix& plan);

// Maps a non-negative, approximately feasible plan to an exactly feasible one
// in a single O(mn) pass:
//   1. scale row i by min(f_i / (X 1)_i, 1)   (1 when the row is empty),
//   2. scale column j of the result by min(g_j / (X^T 1)_j, 1),
//   3. add the rank-one correction err_r err_c^T / ||err_r||_1 built from the
//      remaining deficits, skipped when ||err_r||_1 <= 1e-14.
// The output satisfies both marginals to ~1e-15 and stays non-negative.
Matrix RoundToFeasible(const OTProblem& problem, const Matrix& plan);

// Checks ||X_feas - X||_1 <= 2 (||f - X 1||_1 + ||g - X^T 1||_1) + slack,
// with the l1 norm taken entry-wise.
bool RoundingBoundCheck(const OTProblem& problem, const Matrix& plan,
                        const Matrix& rounded, double slack = 1e-12);

}  // namespace otsolve

#endif  // OTSOLVE_ROUNDING_H_
