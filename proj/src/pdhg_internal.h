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

#ifndef OTSOLVE_SRC_PDHG_INTERNAL_H_
#define OTSOLVE_SRC_PDHG_INTERNAL_H_

#include "otsolve/instance.h"
#include "otsolve/kkt.h"
#include "otsolve/linalg.h"

namespace otsolve::internal {

// Scratch buffers for the fused step.
struct StepWorkspace {
  Vector extrapolated_rows;
  Vector extrapolated_cols;
  Vector delta_rows;
  Vector delta_cols;
  double delta_x_sq = 0.0;
  double next_x_sq = 0.0;
};

// PdhgStep in a single pass over the plan. Besides the next iterate it
// collects what the line search and the scale_R tracking need: the row and
// column sums of dX, ||dX||^2 and ||X+||^2.
void FusedStep(const OTProblem& problem, const Iterate& it, double tau,
               double sigma, Iterate& next, StepWorkspace& ws);

}  // namespace otsolve::internal

#endif  // OTSOLVE_SRC_PDHG_INTERNAL_H_
