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

#ifndef OTSOLVE_THEORY_H_
#define OTSOLVE_THEORY_H_

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include "Eigen/Core"
#include "otsolve/instance.h"
#include "otsolve/kkt.h"
#include "otsolve/operator.h"

namespace otsolve {

struct Cell {
  Eigen::Index i = 0;
  Eigen::Index j = 0;
  auto operator<=>(const Cell&) const = default;
};

// Classification of plan entries at an optimal primal-dual pair by reduced
// cost r_ij = C_ij - p_i - q_j:
//   N  : r_ij > 0
//   B1 : r_ij = 0 and X_ij > 0
//   B2 : r_ij = 0 and X_ij = 0
// delta = min( min_N r_ij / sqrt(m + n),  min_B1 X_ij ) measures how far the
// solution is from degenerate.
struct Partition {
  std::vector<Cell> N;
  std::vector<Cell> B1;
  std::vector<Cell> B2;
  double delta = 0.0;
};

// 1e-7 * (1 + H), with H the largest data entry.
double DefaultPartitionTolerance(const OTProblem& problem);

// Floating-point version of the classification: "> 0" means "> tol" and
// "= 0" means "|.| <= tol". Throws Error(kDegenerate) with message
// "inconsistent optimal input" when B1 comes out empty.
Partition PartitionAndDelta(const OTProblem& problem, const Iterate& optimum,
                            double tol);

// True iff every N cell has X_ij <= tol and reduced cost > tol, and every B1
// cell has X_ij > tol.
bool CheckIdentification(const Partition& partition, const OTProblem& problem,
                         const Iterate& it, double tol);

// Inverse of a square matrix, or nullopt when it is singular.
std::optional<Eigen::MatrixXd> InverseIfNonsingular(const Eigen::MatrixXd& a);
// True iff every entry of `inverse` is within tol of -1, 0 or 1.
bool IsTernary(const Eigen::MatrixXd& inverse, double tol = 1e-9);

struct TuCheckResult {
  bool passed = true;
  int checked = 0;   // nonsingular submatrices inverted
  long attempts = 0; // sampled submatrices, singular ones included
  int max_size = 0;  // largest submatrix order checked
};

// Samples square submatrices of the materialized constraint matrix (order up
// to min(max_order, m + n - 1)), keeps nonsingular ones and checks that their
// inverses only contain -1, 0 and 1. Runs until `trials` nonsingular samples
// were checked.
TuCheckResult TuSubmatrixCheck(OTShape shape, int trials, std::uint64_t seed,
                               int max_order = 8);

struct TheoryBounds {
  double H = 0.0;      // ||(vec C, f, g)||_inf
  double Delta = 0.0;  // data precision
  double beta = 0.5;
  // Restart-length bound once the optimal support is identified:
  // (16 / beta) (m + n)^1.5.
  double local_restart_bound = 0.0;
  // Restart-length bound before identification:
  // (1536 / beta) (H / Delta) (m + n)^3.
  double global_restart_bound = 0.0;
};

// Recovers the data precision from a declared common denominator: all data
// times `denominator` must be integers (to 1e-9); Delta is 1 / denominator
// times the gcd of those integers. Throws Error(kInvalidArgument) otherwise.
TheoryBounds DataPrecision(const OTProblem& problem, std::int64_t denominator,
                           double beta = 0.5);

}  // namespace otsolve

#endif  // OTSOLVE_THEORY_H_
