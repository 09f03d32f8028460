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

#ifndef OTSOLVE_OPERATOR_H_
#define OTSOLVE_OPERATOR_H_

#include <cstdint>

#include "Eigen/Core"
#include "otsolve/linalg.h"

namespace otsolve {

// Shape of a transport plan. The constraint matrix of the transport LP is
//
//   A = [ 1_n^T (x) I_m ]   in R^{(m+n) x mn},
//       [ I_n (x) 1_m^T ]
//
// acting on the column-major vectorization vec(X). Solver code never forms A;
// it only applies A and A^T through the plan's row and column sums.
struct OTShape {
  Eigen::Index m = 1;
  Eigen::Index n = 1;
};

// A applied to vec(X): the row sums X 1_n and the column sums X^T 1_m.
struct Marginals {
  Vector rows;
  Vector cols;
};

Marginals ApplyA(const Matrix& plan);
// Allocation-free variant; `rows` and `cols` are resized if needed.
void ApplyA(const Matrix& plan, Vector& rows, Vector& cols);

// A^T [p; q] = p 1_n^T + 1_m q^T, i.e. entry (i, j) is p_i + q_j.
Matrix ApplyAt(const Vector& p, const Vector& q);

// Column-major vec(X): entry (i, j) lands at index i + j*m.
Eigen::VectorXd Vectorize(const Matrix& plan);
Matrix Unvectorize(const Eigen::VectorXd& x, OTShape shape);

// Largest plan size accepted by MaterializeA.
inline constexpr Eigen::Index kMaxMaterializedEntries = 10'000;

// Dense 0/1 matrix A built from the Kronecker definition. For test oracles
// only; throws Error(kSizeGuard) when m*n exceeds kMaxMaterializedEntries.
Eigen::MatrixXd MaterializeA(OTShape shape);

// ||A||_2 = sqrt(m + n), attained at the constant plan.
double OperatorNorm(OTShape shape);

struct PowerIterationResult {
  double norm_estimate = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Estimates ||A||_2 by power iteration on A^T A, starting from a seeded
// random vector. Stops when successive estimates differ by <= tol
// (relative).
PowerIterationResult PowerIterationNorm(const Eigen::MatrixXd& a,
                                        int max_iterations = 1000,
                                        double tol = 1e-14,
                                        std::uint64_t seed = 1);
// Same iteration through ApplyA / ApplyAt.
PowerIterationResult PowerIterationNorm(OTShape shape,
                                        int max_iterations = 1000,
                                        double tol = 1e-14,
                                        std::uint64_t seed = 1);

}  // namespace otsolve

#endif  // OTSOLVE_OPERATOR_H_
