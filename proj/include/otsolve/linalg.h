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

#ifndef OTSOLVE_LINALG_H_
#define OTSOLVE_LINALG_H_

#include <cstddef>
#include <span>

#include "Eigen/Core"

namespace otsolve {

using Vector = Eigen::VectorXd;
// Plans and cost matrices are stored row-major so that row i of a plan is a
// contiguous slice; this matches the flattening used for grid images.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Pairwise (cascade) summation with a fixed association order. The result
// depends only on the input, never on how the caller got there.
double PairwiseSum(std::span<const double> values);
double PairwiseDot(std::span<const double> a, std::span<const double> b);
double PairwiseSquaredNorm(std::span<const double> values);

inline std::span<const double> AsSpan(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
inline std::span<const double> AsSpan(const Matrix& m) {
  return {m.data(), static_cast<std::size_t>(m.size())};
}

}  // namespace otsolve

#endif  // OTSOLVE_LINALG_H_
