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

#include "otsolve/operator.h"

#include <cmath>
#include <random>
#include <string>

#include "otsolve/error.h"

namespace otsolve {
namespace {

template <typename ApplyNormal>
PowerIterationResult RunPowerIteration(Eigen::Index dim, int max_iterations,
                                       double tol, std::uint64_t seed,
                                       const ApplyNormal& apply_normal) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd v(dim);
  for (auto& x : v) x = normal(rng);
  v.normalize();

  PowerIterationResult result;
  double previous = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    Eigen::VectorXd w = apply_normal(v);
    // Rayleigh quotient of A^T A at the unit vector v is ||A v||^2.
    const double lambda = v.dot(w);
    result.norm_estimate = std::sqrt(std::max(lambda, 0.0));
    result.iterations = it;
    const double w_norm = w.norm();
    if (w_norm == 0.0) {
      result.converged = true;
      break;
    }
    v = w / w_norm;
    if (it > 1 && std::abs(result.norm_estimate - previous) <=
                      tol * std::max(1.0, result.norm_estimate)) {
      result.converged = true;
      break;
    }
    previous = result.norm_estimate;
  }
  return result;
}

}  // namespace

void ApplyA(const Matrix& plan, Vector& rows, Vector& cols) {
  const Eigen::Index m = plan.rows();
  const Eigen::Index n = plan.cols();
  rows.resize(m);
  cols.setZero(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double* row = plan.data() + i * n;
    rows[i] = PairwiseSum({row, static_cast<std::size_t>(n)});
    for (Eigen::Index j = 0; j < n; ++j) cols[j] += row[j];
  }
}

Marginals ApplyA(const Matrix& plan) {
  Marginals out;
  ApplyA(plan, out.rows, out.cols);
  return out;
}

Matrix ApplyAt(const Vector& p, const Vector& q) {
  Matrix out(p.size(), q.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    out.row(i) = q.transpose().array() + p[i];
  }
  return out;
}

Eigen::VectorXd Vectorize(const Matrix& plan) {
  Eigen::VectorXd x(plan.size());
  const Eigen::Index m = plan.rows();
  for (Eigen::Index j = 0; j < plan.cols(); ++j) {
    for (Eigen::Index i = 0; i < m; ++i) x[i + j * m] = plan(i, j);
  }
  return x;
}

Matrix Unvectorize(const Eigen::VectorXd& x, OTShape shape) {
  if (x.size() != shape.m * shape.n) {
    throw Error(ErrorCode::kDimensionMismatch, "vector length is not m*n");
  }
  Matrix plan(shape.m, shape.n);
  for (Eigen::Index j = 0; j < shape.n; ++j) {
    for (Eigen::Index i = 0; i < shape.m; ++i) plan(i, j) = x[i + j * shape.m];
  }
  return plan;
}

Eigen::MatrixXd MaterializeA(OTShape shape) {
  if (shape.m < 1 || shape.n < 1) {
    throw Error(ErrorCode::kInvalidArgument, "shape must be at least 1x1");
  }
  if (shape.m * shape.n > kMaxMaterializedEntries) {
    throw Error(ErrorCode::kSizeGuard,
                "refusing to materialize A for a " + std::to_string(shape.m) +
                    "x" + std::to_string(shape.n) + " plan");
  }
  const Eigen::Index m = shape.m;
  const Eigen::Index n = shape.n;
  const Eigen::MatrixXd ones_m = Eigen::MatrixXd::Ones(1, m);
  const Eigen::MatrixXd ones_n = Eigen::MatrixXd::Ones(1, n);
  const Eigen::MatrixXd eye_m = Eigen::MatrixXd::Identity(m, m);
  const Eigen::MatrixXd eye_n = Eigen::MatrixXd::Identity(n, n);

  auto kron = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
      }
    }
    return out;
  };

  Eigen::MatrixXd a(m + n, m * n);
  a.topRows(m) = kron(ones_n, eye_m);
  a.bottomRows(n) = kron(eye_n, ones_m);
  return a;
}

double OperatorNorm(OTShape shape) {
  return std::sqrt(static_cast<double>(shape.m + shape.n));
}

PowerIterationResult PowerIterationNorm(const Eigen::MatrixXd& a,
                                        int max_iterations, double tol,
                                        std::uint64_t seed) {
  return RunPowerIteration(
      a.cols(), max_iterations, tol, seed,
      [&a](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return a.transpose() * (a * v);
      });
}

PowerIterationResult PowerIterationNorm(OTShape shape, int max_iterations,
                                        double tol, std::uint64_t seed) {
  return RunPowerIteration(
      shape.m * shape.n, max_iterations, tol, seed,
      [shape](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        const Marginals ax = ApplyA(Unvectorize(v, shape));
        return Vectorize(ApplyAt(ax.rows, ax.cols));
      });
}

}  // namespace otsolve
