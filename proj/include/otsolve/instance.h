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

#ifndef OTSOLVE_INSTANCE_H_
#define OTSOLVE_INSTANCE_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <utility>
#include <vector>

#include "otsolve/linalg.h"

namespace otsolve {

enum class NormKind { kL1, kL2, kLinf, kExplicit };

std::string_view NormKindName(NormKind kind);
// Accepts "l1", "l2", "linf" and "explicit". Throws Error on anything else.
NormKind ParseNormKind(std::string_view name);

// A square grayscale image. Pixels are stored row-major: pixel (row, col) is
// pixels[row * resolution + col]. This is the flattening order used for
// marginals and for the coordinates of grid costs.
struct GridImage {
  int resolution = 0;
  std::vector<double> pixels;

  double at(int row, int col) const {
    return pixels[static_cast<std::size_t>(row) * resolution + col];
  }
  // Throws unless resolution >= 1, pixels.size() == r*r, all pixels are
  // finite and non-negative, and at least one is positive.
  void Validate() const;
};

// A probability vector. Construction normalizes, so the weights always sum to
// one (to rounding).
class Marginal {
 public:
  // Throws on negative, non-finite, or all-zero input.
  static Marginal FromWeights(Vector weights);

  const Vector& weights() const { return weights_; }
  Eigen::Index size() const { return weights_.size(); }

 private:
  explicit Marginal(Vector weights) : weights_(std::move(weights)) {}
  Vector weights_;
};

struct CostMatrix {
  Matrix entries;
  NormKind kind = NormKind::kExplicit;
};

// Data of  min <C, X>  s.t.  X 1 = f,  X^T 1 = g,  X >= 0.
class OTProblem {
 public:
  // Throws on dimension mismatch or negative / non-finite costs.
  OTProblem(CostMatrix cost, Marginal row_marginal, Marginal col_marginal);

  const Matrix& cost() const { return cost_.entries; }
  NormKind cost_kind() const { return cost_.kind; }
  const Vector& f() const { return row_marginal_.weights(); }
  const Vector& g() const { return col_marginal_.weights(); }
  Eigen::Index rows() const { return cost_.entries.rows(); }
  Eigen::Index cols() const { return cost_.entries.cols(); }

 private:
  CostMatrix cost_;
  Marginal row_marginal_;
  Marginal col_marginal_;
};

// Flattened (row-major) pixels divided by their sum. Throws Error with code
// kDegenerate and message "degenerate image" for an all-zero image.
Marginal MarginalFromImage(const GridImage& image);

// (r*r) x (r*r) ground cost between grid cells. Cell k sits at coordinates
// (k / r, k % r). With `max_normalize` the entries are divided by their
// maximum and the kind becomes kExplicit, since the file format can only
// regenerate raw grid distances.
CostMatrix GridCost(int resolution, NormKind kind, bool max_normalize = false);

enum class ImageClass { kWhiteNoise, kShapes, kCauchyLike };

std::string_view ImageClassName(ImageClass cls);
ImageClass ParseImageClass(std::string_view name);

// Deterministic synthetic pair of images of the given class. Requires r >= 2.
//   whitenoise:  i.i.d. uniform intensities in (0, 1].
//   shapes:      two disjoint axis-aligned rectangles of intensity 1 on a
//                zero background.
//   cauchy_like: 1 / (1 + (d / w)^2) where d is the distance to a seeded
//                center cell and w a seeded width.
std::pair<GridImage, GridImage> SynthInstance(ImageClass cls, int resolution,
                                              std::uint64_t seed);

OTProblem ProblemFromImages(const GridImage& source, const GridImage& target,
                            NormKind kind, bool max_normalize = false);

// Text instance format:
//   m n
//   cost <l1|l2|linf|explicit>
//   [m lines of n costs, explicit only]
//   m row-marginal values
//   n column-marginal values
// Lines starting with '#' and blank lines are ignored. Grid kinds require
// m == n == r*r. Errors are ParseError.
OTProblem ReadInstance(std::istream& in);
OTProblem LoadInstance(const std::filesystem::path& path);
void WriteInstance(const OTProblem& problem, std::ostream& out);
void SaveInstance(const OTProblem& problem, const std::filesystem::path& path);

}  // namespace otsolve

#endif  // OTSOLVE_INSTANCE_H_
