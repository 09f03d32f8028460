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

#include "otsolve/instance.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "otsolve/error.h"

namespace otsolve {
namespace {

// Uniform double in (0, 1] from the top 53 bits. Spelled out instead of
// std::uniform_real_distribution so generated instances are identical across
// standard library implementations.
double UnitUniform(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

int UniformInt(std::mt19937_64& rng, int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(rng() % span);
}

GridImage WhiteNoise(int r, std::mt19937_64& rng) {
  GridImage img{r, std::vector<double>(static_cast<std::size_t>(r) * r)};
  for (double& px : img.pixels) px = UnitUniform(rng);
  return img;
}

struct Rect {
  int row, col, height, width;
  bool Overlaps(const Rect& o) const {
    return row < o.row + o.height && o.row < row + height &&
           col < o.col + o.width && o.col < col + width;
  }
};

Rect RandomRect(int r, std::mt19937_64& rng) {
  const int max_side = std::max(1, r / 2);
  Rect rect;
  rect.height = UniformInt(rng, 1, max_side);
  rect.width = UniformInt(rng, 1, max_side);
  rect.row = UniformInt(rng, 0, r - rect.height);
  rect.col = UniformInt(rng, 0, r - rect.width);
  return rect;
}

GridImage Shapes(int r, std::mt19937_64& rng) {
  Rect first = RandomRect(r, rng);
  Rect second = RandomRect(r, rng);
  int attempts = 0;
  while (first.Overlaps(second) && ++attempts < 1000) {
    second = RandomRect(r, rng);
  }
  if (first.Overlaps(second)) {
    first = {0, 0, 1, 1};
    second = {r - 1, r - 1, 1, 1};
  }
  GridImage img{r, std::vector<double>(static_cast<std::size_t>(r) * r, 0.0)};
  for (const Rect& rect : {first, second}) {
    for (int i = rect.row; i < rect.row + rect.height; ++i) {
      for (int j = rect.col; j < rect.col + rect.width; ++j) {
        img.pixels[static_cast<std::size_t>(i) * r + j] = 1.0;
      }
    }
  }
  return img;
}

GridImage CauchyLike(int r, std::mt19937_64& rng) {
  const int center_row = UniformInt(rng, 0, r - 1);
  const int center_col = UniformInt(rng, 0, r - 1);
  const double width = std::max(1.0, r / 8.0) * (0.5 + UnitUniform(rng));
  GridImage img{r, std::vector<double>(static_cast<std::size_t>(r) * r)};
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) {
      const double di = (i - center_row) / width;
      const double dj = (j - center_col) / width;
      img.pixels[static_cast<std::size_t>(i) * r + j] =
          1.0 / (1.0 + di * di + dj * dj);
    }
  }
  return img;
}

// ---- text format ----------------------------------------------------------

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-blank, non-comment line; false at end of input.
  bool Next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_number_;
      const auto first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  }

  int line_number() const { return line_number_; }

 private:
  std::istream& in_;
  int line_number_ = 0;
};

std::vector<std::string_view> Tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos])))
      ++pos;
    const std::size_t start = pos;
    while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos])))
      ++pos;
    if (pos > start) tokens.push_back(line.substr(start, pos - start));
  }
  return tokens;
}

template <typename T>
T ParseNumber(std::string_view token, int line) {
  T value{};
  const auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(ErrorCode::kParse,
                     "malformed number '" + std::string(token) + "'", line);
  }
  return value;
}

std::vector<double> ParseRow(LineReader& reader, std::size_t expected,
                             std::string_view what) {
  std::string line;
  if (!reader.Next(line)) {
    throw ParseError(ErrorCode::kParse,
                     "unexpected end of file, expected " + std::string(what),
                     reader.line_number());
  }
  const auto tokens = Tokenize(line);
  if (tokens.size() != expected) {
    throw ParseError(ErrorCode::kDimensionMismatch,
                     std::string(what) + " has " +
                         std::to_string(tokens.size()) + " entries, expected " +
                         std::to_string(expected),
                     reader.line_number());
  }
  std::vector<double> values;
  values.reserve(expected);
  for (auto token : tokens) {
    const double v = ParseNumber<double>(token, reader.line_number());
    if (!std::isfinite(v)) {
      throw ParseError(ErrorCode::kParse, "non-finite value in " + std::string(what),
                       reader.line_number());
    }
    values.push_back(v);
  }
  return values;
}

Marginal ParseMarginal(LineReader& reader, std::size_t size,
                       std::string_view what) {
  const auto values = ParseRow(reader, size, what);
  const int line = reader.line_number();
  double total = 0.0;
  for (double v : values) {
    if (v < 0.0) {
      throw ParseError(ErrorCode::kNegativeEntry, "negative marginal entry", line);
    }
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ParseError(ErrorCode::kParse,
                     std::string(what) + " does not sum to 1", line);
  }
  return Marginal::FromWeights(
      Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(size)));
}

void AppendNumber(std::string& out, double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, ptr);
}

}  // namespace

std::string_view NormKindName(NormKind kind) {
  switch (kind) {
    case NormKind::kL1:
      return "l1";
    case NormKind::kL2:
      return "l2";
    case NormKind::kLinf:
      return "linf";
    case NormKind::kExplicit:
      return "explicit";
  }
  return "explicit";
}

NormKind ParseNormKind(std::string_view name) {
  if (name == "l1") return NormKind::kL1;
  if (name == "l2") return NormKind::kL2;
  if (name == "linf") return NormKind::kLinf;
  if (name == "explicit") return NormKind::kExplicit;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown cost kind '" + std::string(name) + "'");
}

std::string_view ImageClassName(ImageClass cls) {
  switch (cls) {
    case ImageClass::kWhiteNoise:
      return "whitenoise";
    case ImageClass::kShapes:
      return "shapes";
    case ImageClass::kCauchyLike:
      return "cauchy_like";
  }
  return "whitenoise";
}

ImageClass ParseImageClass(std::string_view name) {
  if (name == "whitenoise") return ImageClass::kWhiteNoise;
  if (name == "shapes") return ImageClass::kShapes;
  if (name == "cauchy_like") return ImageClass::kCauchyLike;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown image class '" + std::string(name) + "'");
}

void GridImage::Validate() const {
  if (resolution < 1) {
    throw Error(ErrorCode::kInvalidArgument, "image resolution must be >= 1");
  }
  if (pixels.size() != static_cast<std::size_t>(resolution) * resolution) {
    throw Error(ErrorCode::kDimensionMismatch,
                "image has " + std::to_string(pixels.size()) +
                    " pixels, expected resolution^2");
  }
  bool any_positive = false;
  for (double px : pixels) {
    if (!std::isfinite(px) || px < 0.0) {
      throw Error(ErrorCode::kNegativeEntry,
                  "image pixels must be finite and non-negative");
    }
    any_positive = any_positive || px > 0.0;
  }
  if (!any_positive) throw Error(ErrorCode::kDegenerate, "degenerate image");
}

Marginal Marginal::FromWeights(Vector weights) {
  if (weights.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "empty marginal");
  }
  for (double w : weights) {
    if (!std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite marginal entry");
    }
    if (w < 0.0) throw Error(ErrorCode::kNegativeEntry, "negative marginal entry");
  }
  const double total = PairwiseSum(AsSpan(weights));
  if (!(total > 0.0)) throw Error(ErrorCode::kDegenerate, "zero marginal");
  // Weights that already sum to one up to rounding are kept bit for bit, so
  // that writing and re-reading an instance is exact.
  if (std::abs(total - 1.0) > 1e-14) weights /= total;
  return Marginal(std::move(weights));
}

OTProblem::OTProblem(CostMatrix cost, Marginal row_marginal,
                     Marginal col_marginal)
    : cost_(std::move(cost)),
      row_marginal_(std::move(row_marginal)),
      col_marginal_(std::move(col_marginal)) {
  if (cost_.entries.rows() != row_marginal_.size() ||
      cost_.entries.cols() != col_marginal_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "cost is " + std::to_string(cost_.entries.rows()) + "x" +
                    std::to_string(cost_.entries.cols()) +
                    " but marginals have lengths " +
                    std::to_string(row_marginal_.size()) + " and " +
                    std::to_string(col_marginal_.size()));
  }
  for (double c : cost_.entries.reshaped()) {
    if (!std::isfinite(c) || c < 0.0) {
      throw Error(ErrorCode::kNegativeEntry,
                  "cost entries must be finite and non-negative");
    }
  }
}

Marginal MarginalFromImage(const GridImage& image) {
  image.Validate();
  Vector weights = Eigen::Map<const Vector>(
      image.pixels.data(), static_cast<Eigen::Index>(image.pixels.size()));
  return Marginal::FromWeights(std::move(weights));
}

CostMatrix GridCost(int resolution, NormKind kind, bool max_normalize) {
  if (resolution < 1) {
    throw Error(ErrorCode::kInvalidArgument, "grid resolution must be >= 1");
  }
  if (kind == NormKind::kExplicit) {
    throw Error(ErrorCode::kInvalidArgument,
                "grid cost needs one of l1, l2, linf");
  }
  const Eigen::Index cells = static_cast<Eigen::Index>(resolution) * resolution;
  CostMatrix cost{Matrix(cells, cells), kind};
  for (Eigen::Index a = 0; a < cells; ++a) {
    const double row_a = static_cast<double>(a / resolution);
    const double col_a = static_cast<double>(a % resolution);
    for (Eigen::Index b = 0; b < cells; ++b) {
      const double dr = std::abs(row_a - static_cast<double>(b / resolution));
      const double dc = std::abs(col_a - static_cast<double>(b % resolution));
      double value = 0.0;
      switch (kind) {
        case NormKind::kL1:
          value = dr + dc;
          break;
        case NormKind::kL2:
          value = std::sqrt(dr * dr + dc * dc);
          break;
        case NormKind::kLinf:
          value = std::max(dr, dc);
          break;
        case NormKind::kExplicit:
          break;
      }
      cost.entries(a, b) = value;
    }
  }
  if (max_normalize) {
    const double max_entry = cost.entries.maxCoeff();
    if (max_entry > 0.0) cost.entries /= max_entry;
    cost.kind = NormKind::kExplicit;
  }
  return cost;
}

std::pair<GridImage, GridImage> SynthInstance(ImageClass cls, int resolution,
                                              std::uint64_t seed) {
  if (resolution < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "synthetic instances need resolution >= 2");
  }
  std::mt19937_64 rng(seed);
  auto make = [&]() {
    switch (cls) {
      case ImageClass::kWhiteNoise:
        return WhiteNoise(resolution, rng);
      case ImageClass::kShapes:
        return Shapes(resolution, rng);
      case ImageClass::kCauchyLike:
        return CauchyLike(resolution, rng);
    }
    return WhiteNoise(resolution, rng);
  };
  GridImage first = make();
  GridImage second = make();
  return {std::move(first), std::move(second)};
}

OTProblem ProblemFromImages(const GridImage& source, const GridImage& target,
                            NormKind kind, bool max_normalize) {
  if (source.resolution != target.resolution) {
    throw Error(ErrorCode::kDimensionMismatch,
                "source and target images differ in resolution");
  }
  return OTProblem(GridCost(source.resolution, kind, max_normalize),
                   MarginalFromImage(source), MarginalFromImage(target));
}

OTProblem ReadInstance(std::istream& in) {
  LineReader reader(in);
  std::string line;

  if (!reader.Next(line)) {
    throw ParseError(ErrorCode::kParse, "empty instance file");
  }
  auto tokens = Tokenize(line);
  if (tokens.size() != 2) {
    throw ParseError(ErrorCode::kParse, "expected 'm n'", reader.line_number());
  }
  const long m = ParseNumber<long>(tokens[0], reader.line_number());
  const long n = ParseNumber<long>(tokens[1], reader.line_number());
  if (m < 1 || n < 1) {
    throw ParseError(ErrorCode::kDimensionMismatch, "m and n must be positive",
                     reader.line_number());
  }

  if (!reader.Next(line)) {
    throw ParseError(ErrorCode::kParse, "missing cost line", reader.line_number());
  }
  tokens = Tokenize(line);
  if (tokens.size() != 2 || tokens[0] != "cost") {
    throw ParseError(ErrorCode::kParse, "expected 'cost <kind>'",
                     reader.line_number());
  }
  NormKind kind;
  try {
    kind = ParseNormKind(tokens[1]);
  } catch (const Error& e) {
    throw ParseError(ErrorCode::kParse, e.what(), reader.line_number());
  }

  CostMatrix cost;
  if (kind == NormKind::kExplicit) {
    cost.entries.resize(m, n);
    for (long i = 0; i < m; ++i) {
      const auto row = ParseRow(reader, static_cast<std::size_t>(n), "cost row");
      for (long j = 0; j < n; ++j) {
        if (row[j] < 0.0) {
          throw ParseError(ErrorCode::kNegativeEntry, "negative cost entry",
                           reader.line_number());
        }
        cost.entries(i, j) = row[j];
      }
    }
  } else {
    const long r = std::lround(std::sqrt(static_cast<double>(m)));
    if (m != n || r * r != m) {
      throw ParseError(ErrorCode::kDimensionMismatch,
                       "grid cost needs m == n == r^2", reader.line_number());
    }
    cost = GridCost(static_cast<int>(r), kind);
  }

  Marginal f = ParseMarginal(reader, static_cast<std::size_t>(m), "row marginal");
  Marginal g = ParseMarginal(reader, static_cast<std::size_t>(n), "column marginal");
  if (reader.Next(line)) {
    throw ParseError(ErrorCode::kParse, "trailing content after marginals",
                     reader.line_number());
  }
  return OTProblem(std::move(cost), std::move(f), std::move(g));
}

OTProblem LoadInstance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(ErrorCode::kParse, "cannot open " + path.string());
  }
  return ReadInstance(in);
}

void WriteInstance(const OTProblem& problem, std::ostream& out) {
  std::string text;
  text += std::to_string(problem.rows()) + " " + std::to_string(problem.cols()) +
          "\ncost " + std::string(NormKindName(problem.cost_kind())) + "\n";
  auto append_row = [&text](auto&& values) {
    bool first = true;
    for (double v : values) {
      if (!first) text += ' ';
      AppendNumber(text, v);
      first = false;
    }
    text += '\n';
  };
  if (problem.cost_kind() == NormKind::kExplicit) {
    for (Eigen::Index i = 0; i < problem.rows(); ++i) {
      append_row(problem.cost().row(i));
    }
  }
  append_row(problem.f());
  append_row(problem.g());
  out << text;
}

void SaveInstance(const OTProblem& problem, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::kInvalidArgument, "cannot write " + path.string());
  }
  WriteInstance(problem, out);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "write failed: " + path.string());
}

}  // namespace otsolve
