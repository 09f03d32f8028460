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

#include "otsolve/linalg.h"

#include <cassert>

namespace otsolve {
namespace {

constexpr std::size_t kPairwiseBlock = 128;

template <typename Term>
double Cascade(std::size_t begin, std::size_t end, const Term& term) {
  if (end - begin <= kPairwiseBlock) {
    double acc = 0.0;
    for (std::size_t i = begin; i < end; ++i) acc += term(i);
    return acc;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return Cascade(begin, mid, term) + Cascade(mid, end, term);
}

}  // namespace

double PairwiseSum(std::span<const double> values) {
  return Cascade(0, values.size(), [&](std::size_t i) { return values[i]; });
}

double PairwiseDot(std::span<const double> a, std::span<const double> b) {
  assert(a.size() == b.size());
  return Cascade(0, a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

double PairwiseSquaredNorm(std::span<const double> values) {
  return Cascade(0, values.size(),
                 [&](std::size_t i) { return values[i] * values[i]; });
}

}  // namespace otsolve
