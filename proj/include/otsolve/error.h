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

#ifndef OTSOLVE_ERROR_H_
#define OTSOLVE_ERROR_H_

#include <stdexcept>
#include <string>

namespace otsolve {

enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kDimensionMismatch,
  kNegativeEntry,
  kDegenerate,
  kSizeGuard,
  kNumericalFailure,
};

// All library failures are reported as exceptions carrying a code, so callers
// can branch on the category without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the instance reader. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, const std::string& message, int line = 0)
      : Error(code, line > 0 ? "line " + std::to_string(line) + ": " + message
                             : message),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace otsolve

#endif  // OTSOLVE_ERROR_H_
