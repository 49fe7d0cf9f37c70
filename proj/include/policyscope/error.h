// Copyright 2026 The PolicyScope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POLICYSCOPE_ERROR_H_
#define POLICYSCOPE_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace policyscope {

// Base of every error thrown by the library. The CLI maps these to exit
// code 2 ("data error"); UsageError maps to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Structural problem with an input file (missing columns, wrong top-level
// shape). Parsing cannot continue.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// Fatal data problem (invalid UTF-8, non-finite values, inconsistent
// shapes between artifacts).
class DataError : public Error {
 public:
  using Error::Error;
};

// A loaded artifact violates a registry invariant (codebook, config).
class ValidationError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

// A non-fatal, per-record parse failure. Parsers collect these and keep
// going.
struct RowError {
  std::size_t line = 0;  // 1-based physical line in the input
  std::string message;
};

template <typename T>
struct ParseResult {
  std::vector<T> rows;
  std::vector<RowError> errors;
};

}  // namespace policyscope

#endif  // POLICYSCOPE_ERROR_H_
