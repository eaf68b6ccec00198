/* Copyright 2026 The VISOR Toolkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#ifndef VISOR_ERROR_H_
#define VISOR_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace visor {

// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input violates a documented precondition (duplicate names, bad ranges...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A metric whose denominator is empty, e.g. conditional VISOR with no image
// containing both objects, or a correlation over constant data.
class UndefinedValueError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A malformed record in a line-delimited input. Carries the 1-based line
// number and the offending field (empty when the line itself is unreadable).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string field, const std::string& message)
      : Error("line " + std::to_string(line) +
              (field.empty() ? std::string() : ", field '" + field + "'") +
              ": " + message),
        line_(line),
        field_(std::move(field)) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

}  // namespace visor

#endif  // VISOR_ERROR_H_
