// Copyright 2026 The Streamfit Authors
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

#ifndef STREAMFIT_ERRORS_H_
#define STREAMFIT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace streamfit {

// Base class for every error raised by the library. The CLI maps the
// subclasses onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument for a mathematical operation (incomplete matrix, unknown
// point, non-representable value).
class DomainError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Missing or duplicated pairs in a stream.
class StreamIntegrityError : public Error {
 public:
  using Error::Error;
};

// Operation invoked in the wrong phase (e.g. ingest after finalize).
class PhaseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Invalid combination of command-line options.
class UsageError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// A bounded resource (sketch instances) ran out.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// A caller broke an API contract (e.g. reused a sketch instance).
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace streamfit

#endif  // STREAMFIT_ERRORS_H_
