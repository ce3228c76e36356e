// Copyright 2026 The adaptrag Authors.
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

#ifndef ADAPTRAG_ERRORS_H_
#define ADAPTRAG_ERRORS_H_

#include <stdexcept>
#include <string>

namespace adaptrag {

// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller violated an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Malformed input file; carries the 1-based line number of the bad record.
class InputError : public Error {
 public:
  InputError(const std::string& source, int line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

// An executor could not produce usable output.
class ExecutorError : public Error {
 public:
  using Error::Error;
};

}  // namespace adaptrag

#endif  // ADAPTRAG_ERRORS_H_
