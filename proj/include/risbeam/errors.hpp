// SPDX-License-Identifier: Apache-2.0
//
// risbeam - lookup-table constrained beam pattern synthesis for reflective RISs
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace risbeam {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point coincides with an element, the phase center or a spherical origin.
class DegeneratePointError : public Error {
 public:
  using Error::Error;
};

/// Nonpositive sizes, out-of-range parameters, mismatched dimensions.
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// Lookup table construction or parsing failure. `line()` is 0 when the
/// failure is not tied to a line of an input file.
class TableError : public Error {
 public:
  TableError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Numerical failure inside the optimizer (zero denominators, zero target).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace risbeam
