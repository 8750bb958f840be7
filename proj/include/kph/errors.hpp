// Copyright 2026 The KPH Authors.
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

#ifndef KPH_ERRORS_HPP_
#define KPH_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <utility>

namespace kph {

// Malformed or inconsistent input data: bad files, out-of-range scores,
// mismatched universes. Maps to CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A structure that violates its own definition (cyclic hierarchy, duplicate
// cluster membership, cyclic input to transitive reduction).
class StructuralError : public DataError {
 public:
  using DataError::DataError;
};

// Parse failure with location. `record` is 1-based; 0 means "whole file".
class ParseError : public DataError {
 public:
  ParseError(std::string file, std::size_t record, std::string field,
             const std::string& what)
      : DataError(Format(file, record, field, what)),
        file_(std::move(file)),
        record_(record),
        field_(std::move(field)) {}

  const std::string& file() const { return file_; }
  std::size_t record() const { return record_; }
  const std::string& field() const { return field_; }

 private:
  static std::string Format(const std::string& file, std::size_t record,
                            const std::string& field,
                            const std::string& what) {
    std::string out = file;
    if (record > 0) out += ":" + std::to_string(record);
    if (!field.empty()) out += ": field '" + field + "'";
    out += ": " + what;
    return out;
  }

  std::string file_;
  std::size_t record_;
  std::string field_;
};

// An internal invariant did not hold (a builder produced an invalid
// hierarchy, ...). Maps to CLI exit code 3.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace kph

#endif  // KPH_ERRORS_HPP_
