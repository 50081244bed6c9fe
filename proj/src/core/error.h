// Copyright 2026 The Franson Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FRANSON_CORE_ERROR_H
#define FRANSON_CORE_ERROR_H

#include <stdexcept>
#include <string>

namespace franson {

enum class ErrorCode {
    DomainError = 1,     // argument outside its mathematical domain
    InvalidModel = 2,    // region model fails its structural invariants
    ParseError = 3,      // malformed file or config text
    IoError = 4,         // filesystem failure
    Convergence = 5,     // quadrature or search failed to reach tolerance
    InvalidConfig = 6,   // experiment config fails validation
    DataError = 7,       // input data violates a precondition (unsorted, missing, ...)
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string &message) : std::runtime_error(message), code_(code) {
    }
    ErrorCode code() const {
        return code_;
    }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string &message) {
    throw Error(code, message);
}

}  // namespace franson

#endif
