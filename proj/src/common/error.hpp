// Copyright 2026 The AIA Authors
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
#pragma once

#include <stdexcept>
#include <string>

namespace aia {

// Every failure raised by the core library carries one of these codes. The C
// API maps them one-to-one onto aia_status values.
enum class ErrorCode {
  kInvalidArgument = 1,
  kNotFound,
  kRateLimited,
  kSchema,
  kIo,
  kDegenerateInput,
  kDomain,
  kConfig,
  kInsufficientMatches,
  kNoPositives,
  kAttributeArity,
  kMissingPair,
  kSchemaMismatch,
  kSlotNotFound,
  kEmptyInput,
  kOutOfRange,
  kLengthMismatch,
  kInternal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Raised on HTTP 429 once retries are exhausted.
class RateLimitedError : public Error {
 public:
  RateLimitedError(const std::string& message, double retry_after_s)
      : Error(ErrorCode::kRateLimited, message), retry_after_s_(retry_after_s) {}

  double retry_after_s() const { return retry_after_s_; }

 private:
  double retry_after_s_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace aia
