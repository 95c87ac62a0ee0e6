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
#include "common/error.hpp"

namespace aia {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kRateLimited: return "RateLimited";
    case ErrorCode::kSchema: return "SchemaError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kDomain: return "DomainError";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kInsufficientMatches: return "InsufficientMatches";
    case ErrorCode::kNoPositives: return "NoPositives";
    case ErrorCode::kAttributeArity: return "AttributeArity";
    case ErrorCode::kMissingPair: return "MissingPair";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kSlotNotFound: return "SlotNotFound";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kInternal: return "InternalError";
  }
  return "Unknown";
}

}  // namespace aia
