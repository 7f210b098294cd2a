// bmx/errors.hpp

// Copyright 2026 The BMX Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace bmx {

/// Machine-readable error categories. The CLI maps these to exit codes and
/// emits the category string on stderr so callers can dispatch on it.
enum class ErrorCategory {
  kInvalidConfig,    // bad waveform/array/model configuration
  kInvalidArgument,  // bad operation argument (shape mismatch, out of domain)
  kIoError,          // file system failure
  kBadFormat,        // malformed binary/JSON input
  kInternal,
};

inline const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::kInvalidConfig: return "invalid_config";
    case ErrorCategory::kInvalidArgument: return "invalid_argument";
    case ErrorCategory::kIoError: return "io_error";
    case ErrorCategory::kBadFormat: return "bad_format";
    case ErrorCategory::kInternal: return "internal";
  }
  return "internal";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

inline void require(bool condition, ErrorCategory category,
                    const std::string& message) {
  if (!condition) throw Error(category, message);
}

}  // namespace bmx
