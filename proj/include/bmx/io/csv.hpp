// bmx/io/csv.hpp

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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "bmx/errors.hpp"

namespace bmx::io {

/// Fixed-precision float formatting so reruns produce byte-identical CSVs.
inline std::string format_double(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

class CsvWriter {
 public:
  void row(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) line += ',';
      line += cells[i];
    }
    line += '\n';
    content_ += line;
  }

  const std::string& content() const { return content_; }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    require(out.good(), ErrorCategory::kIoError,
            "cannot open for writing: " + path.string());
    out << content_;
    require(out.good(), ErrorCategory::kIoError,
            "write failed: " + path.string());
  }

 private:
  std::string content_;
};

}  // namespace bmx::io
