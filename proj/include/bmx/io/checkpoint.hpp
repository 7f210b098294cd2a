// bmx/io/checkpoint.hpp
//
// BMXC model checkpoint: versioned binary with shape-tagged parameter
// blocks. Layout (little-endian, CRC-32 trailer):
//
//   magic "BMXC" | u32 version=1
//   str config_json (u32 length + bytes)
//   u32 block_count
//   per block: str name | u32 rows | u32 cols | f64 * rows*cols (col-major)
//   u32 crc32

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

#include <filesystem>

#include "bmx/io/binary.hpp"
#include "bmx/io/config_json.hpp"
#include "bmx/neural/model.hpp"

namespace bmx::io {

inline constexpr char kCheckpointMagic[4] = {'B', 'M', 'X', 'C'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

inline void write_checkpoint(const neural::ModelParams& params,
                             const std::filesystem::path& path) {
  Writer w;
  w.bytes(kCheckpointMagic, 4);
  w.u32(kCheckpointVersion);
  w.str(model_config_to_json(params.cfg).dump());
  std::uint32_t count = 0;
  neural::visit_params(params, [&](const std::string&,
                                   const neural::Matrix&) { ++count; });
  w.u32(count);
  neural::visit_params(params, [&](const std::string& name,
                                   const neural::Matrix& m) {
    w.str(name);
    w.u32(static_cast<std::uint32_t>(m.rows()));
    w.u32(static_cast<std::uint32_t>(m.cols()));
    w.bytes(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
  });
  w.save(path);
}

inline neural::ModelParams read_checkpoint(const std::filesystem::path& path) {
  Reader r(path);
  r.expect_magic(kCheckpointMagic, "checkpoint");
  require(r.u32() == kCheckpointVersion, ErrorCategory::kBadFormat,
          "unsupported checkpoint version");
  const auto cfg = model_config_from_json(nlohmann::json::parse(r.str()));
  neural::ModelParams params = neural::init_params(cfg, 0);
  const std::uint32_t count = r.u32();
  std::uint32_t seen = 0;
  neural::visit_params(params, [&](const std::string& name,
                                   neural::Matrix& m) {
    require(seen < count, ErrorCategory::kBadFormat,
            "checkpoint is missing parameter blocks");
    const std::string stored = r.str();
    require(stored == name, ErrorCategory::kBadFormat,
            "checkpoint block order mismatch: expected " + name + ", found " +
                stored);
    const std::uint32_t rows = r.u32();
    const std::uint32_t cols = r.u32();
    require(rows == static_cast<std::uint32_t>(m.rows()) &&
                cols == static_cast<std::uint32_t>(m.cols()),
            ErrorCategory::kBadFormat, "checkpoint shape mismatch in " + name);
    r.bytes(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
    ++seen;
  });
  require(seen == count, ErrorCategory::kBadFormat,
          "checkpoint has extra parameter blocks");
  require(r.at_end(), ErrorCategory::kBadFormat,
          "trailing bytes in checkpoint file");
  return params;
}

}  // namespace bmx::io
