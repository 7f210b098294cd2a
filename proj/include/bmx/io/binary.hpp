// bmx/io/binary.hpp
//
// Little-endian binary writer/reader with a CRC-32 trailer. Every BMX file
// format (BMXD datasets, BMXF raw captures, BMXC checkpoints) goes through
// these helpers so integrity checking is uniform.

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

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "bmx/crc32.hpp"
#include "bmx/errors.hpp"

namespace bmx::io {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

class Writer {
 public:
  void bytes(const void* data, std::size_t len) {
    const auto* p = static_cast<const char*>(data);
    buf_.insert(buf_.end(), p, p + len);
  }
  void u32(std::uint32_t v) { bytes(&v, sizeof v); }
  void i32(std::int32_t v) { bytes(&v, sizeof v); }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void f32(float v) { bytes(&v, sizeof v); }
  void f64(double v) { bytes(&v, sizeof v); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

  /// Appends the CRC trailer and writes the file atomically (tmp + rename).
  void save(const std::filesystem::path& path) {
    const std::uint32_t crc = Crc32::of(buf_.data(), buf_.size());
    u32(crc);
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      require(out.good(), ErrorCategory::kIoError,
              "cannot open for writing: " + tmp.string());
      out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
      require(out.good(), ErrorCategory::kIoError,
              "write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    require(!ec, ErrorCategory::kIoError, "rename failed: " + path.string());
  }

  const std::vector<char>& buffer() const { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCategory::kIoError,
            "cannot open: " + path.string());
    buf_.assign(std::istreambuf_iterator<char>(in),
                std::istreambuf_iterator<char>());
    require(buf_.size() >= 4, ErrorCategory::kBadFormat,
            "file too short: " + path.string());
    std::uint32_t stored;
    std::memcpy(&stored, buf_.data() + buf_.size() - 4, 4);
    const std::uint32_t actual = Crc32::of(buf_.data(), buf_.size() - 4);
    require(stored == actual, ErrorCategory::kBadFormat,
            "checksum mismatch: " + path.string());
    end_ = buf_.size() - 4;
  }

  void bytes(void* out, std::size_t len) {
    require(pos_ + len <= end_, ErrorCategory::kBadFormat,
            "truncated record");
    std::memcpy(out, buf_.data() + pos_, len);
    pos_ += len;
  }
  std::uint32_t u32() { std::uint32_t v; bytes(&v, sizeof v); return v; }
  std::int32_t i32() { std::int32_t v; bytes(&v, sizeof v); return v; }
  std::uint64_t u64() { std::uint64_t v; bytes(&v, sizeof v); return v; }
  float f32() { float v; bytes(&v, sizeof v); return v; }
  double f64() { double v; bytes(&v, sizeof v); return v; }
  std::string str() {
    const std::uint32_t n = u32();
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }

  void expect_magic(const char magic[4], const std::string& what) {
    char got[4];
    bytes(got, 4);
    require(std::memcmp(got, magic, 4) == 0, ErrorCategory::kBadFormat,
            "bad magic for " + what);
  }

  bool at_end() const { return pos_ == end_; }

 private:
  std::vector<char> buf_;
  std::size_t pos_ = 0;
  std::size_t end_ = 0;
};

}  // namespace bmx::io
