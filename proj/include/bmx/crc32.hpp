// bmx/crc32.hpp

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

#include <array>
#include <cstddef>
#include <cstdint>

namespace bmx {

// CRC-32 (IEEE 802.3, reflected, poly 0xEDB88320). Used as the integrity
// trailer of every binary file format.
class Crc32 {
 public:
  Crc32() = default;

  void update(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint32_t c = state_;
    for (std::size_t i = 0; i < len; ++i) {
      c = table()[(c ^ p[i]) & 0xffu] ^ (c >> 8);
    }
    state_ = c;
  }

  std::uint32_t value() const { return state_ ^ 0xffffffffu; }

  static std::uint32_t of(const void* data, std::size_t len) {
    Crc32 crc;
    crc.update(data, len);
    return crc.value();
  }

 private:
  static const std::array<std::uint32_t, 256>& table() {
    static const std::array<std::uint32_t, 256> t = [] {
      std::array<std::uint32_t, 256> tab{};
      for (std::uint32_t n = 0; n < 256; ++n) {
        std::uint32_t c = n;
        for (int k = 0; k < 8; ++k) {
          c = (c & 1u) ? 0xedb88320u ^ (c >> 1) : c >> 1;
        }
        tab[n] = c;
      }
      return tab;
    }();
    return t;
  }

  std::uint32_t state_ = 0xffffffffu;
};

}  // namespace bmx
