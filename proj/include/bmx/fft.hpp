// bmx/fft.hpp

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

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "bmx/errors.hpp"

namespace bmx {

using cdouble = std::complex<double>;

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Iterative radix-2 Cooley-Tukey, unnormalized. sign = -1 forward, +1 inverse
// (inverse here is unscaled; callers divide by n when they need the true
// inverse transform).
inline void fft_pow2(std::vector<cdouble>& a, int sign) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * M_PI / static_cast<double>(len);
    const cdouble wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cdouble w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cdouble u = a[i + k];
        const cdouble v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

}  // namespace detail

// Unnormalized DFT of arbitrary length: X[k] = sum_n x[n] e^{-2*pi*i*k*n/N}.
// Power-of-two sizes go through radix-2; everything else through Bluestein's
// chirp-z reduction (needed for the 40-chirp Doppler axis).
inline void fft_inplace(std::vector<cdouble>& a) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  if (detail::is_pow2(n)) {
    detail::fft_pow2(a, -1);
    return;
  }
  // Bluestein: x[k] * w[k] convolved with conj(w), w[k] = e^{-i*pi*k^2/n}
  const std::size_t m = detail::next_pow2(2 * n - 1);
  std::vector<cdouble> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the twiddle argument small
    const std::size_t k2 = (k * k) % (2 * n);
    const double ang = -M_PI * static_cast<double>(k2) / static_cast<double>(n);
    w[k] = cdouble(std::cos(ang), std::sin(ang));
  }
  std::vector<cdouble> fa(m, cdouble(0.0, 0.0)), fb(m, cdouble(0.0, 0.0));
  for (std::size_t k = 0; k < n; ++k) fa[k] = a[k] * w[k];
  fb[0] = std::conj(w[0]);
  for (std::size_t k = 1; k < n; ++k) {
    fb[k] = std::conj(w[k]);
    fb[m - k] = std::conj(w[k]);
  }
  detail::fft_pow2(fa, -1);
  detail::fft_pow2(fb, -1);
  for (std::size_t k = 0; k < m; ++k) fa[k] *= fb[k];
  detail::fft_pow2(fa, +1);
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = fa[k] * inv_m * w[k];
}

inline std::vector<cdouble> fft(std::vector<cdouble> a) {
  fft_inplace(a);
  return a;
}

// Rotate so that frequency 0 sits at index n/2 (matching the centered
// Doppler axis convention used throughout the pipeline).
template <typename T>
inline std::vector<T> fftshift(const std::vector<T>& a) {
  const std::size_t n = a.size();
  const std::size_t half = n / 2;
  std::vector<T> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a[(i + n - half) % n];
  return out;
}

// Index of velocity/frequency zero on a shifted axis of length n.
inline std::size_t fftshift_center(std::size_t n) { return n / 2; }

}  // namespace bmx
