#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "coggen/complex_grid.hpp"
#include "coggen/errors.hpp"

namespace coggen {

// Which 1D transform backs the 2D DFT. radix2 requires power-of-two extents;
// direct is the O(n^2) summation and works for any size; automatic picks
// radix2 when possible.
enum class fft_path { automatic, radix2, direct };

namespace detail {

inline bool is_pow2(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

// Plain O(n^2) summation on a contiguous line: out[k] = sum_j in[j] e^{+-2pi i jk/n}.
inline void dft1d_direct(const cdouble* in, cdouble* out, std::size_t n, bool inverse) {
  const double sign = inverse ? 1.0 : -1.0;
  const double two_pi = 2.0 * 3.14159265358979323846;
  for (std::size_t k = 0; k < n; ++k) {
    cdouble acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double phase = sign * two_pi * static_cast<double>(k) * static_cast<double>(j) /
                           static_cast<double>(n);
      acc += in[j] * cdouble(std::cos(phase), std::sin(phase));
    }
    out[k] = acc;
  }
}

// In-place iterative radix-2 Cooley-Tukey on a strided line. Twiddles are
// recomputed per butterfly group from the angle; n is a power of two.
inline void fft1d_radix2(cdouble* a, std::size_t n, std::ptrdiff_t stride, bool inverse) {
  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j)
      std::swap(a[static_cast<std::ptrdiff_t>(i) * stride], a[static_cast<std::ptrdiff_t>(j) * stride]);
  }
  const double sign = inverse ? 1.0 : -1.0;
  const double two_pi = 2.0 * 3.14159265358979323846;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = sign * two_pi / static_cast<double>(len);
    const cdouble wlen(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      cdouble w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        cdouble& lo = a[static_cast<std::ptrdiff_t>(i + j) * stride];
        cdouble& hi = a[static_cast<std::ptrdiff_t>(i + j + len / 2) * stride];
        const cdouble t = hi * w;
        hi = lo - t;
        lo = lo + t;
        w *= wlen;
      }
    }
  }
}

inline complex_grid dft2d(const complex_grid& grid, bool inverse, fft_path path) {
  require(grid.all_finite(), errc::non_finite, "fft2/ifft2: input contains NaN or Inf");
  const std::size_t h = grid.height, w = grid.width;
  bool radix = false;
  switch (path) {
    case fft_path::automatic:
      radix = is_pow2(h) && is_pow2(w);
      break;
    case fft_path::radix2:
      require(is_pow2(h) && is_pow2(w), errc::non_power_of_two,
              "fft2/ifft2: radix-2 path requires power-of-two extents");
      radix = true;
      break;
    case fft_path::direct:
      radix = false;
      break;
  }

  complex_grid out = grid;
  if (radix) {
    for (std::size_t r = 0; r < h; ++r) fft1d_radix2(&out.data[r * w], w, 1, inverse);
    for (std::size_t c = 0; c < w; ++c)
      fft1d_radix2(&out.data[c], h, static_cast<std::ptrdiff_t>(w), inverse);
  } else {
    std::vector<cdouble> in_line(std::max(h, w)), out_line(std::max(h, w));
    for (std::size_t r = 0; r < h; ++r) {
      dft1d_direct(&out.data[r * w], out_line.data(), w, inverse);
      for (std::size_t c = 0; c < w; ++c) out.data[r * w + c] = out_line[c];
    }
    for (std::size_t c = 0; c < w; ++c) {
      for (std::size_t r = 0; r < h; ++r) in_line[r] = out.data[r * w + c];
      dft1d_direct(in_line.data(), out_line.data(), h, inverse);
      for (std::size_t r = 0; r < h; ++r) out.data[r * w + c] = out_line[r];
    }
  }
  // Unitary normalization: 1/sqrt(N) in both directions, so the transform is
  // its own adjoint-inverse and ||F g|| = ||g||.
  const double scale = 1.0 / std::sqrt(static_cast<double>(h) * static_cast<double>(w));
  for (cdouble& z : out.data) z *= scale;
  return out;
}

}  // namespace detail

inline complex_grid fft2(const complex_grid& grid, fft_path path = fft_path::automatic) {
  return detail::dft2d(grid, false, path);
}

inline complex_grid ifft2(const complex_grid& grid, fft_path path = fft_path::automatic) {
  return detail::dft2d(grid, true, path);
}

}  // namespace coggen
