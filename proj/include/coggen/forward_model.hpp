#pragma once

#include <cstdint>
#include <vector>

#include "coggen/complex_grid.hpp"
#include "coggen/errors.hpp"
#include "coggen/fft.hpp"
#include "coggen/rng.hpp"
#include "coggen/sampling_mask.hpp"

namespace coggen {

// Acquired k-space samples y, ordered by the row-major scan of the mask's
// selected positions.
struct measurement_set {
  sampling_mask mask;
  std::vector<cdouble> values;
  double noise_sigma = 0.0;
};

namespace detail {

// Mask positions live on the fftshifted grid (DC at (H/2, W/2)); the FFT
// works in plain layout (DC at (0, 0)). This maps a shifted position to the
// plain bin it refers to.
inline std::size_t plain_index(std::size_t r, std::size_t c, std::size_t h, std::size_t w) {
  const std::size_t pr = (r + h - h / 2) % h;
  const std::size_t pc = (c + w - w / 2) % w;
  return pr * w + pc;
}

}  // namespace detail

// y = M . F x : unitary 2D DFT followed by sampling at the mask's selected
// positions.
inline measurement_set apply_forward(const sampling_mask& mask, const complex_grid& x) {
  require(mask.height == x.height && mask.width == x.width, errc::shape_mismatch,
          "apply_forward: mask and image shapes differ");
  const complex_grid k = fft2(x);
  measurement_set out;
  out.mask = mask;
  out.values.reserve(mask.count());
  for (std::size_t r = 0; r < mask.height; ++r)
    for (std::size_t c = 0; c < mask.width; ++c)
      if (mask.is_selected(r, c))
        out.values.push_back(k.data[detail::plain_index(r, c, mask.height, mask.width)]);
  return out;
}

// A^H y : scatter the samples back onto a zero k-space grid, then inverse
// transform. Exact adjoint of apply_forward under the unitary convention.
inline complex_grid apply_adjoint(const sampling_mask& mask, const measurement_set& y) {
  require(mask.height == y.mask.height && mask.width == y.mask.width, errc::shape_mismatch,
          "apply_adjoint: mask and measurement shapes differ");
  require(y.values.size() == mask.count(), errc::shape_mismatch,
          "apply_adjoint: measurement count does not match the mask");
  complex_grid k(mask.height, mask.width);
  std::size_t i = 0;
  for (std::size_t r = 0; r < mask.height; ++r)
    for (std::size_t c = 0; c < mask.width; ++c)
      if (mask.is_selected(r, c))
        k.data[detail::plain_index(r, c, mask.height, mask.width)] = y.values[i++];
  return ifft2(k);
}

// Convenience overload for raw sample vectors aligned with the mask order.
inline complex_grid apply_adjoint(const sampling_mask& mask, const std::vector<cdouble>& values) {
  measurement_set y;
  y.mask = mask;
  y.values = values;
  return apply_adjoint(mask, y);
}

// Adds independent complex white Gaussian noise: standard deviation sigma
// per real and per imaginary component of every acquired sample.
inline measurement_set add_awgn(const measurement_set& y, double sigma, std::uint64_t seed) {
  require(sigma >= 0.0, errc::bad_inputs, "add_awgn: sigma must be >= 0");
  measurement_set out = y;
  out.noise_sigma = sigma;
  if (sigma == 0.0) return out;
  const counter_rng rng(seed, counter_rng::noise_stream);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    double zr, zi;
    rng.gaussian_pair(i, zr, zi);
    out.values[i] += cdouble(sigma * zr, sigma * zi);
  }
  return out;
}

}  // namespace coggen
