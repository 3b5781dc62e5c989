#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "coggen/errors.hpp"

namespace coggen {

using cdouble = std::complex<double>;

// Dense row-major H x W grid of complex samples. Used both for images and
// for k-space grids.
struct complex_grid {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<cdouble> data;

  complex_grid() = default;
  complex_grid(std::size_t h, std::size_t w) : height(h), width(w), data(h * w) {
    require(h > 0 && w > 0, errc::bad_dims, "complex_grid: dimensions must be positive");
  }

  std::size_t size() const { return data.size(); }
  cdouble& at(std::size_t row, std::size_t col) { return data[row * width + col]; }
  const cdouble& at(std::size_t row, std::size_t col) const { return data[row * width + col]; }

  bool same_shape(const complex_grid& other) const {
    return height == other.height && width == other.width;
  }

  bool all_finite() const {
    for (const cdouble& z : data)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }
};

inline double norm2(const complex_grid& g) {
  double acc = 0.0;
  for (const cdouble& z : g.data) acc += std::norm(z);
  return std::sqrt(acc);
}

// <a, b> = sum conj(a_i) * b_i
inline cdouble inner(const complex_grid& a, const complex_grid& b) {
  cdouble acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) acc += std::conj(a.data[i]) * b.data[i];
  return acc;
}

inline double max_abs_diff(const complex_grid& a, const complex_grid& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

}  // namespace coggen
