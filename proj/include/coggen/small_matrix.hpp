#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "coggen/complex_grid.hpp"
#include "coggen/errors.hpp"

namespace coggen {

// Dense row-major complex matrix for the forward-operator analysis and the
// noise-bound simulations. Real inputs are stored with zero imaginary
// parts. Sized for desk-scale spectral work, not large linear algebra.
struct small_matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<cdouble> entries;

  small_matrix() = default;
  small_matrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r * c) {
    require(r > 0 && c > 0, errc::bad_dims, "small_matrix: dimensions must be positive");
    require(r * c <= 1000000, errc::bad_dims, "small_matrix: exceeds 10^6 entry guard");
  }

  static small_matrix identity(std::size_t n) {
    small_matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }

  static small_matrix diagonal(const std::vector<double>& d) {
    small_matrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m.at(i, i) = d[i];
    return m;
  }

  cdouble& at(std::size_t r, std::size_t c) { return entries[r * cols + c]; }
  const cdouble& at(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }

  bool all_finite() const {
    for (const cdouble& z : entries)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    return true;
  }

  small_matrix adjoint() const {
    small_matrix out(cols, rows);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) out.at(c, r) = std::conj(at(r, c));
    return out;
  }
};

inline small_matrix matmul(const small_matrix& a, const small_matrix& b) {
  require(a.cols == b.rows, errc::dim_mismatch, "matmul: inner dimensions disagree");
  small_matrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      const cdouble aik = a.at(i, k);
      if (aik == cdouble(0.0, 0.0)) continue;
      for (std::size_t j = 0; j < b.cols; ++j) out.at(i, j) += aik * b.at(k, j);
    }
  return out;
}

inline std::vector<cdouble> matvec(const small_matrix& a, const std::vector<cdouble>& x) {
  require(a.cols == x.size(), errc::dim_mismatch, "matvec: size disagrees");
  std::vector<cdouble> out(a.rows, cdouble(0.0, 0.0));
  for (std::size_t i = 0; i < a.rows; ++i) {
    cdouble acc = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) acc += a.at(i, j) * x[j];
    out[i] = acc;
  }
  return out;
}

inline double frobenius_norm(const small_matrix& m) {
  double acc = 0.0;
  for (const cdouble& z : m.entries) acc += std::norm(z);
  return std::sqrt(acc);
}

inline double vec_norm(const std::vector<cdouble>& v) {
  double acc = 0.0;
  for (const cdouble& z : v) acc += std::norm(z);
  return std::sqrt(acc);
}

inline std::vector<cdouble> vec_sub(const std::vector<cdouble>& a, const std::vector<cdouble>& b) {
  std::vector<cdouble> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

}  // namespace coggen
