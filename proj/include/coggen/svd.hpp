#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "coggen/errors.hpp"
#include "coggen/small_matrix.hpp"

namespace coggen {

// A = U diag(sigma) V^H with singular values sorted descending and U, V
// column-orthonormal. One-sided Jacobi on the columns; accurate and simple
// at the <=512 scale this library works at.
struct svd_result {
  small_matrix u;
  std::vector<double> sigma;
  small_matrix v;
};

namespace detail {

// One-sided Jacobi on a tall matrix (rows >= cols): rotate column pairs of G
// until all pairs are numerically orthogonal, accumulating the rotations
// into V. Then sigma_j = ||g_j|| and u_j = g_j / sigma_j.
inline svd_result jacobi_svd_tall(small_matrix g) {
  const std::size_t m = g.rows, n = g.cols;
  small_matrix v = small_matrix::identity(n);

  const int max_sweeps = 64;
  const double tol = 1e-15;
  bool converged = false;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    converged = true;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        double app = 0.0, aqq = 0.0;
        cdouble apq = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const cdouble gp = g.at(i, p), gq = g.at(i, q);
          app += std::norm(gp);
          aqq += std::norm(gq);
          apq += std::conj(gp) * gq;
        }
        const double off = std::abs(apq);
        if (off <= tol * std::sqrt(app * aqq) || off == 0.0) continue;
        converged = false;

        // Diagonalize the 2x2 Gram block [[app, apq], [conj(apq), aqq]].
        const cdouble phase = apq / off;
        const double tau = (aqq - app) / (2.0 * off);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double cs = 1.0 / std::sqrt(1.0 + t * t);
        const double sn = cs * t;

        for (std::size_t i = 0; i < m; ++i) {
          const cdouble gp = g.at(i, p), gq = g.at(i, q);
          g.at(i, p) = cs * gp - sn * std::conj(phase) * gq;
          g.at(i, q) = sn * phase * gp + cs * gq;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const cdouble vp = v.at(i, p), vq = v.at(i, q);
          v.at(i, p) = cs * vp - sn * std::conj(phase) * vq;
          v.at(i, q) = sn * phase * vp + cs * vq;
        }
      }
    }
  }
  require(converged, errc::no_convergence, "svd_small: Jacobi sweep cap exceeded");

  std::vector<double> sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += std::norm(g.at(i, j));
    sigma[j] = std::sqrt(s);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

  svd_result out;
  out.u = small_matrix(m, n);
  out.v = small_matrix(n, n);
  out.sigma.resize(n);
  const double scale = *std::max_element(sigma.begin(), sigma.end());
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    out.sigma[j] = sigma[src];
    for (std::size_t i = 0; i < n; ++i) out.v.at(i, j) = v.at(i, src);
    if (sigma[src] > scale * 1e-300 && sigma[src] > 0.0) {
      for (std::size_t i = 0; i < m; ++i) out.u.at(i, j) = g.at(i, src) / sigma[src];
    }
  }
  // Null columns of G leave holes in U; fill them with unit vectors
  // orthogonalized against the columns already placed.
  for (std::size_t j = 0; j < n; ++j) {
    if (out.sigma[j] > 0.0) continue;
    for (std::size_t basis = 0; basis < m; ++basis) {
      std::vector<cdouble> cand(m, 0.0);
      cand[basis] = 1.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k == j || (out.sigma[k] == 0.0 && k > j)) continue;
        cdouble proj = 0.0;
        for (std::size_t i = 0; i < m; ++i) proj += std::conj(out.u.at(i, k)) * cand[i];
        for (std::size_t i = 0; i < m; ++i) cand[i] -= proj * out.u.at(i, k);
      }
      const double nrm = vec_norm(cand);
      if (nrm > 0.5) {
        for (std::size_t i = 0; i < m; ++i) out.u.at(i, j) = cand[i] / nrm;
        break;
      }
    }
  }
  return out;
}

}  // namespace detail

inline svd_result svd_small(const small_matrix& m) {
  require(m.rows <= 512 && m.cols <= 512, errc::bad_dims, "svd_small: extents must be <= 512");
  require(m.all_finite(), errc::non_finite, "svd_small: input contains NaN or Inf");
  if (m.rows >= m.cols) return detail::jacobi_svd_tall(m);
  // Wide case: decompose the adjoint and swap the factors.
  svd_result t = detail::jacobi_svd_tall(m.adjoint());
  svd_result out;
  out.u = std::move(t.v);
  out.v = std::move(t.u);
  out.sigma = std::move(t.sigma);
  return out;
}

// Largest singular value via the SVD; used where only the operator norm of a
// small dense matrix is needed.
inline double spectral_norm(const small_matrix& m) {
  svd_result s = svd_small(m);
  return s.sigma.empty() ? 0.0 : s.sigma.front();
}

}  // namespace coggen
