#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "coggen/complex_grid.hpp"
#include "coggen/errors.hpp"

namespace coggen {

// Region-of-interest mask for the evaluation metrics.
struct roi_mask {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> inside;  // row-major, 1 = counted

  std::size_t count() const {
    return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), std::uint8_t{1}));
  }
};

// Default ROI: everything that is not background, i.e. pixels whose ground
// truth magnitude exceeds 5% of the peak.
inline roi_mask default_roi(const complex_grid& ground_truth) {
  roi_mask roi;
  roi.height = ground_truth.height;
  roi.width = ground_truth.width;
  roi.inside.assign(ground_truth.size(), 0);
  double peak = 0.0;
  for (const cdouble& z : ground_truth.data) peak = std::max(peak, std::abs(z));
  for (std::size_t i = 0; i < ground_truth.size(); ++i)
    if (std::abs(ground_truth.data[i]) > 0.05 * peak) roi.inside[i] = 1;
  if (roi.count() == 0) std::fill(roi.inside.begin(), roi.inside.end(), std::uint8_t{1});
  return roi;
}

inline roi_mask full_roi(std::size_t height, std::size_t width) {
  roi_mask roi;
  roi.height = height;
  roi.width = width;
  roi.inside.assign(height * width, 1);
  return roi;
}

namespace detail {

inline void check_metric_inputs(const complex_grid& x, const complex_grid& xhat,
                                const roi_mask& roi) {
  require(x.same_shape(xhat), errc::shape_mismatch, "metrics: image shapes differ");
  require(roi.height == x.height && roi.width == x.width, errc::shape_mismatch,
          "metrics: ROI shape differs from images");
  require(roi.count() >= 1, errc::bad_inputs, "metrics: ROI is empty");
}

}  // namespace detail

// Relative l2-norm error over the ROI, on complex values (phase errors
// count).
inline double rlne_roi(const complex_grid& x, const complex_grid& xhat, const roi_mask& roi) {
  detail::check_metric_inputs(x, xhat, roi);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!roi.inside[i]) continue;
    num += std::norm(x.data[i] - xhat.data[i]);
    den += std::norm(x.data[i]);
  }
  require(den > 0.0, errc::zero_reference, "rlne_roi: reference is zero on the ROI");
  return std::sqrt(num) / std::sqrt(den);
}

// PSNR over the ROI in dB: 20 log10(peak / RMSE) with the peak and the RMSE
// both restricted to the ROI. A zero-error reconstruction returns the 300 dB
// cap instead of infinity.
inline constexpr double psnr_cap_db = 300.0;

inline double psnr_roi(const complex_grid& x, const complex_grid& xhat, const roi_mask& roi) {
  detail::check_metric_inputs(x, xhat, roi);
  double peak = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!roi.inside[i]) continue;
    peak = std::max(peak, std::abs(x.data[i]));
    sq += std::norm(x.data[i] - xhat.data[i]);
    ++n;
  }
  require(peak > 0.0, errc::zero_reference, "psnr_roi: reference is zero on the ROI");
  const double rmse = std::sqrt(sq / static_cast<double>(n));
  if (rmse == 0.0) return psnr_cap_db;
  return std::min(psnr_cap_db, 20.0 * std::log10(peak / rmse));
}

}  // namespace coggen
