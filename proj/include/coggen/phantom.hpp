#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "coggen/complex_grid.hpp"
#include "coggen/errors.hpp"
#include "coggen/rng.hpp"

namespace coggen {

enum class phantom_kind : std::uint8_t { shepp_logan = 0, ellipse_suite = 1, checker_smooth = 2 };
enum class phase_mode : std::uint8_t { zero = 0, smooth_random = 1 };

inline const char* to_string(phantom_kind k) {
  switch (k) {
    case phantom_kind::shepp_logan: return "SHEPP_LOGAN";
    case phantom_kind::ellipse_suite: return "ELLIPSE_SUITE";
    case phantom_kind::checker_smooth: return "CHECKER_SMOOTH";
  }
  return "?";
}

inline const char* to_string(phase_mode m) {
  return m == phase_mode::zero ? "ZERO" : "SMOOTH_RANDOM";
}

struct phantom_spec {
  phantom_kind kind = phantom_kind::shepp_logan;
  std::size_t height = 64;
  std::size_t width = 64;
  phase_mode phase = phase_mode::zero;
  std::uint64_t seed = 0;
};

namespace detail {

struct ellipse {
  double intensity, a, b, x0, y0, phi_deg;
};

// The modified (high-contrast) Shepp-Logan ellipse table.
inline const std::array<ellipse, 10>& shepp_logan_ellipses() {
  static const std::array<ellipse, 10> table = {{
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},
      {-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0},
      {-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0},
      {-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0},
      {0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0},
      {0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0},
      {0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0},
      {0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0},
      {0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0},
      {0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0},
  }};
  return table;
}

inline double ellipse_sum(const ellipse* ellipses, std::size_t count, double x, double y) {
  double acc = 0.0;
  for (std::size_t e = 0; e < count; ++e) {
    const ellipse& el = ellipses[e];
    const double phi = el.phi_deg * 3.14159265358979323846 / 180.0;
    const double dx = x - el.x0, dy = y - el.y0;
    const double xr = std::cos(phi) * dx + std::sin(phi) * dy;
    const double yr = -std::sin(phi) * dx + std::cos(phi) * dy;
    if ((xr / el.a) * (xr / el.a) + (yr / el.b) * (yr / el.b) <= 1.0) acc += el.intensity;
  }
  return acc;
}

// Pixel-center coordinates in [-1, 1]^2, y pointing up (row 0 is the top).
inline double pixel_x(std::size_t c, std::size_t w) {
  return (2.0 * static_cast<double>(c) + 1.0 - static_cast<double>(w)) / static_cast<double>(w);
}
inline double pixel_y(std::size_t r, std::size_t h) {
  return (static_cast<double>(h) - 2.0 * static_cast<double>(r) - 1.0) / static_cast<double>(h);
}

}  // namespace detail

// Renders the requested magnitude image, normalized so the largest magnitude
// is 1, then (optionally) applies a smooth random phase surface
// exp(i * poly2(x, y)) with coefficients from the seed.
inline complex_grid gen_phantom(const phantom_spec& spec) {
  require(spec.height >= 1 && spec.width >= 1, errc::bad_dims, "gen_phantom: empty grid");
  require(spec.height * spec.width <= 100'000'000u, errc::bad_dims, "gen_phantom: grid too large");

  complex_grid img(spec.height, spec.width);
  const counter_rng rng(spec.seed, counter_rng::phantom_stream);

  if (spec.kind == phantom_kind::shepp_logan) {
    // Signed overlaps can cancel to -1e-17; the magnitude contract is [0, 1].
    const auto& table = detail::shepp_logan_ellipses();
    for (std::size_t r = 0; r < spec.height; ++r)
      for (std::size_t c = 0; c < spec.width; ++c)
        img.at(r, c) = std::max(0.0, detail::ellipse_sum(table.data(), table.size(),
                                                         detail::pixel_x(c, spec.width),
                                                         detail::pixel_y(r, spec.height)));
  } else if (spec.kind == phantom_kind::ellipse_suite) {
    // Seeded random ellipse cocktail: positive intensities, so magnitudes
    // stay non-negative.
    constexpr std::size_t n_ellipses = 6;
    std::array<detail::ellipse, n_ellipses> table;
    std::uint64_t ctr = 0;
    for (detail::ellipse& el : table) {
      el.intensity = 0.2 + 0.8 * rng.uniform(ctr++);
      el.a = 0.1 + 0.3 * rng.uniform(ctr++);
      el.b = 0.1 + 0.3 * rng.uniform(ctr++);
      el.x0 = -0.6 + 1.2 * rng.uniform(ctr++);
      el.y0 = -0.6 + 1.2 * rng.uniform(ctr++);
      el.phi_deg = 180.0 * rng.uniform(ctr++);
    }
    for (std::size_t r = 0; r < spec.height; ++r)
      for (std::size_t c = 0; c < spec.width; ++c)
        img.at(r, c) = detail::ellipse_sum(table.data(), table.size(),
                                           detail::pixel_x(c, spec.width),
                                           detail::pixel_y(r, spec.height));
  } else {
    // Smooth checkerboard: product of sines lifted to [0, 1].
    for (std::size_t r = 0; r < spec.height; ++r)
      for (std::size_t c = 0; c < spec.width; ++c) {
        const double x = detail::pixel_x(c, spec.width), y = detail::pixel_y(r, spec.height);
        const double pi = 3.14159265358979323846;
        img.at(r, c) = 0.5 * (1.0 + std::sin(4.0 * pi * x) * std::sin(4.0 * pi * y));
      }
  }

  double peak = 0.0;
  for (const cdouble& z : img.data) peak = std::max(peak, std::abs(z));
  if (peak > 0.0)
    for (cdouble& z : img.data) z /= peak;

  if (spec.phase == phase_mode::smooth_random) {
    // Degree-2 polynomial phase, coefficients uniform in [-pi/2, pi/2];
    // counters start past the magnitude stage's draws.
    std::array<double, 6> coef;
    for (std::size_t i = 0; i < coef.size(); ++i)
      coef[i] = 3.14159265358979323846 * (rng.uniform(1000 + i) - 0.5);
    for (std::size_t r = 0; r < spec.height; ++r)
      for (std::size_t c = 0; c < spec.width; ++c) {
        const double x = detail::pixel_x(c, spec.width), y = detail::pixel_y(r, spec.height);
        const double phi =
            coef[0] + coef[1] * x + coef[2] * y + coef[3] * x * x + coef[4] * x * y + coef[5] * y * y;
        img.at(r, c) *= cdouble(std::cos(phi), std::sin(phi));
      }
  }
  return img;
}

}  // namespace coggen
