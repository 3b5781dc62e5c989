#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "coggen/errors.hpp"
#include "coggen/rng.hpp"

namespace coggen {

enum class mask_pattern : std::uint8_t { vd2d = 0, vd1d_pe = 1, full = 2 };

inline const char* to_string(mask_pattern p) {
  switch (p) {
    case mask_pattern::vd2d: return "VD2D";
    case mask_pattern::vd1d_pe: return "VD1D_PE";
    case mask_pattern::full: return "FULL";
  }
  return "?";
}

// Binary k-space acquisition pattern. The grid is stored in fftshifted
// layout: DC sits at (H/2, W/2), so "close to the center" is literal on the
// stored array. Sample ordering everywhere in the library is the row-major
// scan of selected positions.
struct sampling_mask {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> selected;  // row-major, 1 = acquired
  mask_pattern pattern = mask_pattern::full;
  double acceleration_factor = 1.0;
  double center_fraction = 0.0;
  std::uint64_t seed = 0;

  bool is_selected(std::size_t r, std::size_t c) const { return selected[r * width + c] != 0; }

  std::size_t count() const {
    return static_cast<std::size_t>(std::count(selected.begin(), selected.end(), std::uint8_t{1}));
  }
};

// Linear (row-major) indices of the acquired positions, in sample order.
inline std::vector<std::size_t> selected_linear_indices(const sampling_mask& m) {
  std::vector<std::size_t> idx;
  idx.reserve(m.selected.size());
  for (std::size_t i = 0; i < m.selected.size(); ++i)
    if (m.selected[i]) idx.push_back(i);
  return idx;
}

// Per-sample distance to the fftshifted DC position, aligned with the
// measurement ordering.
struct radial_distance_map {
  std::vector<double> distances;
  double max_distance = 0.0;
};

inline double center_distance(std::size_t r, std::size_t c, std::size_t h, std::size_t w) {
  const double dr = static_cast<double>(r) - static_cast<double>(h / 2);
  const double dc = static_cast<double>(c) - static_cast<double>(w / 2);
  return std::sqrt(dr * dr + dc * dc);
}

inline radial_distance_map radial_distances(const sampling_mask& m) {
  radial_distance_map out;
  out.distances.reserve(m.count());
  for (std::size_t r = 0; r < m.height; ++r)
    for (std::size_t c = 0; c < m.width; ++c)
      if (m.is_selected(r, c)) {
        const double d = center_distance(r, c, m.height, m.width);
        out.distances.push_back(d);
        out.max_distance = std::max(out.max_distance, d);
      }
  return out;
}

namespace detail {

// Pick the integer sample count whose achieved acceleration N/count is
// closest to the request, and insist it lands within the +-5% contract.
inline std::size_t af_budget(std::size_t n, double af) {
  require(af >= 1.0, errc::budget_infeasible, "gen_vd_mask: acceleration_factor must be >= 1");
  const double want = static_cast<double>(n) / af;
  std::size_t best = 0;
  double best_err = 1e300;
  for (double cand : {std::floor(want), std::ceil(want)}) {
    if (cand < 1.0 || cand > static_cast<double>(n)) continue;
    const double achieved = static_cast<double>(n) / cand;
    const double err = std::abs(achieved - af) / af;
    if (err < best_err) {
      best_err = err;
      best = static_cast<std::size_t>(cand);
    }
  }
  require(best >= 1 && best_err <= 0.05, errc::budget_infeasible,
          "gen_vd_mask: no sample count achieves the acceleration factor within 5%");
  return best;
}

// Forced fully-sampled center: the round(cf*n)-th smallest distance defines
// the center radius, and every position at or under it is taken (ties
// included, so the "lowest-|e| region fully selected" invariant is literal).
inline std::vector<std::uint8_t> force_center(const std::vector<double>& dist, double cf) {
  const std::size_t n = dist.size();
  std::vector<std::uint8_t> forced(n, 0);
  const std::size_t kc = static_cast<std::size_t>(std::llround(cf * static_cast<double>(n)));
  if (kc == 0) return forced;
  std::vector<double> sorted = dist;
  std::nth_element(sorted.begin(), sorted.begin() + (std::min(kc, n) - 1), sorted.end());
  const double radius = sorted[std::min(kc, n) - 1];
  for (std::size_t i = 0; i < n; ++i)
    if (dist[i] <= radius) forced[i] = 1;
  return forced;
}

// Gaussian scale s such that sum_i exp(-d_i^2 / (2 s^2)) over the candidate
// set hits the remaining budget; monotone in s, so plain bisection.
inline double bisect_gaussian_scale(const std::vector<double>& dist,
                                    const std::vector<std::uint8_t>& candidate, double target) {
  double maxd = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i)
    if (candidate[i]) maxd = std::max(maxd, dist[i]);
  if (maxd == 0.0) return 1.0;
  const auto mass = [&](double s) {
    double sum = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i)
      if (candidate[i]) sum += std::exp(-(dist[i] * dist[i]) / (2.0 * s * s));
    return sum;
  };
  double lo = 1e-6 * maxd, hi = 1e6 * maxd;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = std::sqrt(lo * hi);
    (mass(mid) < target ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

// Exact-count weighted sampling without replacement (Efraimidis–Spirakis
// keys log(u)/w, largest k win). Guarantees the sample budget exactly while
// keeping inclusion odds proportional-to-weight.
inline void weighted_top_k(const std::vector<double>& weight, const std::vector<std::size_t>& pool,
                           std::size_t k, const counter_rng& rng,
                           std::vector<std::uint8_t>& out) {
  struct keyed {
    double key;
    std::size_t idx;
  };
  std::vector<keyed> keys;
  keys.reserve(pool.size());
  for (std::size_t j = 0; j < pool.size(); ++j) {
    const std::size_t i = pool[j];
    const double u = rng.uniform_pos(i);
    keys.push_back({std::log(u) / std::max(weight[i], 1e-300), i});
  }
  std::sort(keys.begin(), keys.end(), [](const keyed& a, const keyed& b) {
    if (a.key != b.key) return a.key > b.key;
    return a.idx < b.idx;
  });
  for (std::size_t j = 0; j < k && j < keys.size(); ++j) out[keys[j].idx] = 1;
}

}  // namespace detail

// Variable-density undersampling mask. Deterministic in (dims, pattern, AF,
// cf, seed); the sample count is hit exactly, so the achieved acceleration
// invariant is a hard guarantee rather than an expectation.
inline sampling_mask gen_vd_mask(std::size_t height, std::size_t width, mask_pattern pattern,
                                 double acceleration_factor, double center_fraction,
                                 std::uint64_t seed) {
  require(height >= 1 && width >= 1, errc::bad_dims, "gen_vd_mask: empty grid");
  require(height * width <= 100'000'000u, errc::bad_dims, "gen_vd_mask: grid too large");
  require(center_fraction >= 0.0 && center_fraction <= 1.0, errc::budget_infeasible,
          "gen_vd_mask: center_fraction must lie in [0, 1]");

  sampling_mask m;
  m.height = height;
  m.width = width;
  m.pattern = pattern;
  m.center_fraction = center_fraction;
  m.seed = seed;
  m.selected.assign(height * width, 0);

  if (pattern == mask_pattern::full || acceleration_factor == 1.0) {
    // FULL pattern, or an AF=1 request on a VD pattern: everything acquired.
    std::fill(m.selected.begin(), m.selected.end(), std::uint8_t{1});
    m.acceleration_factor = 1.0;
    return m;
  }
  m.acceleration_factor = acceleration_factor;

  const counter_rng rng(seed, counter_rng::mask_stream);

  if (pattern == mask_pattern::vd1d_pe) {
    // Column-level problem: distances are column offsets from the center
    // column; chosen columns are acquired in full.
    std::vector<double> dist(width);
    for (std::size_t c = 0; c < width; ++c)
      dist[c] = std::abs(static_cast<double>(c) - static_cast<double>(width / 2));
    const std::size_t k = detail::af_budget(width, acceleration_factor);
    std::vector<std::uint8_t> cols = detail::force_center(dist, center_fraction);
    const std::size_t forced =
        static_cast<std::size_t>(std::count(cols.begin(), cols.end(), std::uint8_t{1}));
    require(forced <= k, errc::budget_infeasible,
            "gen_vd_mask: center fraction exceeds the column budget (cf > 1/AF)");
    const std::size_t krem = k - forced;
    std::vector<std::size_t> pool;
    for (std::size_t c = 0; c < width; ++c)
      if (!cols[c]) pool.push_back(c);
    if (krem >= pool.size()) {
      for (std::size_t c : pool) cols[c] = 1;
    } else if (krem > 0) {
      const double s = detail::bisect_gaussian_scale(dist, [&] {
        std::vector<std::uint8_t> cand(width, 0);
        for (std::size_t c : pool) cand[c] = 1;
        return cand;
      }(), static_cast<double>(krem));
      std::vector<double> w(width, 0.0);
      for (std::size_t c : pool) w[c] = std::exp(-(dist[c] * dist[c]) / (2.0 * s * s));
      detail::weighted_top_k(w, pool, krem, rng, cols);
    }
    for (std::size_t c = 0; c < width; ++c)
      if (cols[c])
        for (std::size_t r = 0; r < height; ++r) m.selected[r * width + c] = 1;
    return m;
  }

  // VD2D: radial Gaussian density over the full grid.
  const std::size_t n = height * width;
  std::vector<double> dist(n);
  for (std::size_t r = 0; r < height; ++r)
    for (std::size_t c = 0; c < width; ++c)
      dist[r * width + c] = center_distance(r, c, height, width);
  const std::size_t k = detail::af_budget(n, acceleration_factor);
  std::vector<std::uint8_t> pick = detail::force_center(dist, center_fraction);
  const std::size_t forced =
      static_cast<std::size_t>(std::count(pick.begin(), pick.end(), std::uint8_t{1}));
  require(forced <= k, errc::budget_infeasible,
          "gen_vd_mask: center fraction exceeds the sample budget (cf > 1/AF)");
  const std::size_t krem = k - forced;
  std::vector<std::size_t> pool;
  pool.reserve(n - forced);
  for (std::size_t i = 0; i < n; ++i)
    if (!pick[i]) pool.push_back(i);
  if (krem >= pool.size()) {
    for (std::size_t i : pool) pick[i] = 1;
  } else if (krem > 0) {
    std::vector<std::uint8_t> cand(n, 0);
    for (std::size_t i : pool) cand[i] = 1;
    const double s = detail::bisect_gaussian_scale(dist, cand, static_cast<double>(krem));
    std::vector<double> w(n, 0.0);
    for (std::size_t i : pool) w[i] = std::exp(-(dist[i] * dist[i]) / (2.0 * s * s));
    detail::weighted_top_k(w, pool, krem, rng, pick);
  }
  m.selected = std::move(pick);
  return m;
}

}  // namespace coggen
