#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "coggen/errors.hpp"
#include "coggen/forward_model.hpp"
#include "coggen/sampling_mask.hpp"

namespace coggen {

enum class growth_mode : std::uint8_t { additive = 0, geometric = 1 };

inline const char* to_string(growth_mode m) {
  return m == growth_mode::additive ? "ADDITIVE" : "GEOMETRIC";
}

// Stage state of the curriculum: thresholds, their per-stage updates, the
// mode weights, and the iteration schedule.
struct curriculum_state {
  std::size_t stage = 1;  // 1-based, in [1, k1]
  double lambda = 0.0;    // student residual threshold
  double r = 0.0;         // teacher radius threshold
  double w1 = 0.9;
  double w2 = 0.9;
  growth_mode lambda_mode = growth_mode::geometric;
  double lambda_step = 2.0;  // additive increment, or geometric growth factor
  growth_mode r_mode = growth_mode::geometric;
  double r_step = 2.0;
  std::size_t k1 = 1;
  std::vector<std::size_t> k2;  // per-stage inner iteration budgets, length k1
  double max_distance = 0.0;    // of the mask; drives the final-stage clamp
};

// Per-sample weights: student and teacher components kept separately along
// with their product v.
struct weight_vector {
  std::vector<double> s;
  std::vector<double> t;
  std::vector<double> v;
};

// Residuals normalized per sample: |pred_i - y_i| / max(|y_i|, floor), with
// the floor at 1e-8 of the largest measurement so zero-valued bins do not
// divide by zero (they classify as hard instead).
inline std::vector<double> normalized_residuals(const measurement_set& pred,
                                                const measurement_set& y) {
  require(pred.values.size() == y.values.size(), errc::shape_mismatch,
          "normalized_residuals: sample counts differ");
  double ymax = 0.0;
  for (const cdouble& z : y.values) ymax = std::max(ymax, std::abs(z));
  require(ymax > 0.0, errc::all_zero_measurements,
          "normalized_residuals: all measurements are zero");
  const double floor = 1e-8 * ymax;
  std::vector<double> out(y.values.size());
  for (std::size_t i = 0; i < y.values.size(); ++i)
    out[i] = std::abs(pred.values[i] - y.values[i]) / std::max(std::abs(y.values[i]), floor);
  return out;
}

namespace detail {

inline void check_mode_weight(double w, const char* name) {
  require(w > 0.5 && w <= 1.0, errc::bad_weight,
          std::string(name) + " must lie in (0.5, 1]");
}

}  // namespace detail

// Student mode: samples the model already fits well (residual under lambda)
// get w1, the rest 1 - w1. Ties take the hard branch.
inline std::vector<double> student_weights(const std::vector<double>& residuals, double lambda,
                                           double w1) {
  detail::check_mode_weight(w1, "student_weights: w1");
  std::vector<double> s(residuals.size());
  for (std::size_t i = 0; i < residuals.size(); ++i)
    s[i] = residuals[i] < lambda ? w1 : 1.0 - w1;
  return s;
}

// Teacher mode: central k-space (distance under r) gets w2, the periphery
// 1 - w2. Ties take the peripheral branch.
inline std::vector<double> teacher_weights(const radial_distance_map& distances, double r,
                                           double w2) {
  detail::check_mode_weight(w2, "teacher_weights: w2");
  std::vector<double> t(distances.distances.size());
  for (std::size_t i = 0; i < t.size(); ++i)
    t[i] = distances.distances[i] < r ? w2 : 1.0 - w2;
  return t;
}

inline weight_vector combine_weights(std::vector<double> s, std::vector<double> t) {
  require(s.size() == t.size(), errc::length_mismatch,
          "combine_weights: student/teacher lengths differ");
  weight_vector w;
  w.v.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) w.v[i] = s[i] * t[i];
  w.s = std::move(s);
  w.t = std::move(t);
  return w;
}

namespace detail {

// At the final stage the teacher must admit every acquired sample; since the
// comparison is strict (d < r), the clamp pushes r just past max_distance.
inline void clamp_final_stage(curriculum_state& st) {
  if (st.stage == st.k1) st.r = std::max(st.r, 1.05 * st.max_distance);
}

}  // namespace detail

// One outer-loop transition of Algorithm-1 style staging.
inline curriculum_state advance_stage(const curriculum_state& state) {
  require(state.stage < state.k1, errc::final_stage,
          "advance_stage: already at the final stage");
  curriculum_state next = state;
  next.stage += 1;
  next.lambda = state.lambda_mode == growth_mode::additive ? state.lambda + state.lambda_step
                                                           : state.lambda * state.lambda_step;
  next.r = state.r_mode == growth_mode::additive ? state.r + state.r_step
                                                 : state.r * state.r_step;
  detail::clamp_final_stage(next);
  return next;
}

// Nearest-rank percentile (p in [0, 100]) of a copy of the data.
inline double percentile(std::vector<double> data, double p) {
  require(!data.empty(), errc::bad_inputs, "percentile: empty data");
  std::sort(data.begin(), data.end());
  const double pos = (p / 100.0) * static_cast<double>(data.size() - 1);
  const std::size_t idx = static_cast<std::size_t>(std::floor(pos));
  return data[std::min(idx, data.size() - 1)];
}

// Knobs for building a curriculum. Non-positive thresholds/steps mean
// "derive from the data": lambda starts at the 20th percentile of the
// iteration-0 residuals, r at 15% of the mask's maximal radius, and the
// steps are solved so the final stage reaches 2x the largest initial
// residual and 1.05x the maximal radius.
struct curriculum_config {
  std::size_t k1 = 5;
  std::vector<std::size_t> k2{250, 250, 500, 500, 2500};
  double w1 = 0.9;
  double w2 = 0.9;
  growth_mode lambda_mode = growth_mode::geometric;
  growth_mode r_mode = growth_mode::geometric;
  double lambda0 = 0.0;      // <= 0: adaptive
  double r0 = 0.0;           // <= 0: adaptive
  double lambda_step = 0.0;  // <= 0: solved
  double r_step = 0.0;       // <= 0: solved
};

namespace detail {

// Either rubber-stamps the user-provided step (validating monotonicity) or
// solves for one that reaches `target` from `start` over k1-1 advances.
inline double resolve_step(double given, growth_mode mode, double start, double target,
                           std::size_t k1, const char* name) {
  if (given > 0.0) {
    require(mode == growth_mode::additive || given > 1.0, errc::bad_config,
            std::string(name) + ": geometric growth factor must exceed 1");
    return given;
  }
  if (k1 <= 1) return mode == growth_mode::additive ? 1.0 : 2.0;
  const double stages = static_cast<double>(k1 - 1);
  target = std::max(target, start);
  if (mode == growth_mode::additive)
    return std::max((target - start) / stages, 1e-12 * std::max(1.0, std::abs(start)));
  return std::max(1.0 + 1e-9, std::pow(target / start, 1.0 / stages));
}

}  // namespace detail

inline curriculum_state make_curriculum(const std::vector<double>& residuals0,
                                        double max_distance, const curriculum_config& cfg) {
  require(cfg.k1 >= 1, errc::bad_config, "curriculum: K1 must be >= 1");
  require(cfg.k2.size() == cfg.k1, errc::bad_config,
          "curriculum: K2 must list one budget per stage");
  for (std::size_t b : cfg.k2)
    require(b >= 1, errc::bad_config, "curriculum: K2 entries must be >= 1");
  detail::check_mode_weight(cfg.w1, "curriculum: w1");
  detail::check_mode_weight(cfg.w2, "curriculum: w2");
  require(max_distance >= 0.0, errc::bad_inputs, "curriculum: negative max_distance");

  curriculum_state st;
  st.stage = 1;
  st.w1 = cfg.w1;
  st.w2 = cfg.w2;
  st.k1 = cfg.k1;
  st.k2 = cfg.k2;
  st.max_distance = max_distance;
  st.lambda_mode = cfg.lambda_mode;
  st.r_mode = cfg.r_mode;

  double res_max = 0.0;
  for (double r : residuals0) res_max = std::max(res_max, r);
  st.lambda = cfg.lambda0;
  if (st.lambda <= 0.0) st.lambda = residuals0.empty() ? 1.0 : percentile(residuals0, 20.0);
  if (st.lambda <= 0.0) st.lambda = std::max(1e-8, 1e-3 * res_max);
  st.r = cfg.r0;
  if (st.r <= 0.0) st.r = 0.15 * max_distance;
  if (st.r <= 0.0) st.r = 1.0;

  st.lambda_step =
      detail::resolve_step(cfg.lambda_step, cfg.lambda_mode, st.lambda,
                           std::max(2.0 * res_max, 2.0 * st.lambda), cfg.k1, "curriculum lambda");
  st.r_step = detail::resolve_step(cfg.r_step, cfg.r_mode, st.r, 1.05 * max_distance, cfg.k1,
                                   "curriculum r");
  detail::clamp_final_stage(st);
  return st;
}

// All-defaults convenience used by tests.
inline curriculum_state make_default_curriculum(const std::vector<double>& residuals0,
                                                double max_distance, double w1, double w2,
                                                std::size_t k1, std::vector<std::size_t> k2) {
  curriculum_config cfg;
  cfg.k1 = k1;
  cfg.k2 = std::move(k2);
  cfg.w1 = w1;
  cfg.w2 = w2;
  return make_curriculum(residuals0, max_distance, cfg);
}

}  // namespace coggen
