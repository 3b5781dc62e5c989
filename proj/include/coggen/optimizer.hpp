#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "coggen/complex_grid.hpp"
#include "coggen/errors.hpp"
#include "coggen/forward_model.hpp"
#include "coggen/inr.hpp"
#include "coggen/metrics.hpp"
#include "coggen/sampling_mask.hpp"
#include "coggen/spcl.hpp"

namespace coggen {

enum class optimizer_kind : std::uint8_t { adam = 0, gd = 1 };

inline const char* to_string(optimizer_kind k) {
  return k == optimizer_kind::adam ? "ADAM" : "GD";
}

// Which weight components participate; the off switch replaces the component
// with ones, so UNIFORM degenerates to vanilla fitting exactly.
enum class weighting_mode : std::uint8_t { dual = 0, student_only = 1, teacher_only = 2, uniform = 3 };

inline const char* to_string(weighting_mode m) {
  switch (m) {
    case weighting_mode::dual: return "DUAL";
    case weighting_mode::student_only: return "STUDENT_ONLY";
    case weighting_mode::teacher_only: return "TEACHER_ONLY";
    case weighting_mode::uniform: return "UNIFORM";
  }
  return "?";
}

// First/second Adam moments; empty until the first step.
struct optimizer_state {
  std::vector<double> m;
  std::vector<double> v;
  std::size_t step = 0;
};

// One parameter update in place. GD: theta -= lr * grad. Adam: the standard
// bias-corrected moment update.
inline void optimizer_step(std::vector<double>& params, const std::vector<double>& grad,
                           optimizer_state& state, optimizer_kind kind, double lr,
                           double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8) {
  require(params.size() == grad.size(), errc::shape_mismatch,
          "optimizer_step: parameter/gradient lengths differ");
  for (double g : grad)
    require(std::isfinite(g), errc::non_finite, "optimizer_step: gradient is not finite");

  if (kind == optimizer_kind::gd) {
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
    return;
  }
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
    state.step = 0;
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grad[i];
    state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grad[i] * grad[i];
    const double mhat = state.m[i] / bc1;
    const double vhat = state.v[i] / bc2;
    params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

struct run_config {
  inr_config inr;
  curriculum_config curriculum;
  optimizer_kind optimizer = optimizer_kind::adam;
  double learning_rate = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  std::size_t log_every = 50;
  bool vanilla_mode = false;
  weighting_mode weighting = weighting_mode::dual;
};

struct curve_point {
  std::size_t iteration = 0;
  std::size_t stage = 0;
  double loss = 0.0;
  double rlne_roi = std::numeric_limits<double>::quiet_NaN();
  double psnr_db = std::numeric_limits<double>::quiet_NaN();
};

struct recon_result {
  complex_grid image;
  std::vector<curve_point> curve;
  generator_params final_params;
  std::vector<weight_vector> weights_per_stage;
  std::vector<double> stage_seconds;
  curriculum_state final_curriculum;
  bool diverged = false;
  std::size_t iterations_run = 0;
};

// Algorithm-1 style driver: outer loop recomputes the weights from the
// current network and the stage thresholds, inner loop takes K2[stage]
// optimizer steps on the weighted normalized loss. Divergence (non-finite
// loss, or loss exceeding 1000x the initial one) stops the run and returns
// the partial curve with the diverged flag set; callers map that to their
// failure path.
inline recon_result reconstruct(const run_config& config, const sampling_mask& mask,
                                const measurement_set& y,
                                const complex_grid* ground_truth = nullptr,
                                const roi_mask* roi = nullptr) {
  require(y.values.size() == mask.count(), errc::shape_mismatch,
          "reconstruct: measurements do not match the mask");
  double ynorm = 0.0;
  for (const cdouble& z : y.values) ynorm += std::norm(z);
  require(ynorm > 0.0, errc::all_zero_measurements, "reconstruct: measurements are all zero");
  if (ground_truth != nullptr)
    require(ground_truth->height == mask.height && ground_truth->width == mask.width,
            errc::shape_mismatch, "reconstruct: ground truth shape differs from the mask");

  recon_result out;
  generator_params params = init_inr(config.inr, config.seed);
  inr_engine engine(params, mask.height, mask.width);

  std::optional<roi_mask> roi_storage;
  const roi_mask* roi_use = roi;
  if (roi_use == nullptr && ground_truth != nullptr) {
    roi_storage = default_roi(*ground_truth);
    roi_use = &*roi_storage;
  }

  const radial_distance_map distances = radial_distances(mask);
  const std::vector<double> ones(y.values.size(), 1.0);

  // Stage plan: vanilla mode is a single stage holding the whole budget with
  // unit weights; otherwise the curriculum drives it.
  curriculum_state st;
  std::size_t total_stages = 1;
  if (config.vanilla_mode) {
    std::size_t total = 0;
    for (std::size_t b : config.curriculum.k2) total += b;
    require(total >= 1, errc::bad_config, "reconstruct: empty iteration budget");
    st.k1 = 1;
    st.k2 = {total};
    st.w1 = st.w2 = 1.0;
  } else {
    const measurement_set pred0 = apply_forward(mask, engine.forward(params));
    const std::vector<double> res0 = normalized_residuals(pred0, y);
    st = make_curriculum(res0, distances.max_distance, config.curriculum);
    total_stages = st.k1;
  }

  optimizer_state opt;
  double initial_loss = -1.0;
  std::size_t iteration = 0;
  const auto now = [] { return std::chrono::steady_clock::now(); };

  const auto log_point = [&](double loss, std::size_t stage, const complex_grid& image) {
    curve_point pt;
    pt.iteration = iteration;
    pt.stage = stage;
    pt.loss = loss;
    if (ground_truth != nullptr) {
      pt.rlne_roi = rlne_roi(*ground_truth, image, *roi_use);
      pt.psnr_db = psnr_roi(*ground_truth, image, *roi_use);
    }
    out.curve.push_back(pt);
  };

  for (std::size_t stage_idx = 0; stage_idx < total_stages && !out.diverged; ++stage_idx) {
    const std::size_t stage = stage_idx + 1;
    const auto stage_start = now();

    // Outer-loop weight update from the current network state.
    weight_vector w;
    if (config.vanilla_mode || config.weighting == weighting_mode::uniform) {
      w.s = ones;
      w.t = ones;
      w.v = ones;
    } else {
      const measurement_set pred = apply_forward(mask, engine.forward(params));
      const std::vector<double> res = normalized_residuals(pred, y);
      std::vector<double> s = config.weighting == weighting_mode::teacher_only
                                  ? ones
                                  : student_weights(res, st.lambda, st.w1);
      std::vector<double> t = config.weighting == weighting_mode::student_only
                                  ? ones
                                  : teacher_weights(distances, st.r, st.w2);
      w = combine_weights(std::move(s), std::move(t));
    }
    out.weights_per_stage.push_back(w);

    const std::size_t budget = config.vanilla_mode ? st.k2[0] : st.k2[stage_idx];
    for (std::size_t k2 = 0; k2 < budget; ++k2) {
      inr_engine::loss_grad lg = engine.loss_and_gradient(params, mask, y, w.v);
      if (initial_loss < 0.0) initial_loss = lg.loss;
      const bool blown = !std::isfinite(lg.loss) || lg.loss > 1e3 * initial_loss;
      if (blown) {
        out.diverged = true;
        if (std::isfinite(lg.loss)) log_point(lg.loss, stage, lg.image);
        break;
      }
      if (iteration % config.log_every == 0) log_point(lg.loss, stage, lg.image);
      optimizer_step(params.theta, lg.grad, opt, config.optimizer, config.learning_rate,
                     config.adam_beta1, config.adam_beta2, config.adam_eps);
      ++iteration;
    }

    out.stage_seconds.push_back(std::chrono::duration<double>(now() - stage_start).count());
    if (!out.diverged && !config.vanilla_mode && stage < st.k1) st = advance_stage(st);
  }

  out.iterations_run = iteration;
  out.image = engine.forward(params);
  if (!out.diverged) {
    // Final point: the post-training state.
    double num2 = 0.0, den2 = 0.0;
    const measurement_set pred = apply_forward(mask, out.image);
    const weight_vector& w = out.weights_per_stage.back();
    for (std::size_t i = 0; i < y.values.size(); ++i) {
      num2 += w.v[i] * w.v[i] * std::norm(pred.values[i] - y.values[i]);
      den2 += w.v[i] * w.v[i] * std::norm(y.values[i]);
    }
    log_point(std::sqrt(num2) / std::sqrt(den2), total_stages, out.image);
  }
  out.final_params = std::move(params);
  out.final_curriculum = st;
  return out;
}

}  // namespace coggen
