#pragma once

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "coggen/config.hpp"
#include "coggen/errors.hpp"
#include "coggen/forward_model.hpp"
#include "coggen/io.hpp"
#include "coggen/metrics.hpp"
#include "coggen/optimizer.hpp"
#include "coggen/phantom.hpp"

namespace coggen {

enum class ablation_suite : std::uint8_t { backbone_gain = 0, curriculum_size = 1, mode_weighting = 2 };

inline const char* to_string(ablation_suite s) {
  switch (s) {
    case ablation_suite::backbone_gain: return "BACKBONE_GAIN";
    case ablation_suite::curriculum_size: return "CURRICULUM_SIZE";
    case ablation_suite::mode_weighting: return "MODE_WEIGHTING";
  }
  return "?";
}

// Ground truth, mask and noisy measurements for one seed. Arms within a seed
// share the instance so comparisons are paired.
struct prepared_instance {
  complex_grid ground_truth;
  sampling_mask mask;
  measurement_set y;
  roi_mask roi;
  double noise_sigma_used = 0.0;
};

inline prepared_instance prepare_instance(const experiment_config& cfg,
                                          std::uint64_t seed_shift = 0) {
  prepared_instance inst;
  if (!cfg.phantom_file.empty()) {
    inst.ground_truth = read_grid(cfg.phantom_file);
  } else {
    inst.ground_truth = gen_phantom(cfg.phantom);
  }
  if (!cfg.mask.file.empty()) {
    inst.mask = read_mask(cfg.mask.file);
    require(inst.mask.height == inst.ground_truth.height &&
                inst.mask.width == inst.ground_truth.width,
            errc::shape_mismatch, "mask file dimensions do not match the phantom");
  } else {
    const std::size_t h = cfg.mask.height ? cfg.mask.height : inst.ground_truth.height;
    const std::size_t w = cfg.mask.width ? cfg.mask.width : inst.ground_truth.width;
    require(h == inst.ground_truth.height && w == inst.ground_truth.width, errc::shape_mismatch,
            "mask dimensions do not match the phantom");
    inst.mask = gen_vd_mask(h, w, cfg.mask.pattern, cfg.mask.acceleration_factor,
                            cfg.mask.center_fraction, cfg.mask.seed + seed_shift);
  }
  measurement_set clean = apply_forward(inst.mask, inst.ground_truth);
  double sigma = cfg.noise.sigma;
  if (cfg.noise.sigma_rel > 0.0) {
    double peak = 0.0;
    for (const cdouble& v : clean.values) peak = std::max(peak, std::abs(v));
    sigma = cfg.noise.sigma_rel * peak;
  }
  inst.y = sigma > 0.0 ? add_awgn(clean, sigma, cfg.noise.seed + seed_shift) : clean;
  inst.noise_sigma_used = sigma;
  inst.roi = default_roi(inst.ground_truth);
  return inst;
}

// One reconstruction's scoreboard entry.
struct ablation_run {
  std::string arm;
  std::uint64_t seed = 0;
  double final_rlne = std::numeric_limits<double>::quiet_NaN();
  double final_psnr = std::numeric_limits<double>::quiet_NaN();
  double best_rlne = std::numeric_limits<double>::quiet_NaN();
  std::size_t iters_to_best = 0;
  bool diverged = false;
  std::vector<curve_point> curve;
};

struct ablation_report {
  ablation_suite suite = ablation_suite::backbone_gain;
  std::size_t seeds = 0;
  std::vector<std::string> arms;
  std::vector<ablation_run> runs;  // arm-major: runs[a * seeds + s]
};

namespace detail {

inline void score_from_curve(ablation_run& out) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_it = 0;
  for (const curve_point& p : out.curve) {
    if (std::isfinite(p.rlne_roi) && p.rlne_roi < best) {
      best = p.rlne_roi;
      best_it = p.iteration;
    }
  }
  if (std::isfinite(best)) {
    out.best_rlne = best;
    out.iters_to_best = best_it;
  }
}

}  // namespace detail

inline ablation_run execute_arm(const std::string& arm, std::uint64_t seed_index,
                                run_config rc, const prepared_instance& inst) {
  rc.seed += seed_index;
  recon_result res = reconstruct(rc, inst.mask, inst.y, &inst.ground_truth, &inst.roi);
  ablation_run out;
  out.arm = arm;
  out.seed = seed_index;
  out.diverged = res.diverged;
  out.curve = std::move(res.curve);
  out.final_rlne = rlne_roi(inst.ground_truth, res.image, inst.roi);
  out.final_psnr = psnr_roi(inst.ground_truth, res.image, inst.roi);
  detail::score_from_curve(out);
  return out;
}

// Splits a total iteration budget into k1 stages, remainder on the last
// (the heaviest stage goes last, echoing the reference schedule's shape).
inline std::vector<std::size_t> split_budget(std::size_t total, std::size_t k1) {
  require(k1 >= 1 && total >= k1, errc::bad_config, "budget smaller than the stage count");
  std::vector<std::size_t> k2(k1, total / k1);
  k2.back() += total - (total / k1) * k1;
  return k2;
}

inline std::size_t thread_budget(std::size_t jobs) {
  std::size_t cap = std::thread::hardware_concurrency();
  if (cap == 0) cap = 1;
  if (const char* env = std::getenv("COGGEN_THREADS")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && v >= 1) cap = static_cast<std::size_t>(v);
  }
  return std::max<std::size_t>(1, std::min(cap, jobs));
}

// Builds the per-suite arm list as (name, run_config) pairs.
inline std::vector<std::pair<std::string, run_config>> ablation_arms(ablation_suite suite,
                                                                     const run_config& base) {
  std::vector<std::pair<std::string, run_config>> arms;
  switch (suite) {
    case ablation_suite::backbone_gain: {
      run_config vanilla = base;
      vanilla.vanilla_mode = true;
      run_config coggen = base;
      coggen.vanilla_mode = false;
      coggen.weighting = weighting_mode::dual;
      arms.emplace_back("vanilla", vanilla);
      arms.emplace_back("coggen", coggen);
      break;
    }
    case ablation_suite::curriculum_size: {
      std::size_t total = 0;
      for (std::size_t b : base.curriculum.k2) total += b;
      for (std::size_t k1 : {1, 2, 3, 4, 5, 6, 8}) {
        run_config rc = base;
        rc.vanilla_mode = false;
        rc.curriculum.k1 = k1;
        rc.curriculum.k2 = split_budget(total, k1);
        // steps must be re-solved for the new stage count
        rc.curriculum.lambda_step = 0.0;
        rc.curriculum.r_step = 0.0;
        arms.emplace_back("K1=" + std::to_string(k1), rc);
      }
      break;
    }
    case ablation_suite::mode_weighting: {
      for (weighting_mode m : {weighting_mode::uniform, weighting_mode::teacher_only,
                               weighting_mode::student_only, weighting_mode::dual}) {
        run_config rc = base;
        rc.vanilla_mode = false;
        rc.weighting = m;
        arms.emplace_back(to_string(m), rc);
      }
      break;
    }
  }
  return arms;
}

// Runs every (arm, seed) job, fanning out across worker threads. Results
// land at fixed indices, so the report is deterministic regardless of the
// completion order.
inline ablation_report run_ablation(ablation_suite suite, const experiment_config& base,
                                    std::size_t n_seeds, std::size_t threads = 0,
                                    const std::function<void(const ablation_run&)>* on_done =
                                        nullptr) {
  require(n_seeds >= 1, errc::bad_config, "ablation needs at least one seed");
  const auto arms = ablation_arms(suite, base.run);

  std::vector<prepared_instance> instances;
  instances.reserve(n_seeds);
  for (std::size_t s = 0; s < n_seeds; ++s) instances.push_back(prepare_instance(base, s));

  ablation_report report;
  report.suite = suite;
  report.seeds = n_seeds;
  for (const auto& a : arms) report.arms.push_back(a.first);
  report.runs.resize(arms.size() * n_seeds);

  const std::size_t jobs = report.runs.size();
  const std::size_t workers = threads ? std::min(threads, jobs) : thread_budget(jobs);

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex report_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t job = next.fetch_add(1);
      if (job >= jobs) return;
      const std::size_t a = job / n_seeds;
      const std::size_t s = job % n_seeds;
      try {
        ablation_run run = execute_arm(arms[a].first, s, arms[a].second, instances[s]);
        std::lock_guard<std::mutex> lock(report_mutex);
        report.runs[job] = std::move(run);
        if (on_done && *on_done) (*on_done)(report.runs[job]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(report_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return report;
}

// Per-arm aggregate view used by the report artifact and acceptance checks.
struct arm_summary {
  std::string arm;
  double mean_final_rlne = std::numeric_limits<double>::quiet_NaN();
  double mean_final_psnr = std::numeric_limits<double>::quiet_NaN();
  std::size_t diverged = 0;
};

inline std::vector<arm_summary> summarize(const ablation_report& report) {
  std::vector<arm_summary> out;
  for (std::size_t a = 0; a < report.arms.size(); ++a) {
    arm_summary s;
    s.arm = report.arms[a];
    double rlne = 0.0, psnr = 0.0;
    for (std::size_t i = 0; i < report.seeds; ++i) {
      const ablation_run& r = report.runs[a * report.seeds + i];
      rlne += r.final_rlne;
      psnr += r.final_psnr;
      if (r.diverged) ++s.diverged;
    }
    s.mean_final_rlne = rlne / static_cast<double>(report.seeds);
    s.mean_final_psnr = psnr / static_cast<double>(report.seeds);
    out.push_back(s);
  }
  return out;
}

inline json ablation_table_json(const ablation_report& report) {
  json rows = json::array();
  for (const ablation_run& r : report.runs) {
    rows.push_back({{"arm", r.arm},
                    {"seed", r.seed},
                    {"final_rlne", r.final_rlne},
                    {"final_psnr", r.final_psnr},
                    {"best_rlne", r.best_rlne},
                    {"iters_to_best", r.iters_to_best},
                    {"diverged", r.diverged}});
  }
  json arms = json::array();
  std::string best_arm;
  double best_mean = std::numeric_limits<double>::infinity();
  for (const arm_summary& s : summarize(report)) {
    arms.push_back({{"arm", s.arm},
                    {"mean_final_rlne", s.mean_final_rlne},
                    {"mean_final_psnr", s.mean_final_psnr},
                    {"diverged", s.diverged}});
    if (s.mean_final_rlne < best_mean) {
      best_mean = s.mean_final_rlne;
      best_arm = s.arm;
    }
  }
  return json{{"suite", to_string(report.suite)},
              {"seeds", report.seeds},
              {"arms", arms},
              {"best_arm", best_arm},
              {"rows", rows}};
}

}  // namespace coggen
