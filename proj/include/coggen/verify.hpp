#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "coggen/config.hpp"
#include "coggen/forward_model.hpp"
#include "coggen/inr.hpp"
#include "coggen/rng.hpp"
#include "coggen/sampling_mask.hpp"
#include "coggen/theory.hpp"

namespace coggen {

// One measured claim: pass iff the measurement satisfied its limit.
struct check_line {
  std::string name;
  bool pass = false;
  double measured = 0.0;
  double limit = 0.0;
  std::string note;
};

struct section_report {
  std::string section;
  std::vector<check_line> lines;

  bool all_pass() const {
    for (const check_line& l : lines)
      if (!l.pass) return false;
    return true;
  }
};

namespace detail {

inline small_matrix random_complex_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed,
                                          double scale) {
  counter_rng rng(seed, counter_rng::theory_stream);
  draw_seq d{rng};
  small_matrix m(rows, cols);
  for (cdouble& z : m.entries) z = scale * cdouble(d.gaussian(), d.gaussian());
  return m;
}

inline std::vector<cdouble> random_complex_vector(std::size_t n, std::uint64_t seed,
                                                  double scale) {
  counter_rng rng(seed + 7777, counter_rng::theory_stream);
  draw_seq d{rng};
  std::vector<cdouble> v(n);
  for (cdouble& z : v) z = scale * cdouble(d.gaussian(), d.gaussian());
  return v;
}

// Uniform-weighting noise recursion e <- e - eta A^H (A e - eps); returns
// the final error norm. Baseline arm for the paired comparison.
inline double uniform_noise_final(const linear_problem& p, std::size_t t_total) {
  const small_matrix ah = p.a.adjoint();
  std::vector<cdouble> e(p.a.cols, 0.0);
  for (std::size_t t = 0; t < t_total; ++t) {
    std::vector<cdouble> ae = matvec(p.a, e);
    for (std::size_t r = 0; r < ae.size(); ++r) ae[r] -= p.noise[r];
    const std::vector<cdouble> step = matvec(ah, ae);
    for (std::size_t c = 0; c < e.size(); ++c) e[c] -= p.eta * step[c];
  }
  return vec_norm(e);
}

}  // namespace detail

// Spectral noise amplification (steady-state Landweber mode errors vs
// eps_i / sigma_i) on a random 6x6 system.
inline section_report verify_spectral_section() {
  section_report rep;
  rep.section = "spectral";
  try {
    small_matrix a = detail::random_complex_matrix(6, 6, 5101, 1.0 / std::sqrt(6.0));
    const std::vector<cdouble> x_star = detail::random_complex_vector(6, 5102, 1.0);
    const std::vector<cdouble> eps = detail::random_complex_vector(6, 5103, 0.1);

    const double smax = svd_small(a).sigma.front();
    const double eta = 1.0 / (smax * smax);
    linear_problem p = make_linear_problem(std::move(a), x_star, eps, eta);

    // Iterate until the slowest kept mode has contracted by 1e-9.
    double slow_sigma = p.svd.sigma.front();
    for (double s : p.svd.sigma)
      if (s >= 0.05) slow_sigma = s;
    const double per_step = eta * slow_sigma * slow_sigma;
    const std::size_t t_total =
        std::min<std::size_t>(1000000, static_cast<std::size_t>(std::ceil(
                                           std::log(1e9) / per_step)) +
                                           1);
    const landweber_history h = landweber_trajectory(p, t_total);

    double worst = 0.0;
    std::size_t checked = 0;
    for (std::size_t i = 0; i < h.sigma.size(); ++i) {
      if (h.sigma[i] < 0.05) continue;
      ++checked;
      const cdouble steady = h.noise_modes[i] / h.sigma[i];
      const double rel = std::abs(h.mode_errors.back()[i] - steady) / std::abs(steady);
      worst = std::max(worst, rel);
    }
    rep.lines.push_back({"landweber_steady_state_rel_err", worst <= 0.01, worst, 0.01,
                         std::to_string(checked) + " modes with sigma >= 0.05, T = " +
                             std::to_string(t_total)});
  } catch (const error& e) {
    rep.lines.push_back({"spectral_exception", false, 0.0, 0.0, e.what()});
  }
  return rep;
}

// Stage-wise linear convergence (PL rate on random quadratics) and the
// acceleration premise/bound on a low-frequency-weighted masked-DFT problem.
inline section_report verify_pl_section() {
  section_report rep;
  rep.section = "pl";

  // Rate law: gap_k <= (1 - eta mu)^k gap_0 on 10 random stage quadratics.
  try {
    double worst_ratio = 0.0;
    for (std::uint64_t sys = 0; sys < 10; ++sys) {
      const small_matrix j = detail::random_complex_matrix(6, 6, 5200 + sys, 1.0);
      const small_matrix a = detail::random_complex_matrix(6, 6, 5300 + sys, 1.0);
      counter_rng rng(5400 + sys, counter_rng::theory_stream);
      detail::draw_seq d{rng};
      std::vector<double> v(6);
      for (double& w : v) w = 0.2 + 0.8 * rng.uniform(d.ctr++);
      const small_matrix h = stage_hessian(j, a, v);
      const std::vector<cdouble> theta0 = detail::random_complex_vector(6, 5500 + sys, 1.0);
      const double l = svd_small(h).sigma.front();
      const stage_linear_report r = verify_stage_linear(h, theta0, 200, 1.0 / l);
      worst_ratio = std::max(worst_ratio, r.worst_ratio);
    }
    rep.lines.push_back({"stage_linear_rate_worst_ratio", worst_ratio <= 1.0 + 1e-9, worst_ratio,
                         1.0 + 1e-9, "10 systems, 200 GD steps each"});
  } catch (const error& e) {
    rep.lines.push_back({"stage_linear_exception", false, 0.0, 0.0, e.what()});
  }

  // Acceleration bound on an 8x8 masked-DFT linearization with radially
  // decaying parameter gains: early center-only weighting removes the
  // ill-conditioned periphery directions, raising the PL constant.
  try {
    const std::size_t hgt = 8, wid = 8;
    sampling_mask mask;
    mask.height = hgt;
    mask.width = wid;
    mask.selected.assign(hgt * wid, 0);
    mask.pattern = mask_pattern::vd2d;
    for (std::size_t r = 0; r < hgt; ++r)
      for (std::size_t c = 0; c < wid; ++c) {
        const double dist = center_distance(r, c, hgt, wid);
        if (dist <= 2.0 || (r + c) % 2 == 0) mask.selected[r * wid + c] = 1;
      }
    mask.acceleration_factor =
        static_cast<double>(hgt * wid) / static_cast<double>(mask.count());

    const small_matrix a = make_masked_dft(mask);
    const small_matrix f = make_dft_matrix(hgt, wid);
    small_matrix dgain(hgt * wid, hgt * wid);
    for (std::size_t r = 0; r < hgt; ++r)
      for (std::size_t c = 0; c < wid; ++c) {
        const std::size_t bin = detail::plain_index(r, c, hgt, wid);
        dgain.at(bin, bin) = std::exp(-center_distance(r, c, hgt, wid) / 3.0);
      }
    const small_matrix jlin = matmul(f.adjoint(), dgain);

    std::vector<double> v_early, v_uniform;
    for (std::size_t r = 0; r < hgt; ++r)
      for (std::size_t c = 0; c < wid; ++c) {
        if (!mask.selected[r * wid + c]) continue;
        v_early.push_back(center_distance(r, c, hgt, wid) <= 2.0 ? 1.0 : 0.0);
        v_uniform.push_back(1.0);
      }

    const pl_pair early = pl_constants(jlin, a, v_early);
    const pl_pair uniform = pl_constants(jlin, a, v_uniform);
    rep.lines.push_back({"mu_early_over_mu_uniform", early.mu > uniform.mu,
                         early.mu / uniform.mu, 1.0, "premise: early weighting raises mu"});

    const double eta = 1.0 / uniform.l;
    const acceleration_bounds b = acceleration_bound(0.01, eta, early.mu, uniform.mu);
    const std::vector<cdouble> theta0 = detail::random_complex_vector(hgt * wid, 5600, 1.0);
    const small_matrix h_early = stage_hessian(jlin, a, v_early);
    const small_matrix h_uniform = stage_hessian(jlin, a, v_uniform);
    const std::size_t it_early = gd_iterations_to_gap(h_early, theta0, eta, 0.01, 100000);
    const std::size_t it_uniform = gd_iterations_to_gap(h_uniform, theta0, eta, 0.01, 100000);
    rep.lines.push_back({"weighted_iters_vs_a10_bound",
                         static_cast<double>(it_early) <= b.k_coggen,
                         static_cast<double>(it_early), b.k_coggen,
                         "k_dip bound = " + std::to_string(b.k_dip)});
    rep.lines.push_back({"uniform_iters_vs_a10_bound",
                         static_cast<double>(it_uniform) <= b.k_dip,
                         static_cast<double>(it_uniform), b.k_dip,
                         "uniform stage against its own bound"});
    rep.lines.push_back({"weighted_faster_than_uniform", it_early < it_uniform,
                         static_cast<double>(it_early), static_cast<double>(it_uniform),
                         "iterations to the same relative gap"});
  } catch (const error& e) {
    rep.lines.push_back({"acceleration_exception", false, 0.0, 0.0, e.what()});
  }
  return rep;
}

// Noise-imprint bounds: strict B_coggen < B_dip over a 50-configuration
// grid, simulation never above its bound, and the paired 16-mode comparison
// against uniform weighting.
inline section_report verify_bounds_section() {
  section_report rep;
  rep.section = "bounds";
  try {
    const std::size_t modes = 16;
    std::vector<double> sigma(modes);
    for (std::size_t i = 0; i < modes; ++i)
      sigma[i] = 1.5 * std::pow(0.3 / 1.5, static_cast<double>(i) / (modes - 1));
    const small_matrix a = small_matrix::diagonal(sigma);
    const double eta = 1.0 / (sigma.front() * sigma.front());
    const std::vector<cdouble> x0(modes, 0.0);

    double worst_dominance = 0.0;  // max B_coggen / B_dip, must stay < 1
    double worst_sim = 0.0;        // max simulated / B_coggen
    std::size_t configs = 0;
    const std::vector<cdouble> eps = detail::random_complex_vector(modes, 5700, 0.2);
    const linear_problem p = make_linear_problem(a, x0, eps, eta);
    for (double delta : {0.02, 0.05, 0.1, 0.2, 0.4}) {
      for (std::size_t tau : {1u, 2u, 4u, 8u, 16u}) {
        for (std::size_t tail : {8u, 16u}) {
          std::vector<double> v_lo(modes, delta);
          for (std::size_t i = 0; i < modes / 2; ++i) v_lo[i] = 1.0;
          const std::size_t t_total = tau + tail;
          const stage_weighting w =
              make_stage_weighting(p, {v_lo, std::vector<double>(modes, 1.0)},
                                   {tau, tail}, tau);
          const noise_sim_result sim = simulate_weighted_noise_error(p, w, t_total);
          worst_dominance =
              std::max(worst_dominance, sim.bounds.b_coggen / sim.bounds.b_dip);
          worst_sim = std::max(worst_sim, sim.error_norms.back() / sim.bounds.b_coggen);
          ++configs;
        }
      }
    }
    rep.lines.push_back({"imprint_dominance_worst_ratio", worst_dominance < 1.0,
                         worst_dominance, 1.0,
                         std::to_string(configs) + " (tau, delta, T) configurations"});
    rep.lines.push_back({"simulation_vs_bound_worst_ratio", worst_sim <= 1.0 + 1e-9, worst_sim,
                         1.0 + 1e-9, "simulated final error over B_coggen"});

    // Paired comparison: early low-pass weighting vs uniform on 10 noise
    // seeds, tau = T/2.
    std::size_t wins = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const std::vector<cdouble> eps_s = detail::random_complex_vector(modes, 5800 + s, 0.2);
      const linear_problem ps = make_linear_problem(a, x0, eps_s, eta);
      std::vector<double> v_lo(modes, 0.05);
      for (std::size_t i = 0; i < modes / 2; ++i) v_lo[i] = 1.0;
      const std::size_t t_total = 16, tau = 8;
      const stage_weighting w = make_stage_weighting(
          ps, {v_lo, std::vector<double>(modes, 1.0)}, {tau, t_total - tau}, tau);
      const noise_sim_result sim = simulate_weighted_noise_error(ps, w, t_total);
      const double uniform_final = detail::uniform_noise_final(ps, t_total);
      if (sim.error_norms.back() < uniform_final) ++wins;
    }
    rep.lines.push_back({"paired_weighted_wins", wins >= 9, static_cast<double>(wins), 9.0,
                         "weighted beats uniform noise error, 10 seeds"});
  } catch (const error& e) {
    rep.lines.push_back({"bounds_exception", false, 0.0, 0.0, e.what()});
  }
  return rep;
}

inline std::vector<section_report> run_verify_sections(const std::string& which) {
  std::vector<section_report> out;
  const bool all = which == "all" || which.empty();
  if (all || which == "spectral") out.push_back(verify_spectral_section());
  if (all || which == "pl") out.push_back(verify_pl_section());
  if (all || which == "bounds") out.push_back(verify_bounds_section());
  require(!out.empty(), errc::bad_config, "verify: unknown section " + which);
  return out;
}

inline json section_to_json(const section_report& s) {
  json checks = json::array();
  for (const check_line& l : s.lines)
    checks.push_back({{"name", l.name},
                      {"pass", l.pass},
                      {"measured", l.measured},
                      {"limit", l.limit},
                      {"note", l.note}});
  return json{{"section", s.section}, {"pass", s.all_pass()}, {"checks", checks}};
}

inline json verify_theory_json(const std::vector<section_report>& sections) {
  json out;
  out["format"] = "coggen-report/1";
  out["kind"] = "verify-theory";
  bool all = true;
  json arr = json::array();
  for (const section_report& s : sections) {
    arr.push_back(section_to_json(s));
    all = all && s.all_pass();
  }
  out["sections"] = arr;
  out["all_pass"] = all;
  return out;
}

}  // namespace coggen
