// Acceptance gate: runs every (selected) acceptance criterion at its stated
// tolerance and prints one PASS/FAIL line per criterion. Exit code 0 iff all
// selected criteria pass.
//
//   acceptance [--fast | --benchmark] [--cli PATH]
//
// --fast runs the sub-minute criteria (1-8, 11, 12); --benchmark runs the
// long paired-seed study (9, 10); no flag runs everything. --cli names the
// command-line binary exercised by the determinism criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "coggen/coggen.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using coggen::cdouble;

namespace {

int g_failures = 0;

void record(int id, bool pass, const std::string& description, const std::string& detail = "") {
  if (!pass) ++g_failures;
  std::printf("[%2d] %s — %s%s%s%s\n", id, pass ? "PASS" : "FAIL", description.c_str(),
              detail.empty() ? "" : " (", detail.c_str(), detail.empty() ? "" : ")");
  std::fflush(stdout);
}

template <class F>
void guarded(int id, const std::string& description, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    record(id, false, description, std::string("exception: ") + e.what());
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------- criterion 1

void criterion_1() {
  const std::string desc = "adjoint identity and Parseval hold to 1e-12 on 100 random instances";
  guarded(1, desc, [&] {
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 100; ++k) {
      const std::size_t h = (k % 3 == 0) ? 4 : 8;
      const std::size_t w = (k % 4 == 0) ? 8 : h;
      const coggen::sampling_mask m =
          (k % 5 == 0) ? coggen::gen_vd_mask(h, w, coggen::mask_pattern::full, 1.0, 0.0, k)
                       : coggen::gen_vd_mask(h, w, coggen::mask_pattern::vd2d, 2.0, 0.1, k);
      const coggen::complex_grid x = oracle::random_grid(h, w, 9000 + k);
      const coggen::measurement_set ax = coggen::apply_forward(m, x);
      const std::vector<cdouble> y = oracle::random_cvec(ax.values.size(), 9200 + k);
      const coggen::complex_grid ahy = coggen::apply_adjoint(m, y);

      cdouble lhs = 0.0, rhs = 0.0;
      double scale = 0.0;
      for (std::size_t i = 0; i < y.size(); ++i) {
        lhs += ax.values[i] * std::conj(y[i]);
        scale += std::abs(ax.values[i]) * std::abs(y[i]);
      }
      for (std::size_t i = 0; i < x.data.size(); ++i) rhs += x.data[i] * std::conj(ahy.data[i]);
      worst = std::max(worst, std::abs(lhs - rhs) / std::max(scale, 1e-300));

      const coggen::complex_grid kx = coggen::fft2(x);
      double nx = 0.0, nk = 0.0;
      for (const cdouble& z : x.data) nx += std::norm(z);
      for (const cdouble& z : kx.data) nk += std::norm(z);
      worst = std::max(worst, std::abs(std::sqrt(nx) - std::sqrt(nk)) / std::sqrt(nx));
    }
    record(1, worst <= 1e-12, desc, "worst relative error " + fmt(worst));
  });
}

// ---------------------------------------------------------------- criterion 2

void criterion_2() {
  const std::string desc =
      "analytic loss gradient matches central differences under 1e-4 on every parameter";
  guarded(2, desc, [&] {
    double worst = 0.0;
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
      const coggen::sampling_mask m =
          coggen::gen_vd_mask(8, 8, coggen::mask_pattern::vd2d, 2.0, 0.1, seed);
      const coggen::complex_grid gt = oracle::random_grid(8, 8, 9300 + seed);
      coggen::measurement_set y = coggen::apply_forward(m, gt);

      coggen::inr_config ic;
      ic.hidden_layers = 2;
      ic.hidden_width = 8;
      ic.fourier_features = 4;
      ic.fourier_scale = 3.0;
      coggen::generator_params params = coggen::init_inr(ic, seed);

      std::vector<double> v(m.count());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = (i % 2 == 0) ? 1.0 : 0.7;

      const coggen::inr_engine::loss_grad lg = coggen::loss_and_gradient(params, m, y, v);
      const double h = 1e-6;
      for (std::size_t j = 0; j < params.theta.size(); ++j) {
        coggen::generator_params p = params;
        p.theta[j] += h;
        const double up = coggen::loss_and_gradient(p, m, y, v).loss;
        p.theta[j] -= 2.0 * h;
        const double dn = coggen::loss_and_gradient(p, m, y, v).loss;
        const double fd = (up - dn) / (2.0 * h);
        const double rel =
            std::abs(fd - lg.grad[j]) / std::max({std::abs(fd), std::abs(lg.grad[j]), 1e-6});
        worst = std::max(worst, rel);
      }
    }
    record(2, worst < 1e-4, desc, "3 seeds, worst relative error " + fmt(worst));
  });
}

// ---------------------------------------------------------------- criterion 3

void criterion_3() {
  const std::string desc =
      "student/teacher/combined weights equal the case-split re-evaluation on 1000 tuples";
  guarded(3, desc, [&] {
    std::mt19937_64 rng(424242);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t bad = 0;
    for (int k = 0; k < 1000; ++k) {
      const double res = 3.0 * unit(rng);
      const double dist = 10.0 * unit(rng);
      const double lambda = 3.0 * unit(rng);
      const double r = 10.0 * unit(rng);
      const double w1 = 0.5 + 0.5 * (unit(rng) * 0.999 + 0.001);
      const double w2 = 0.5 + 0.5 * (unit(rng) * 0.999 + 0.001);

      const std::vector<double> s = coggen::student_weights({res}, lambda, w1);
      coggen::radial_distance_map dm;
      dm.distances = {dist};
      dm.max_distance = dist;
      const std::vector<double> t = coggen::teacher_weights(dm, r, w2);
      const coggen::weight_vector w = coggen::combine_weights(s, t);

      const oracle::weight_parts want = oracle::weight_case_parts(res, dist, lambda, r, w1, w2);
      if (s[0] != want.s || t[0] != want.t || w.v[0] != want.combined) ++bad;
    }
    record(3, bad == 0, desc, std::to_string(1000 - bad) + "/1000 exact");
  });
}

// ---------------------------------------------------------------- criterion 4

void criterion_4() {
  const std::string desc =
      "all-admitting thresholds reproduce vanilla fitting iterate-for-iterate to 1e-12";
  guarded(4, desc, [&] {
    const coggen::sampling_mask m =
        coggen::gen_vd_mask(8, 8, coggen::mask_pattern::vd2d, 2.0, 0.1, 3);
    coggen::phantom_spec ps;
    ps.kind = coggen::phantom_kind::checker_smooth;
    ps.height = 8;
    ps.width = 8;
    const coggen::complex_grid gt = coggen::gen_phantom(ps);
    const coggen::measurement_set y = coggen::apply_forward(m, gt);

    coggen::run_config base;
    base.inr.hidden_layers = 2;
    base.inr.hidden_width = 8;
    base.inr.fourier_features = 4;
    base.inr.fourier_scale = 3.0;
    base.optimizer = coggen::optimizer_kind::adam;
    base.learning_rate = 1e-3;
    base.log_every = 1;
    base.seed = 11;

    coggen::run_config vanilla = base;
    vanilla.vanilla_mode = true;
    vanilla.curriculum.k1 = 1;
    vanilla.curriculum.k2 = {100};

    coggen::run_config open = base;
    open.vanilla_mode = false;
    open.weighting = coggen::weighting_mode::dual;
    open.curriculum.k1 = 2;
    open.curriculum.k2 = {50, 50};
    open.curriculum.w1 = 1.0;
    open.curriculum.w2 = 1.0;
    open.curriculum.lambda0 = 1e9;  // admit everything from stage 1
    open.curriculum.r0 = 1e9;
    open.curriculum.lambda_step = 1.0001;
    open.curriculum.r_step = 1.0001;

    const coggen::recon_result a = coggen::reconstruct(vanilla, m, y, &gt);
    const coggen::recon_result b = coggen::reconstruct(open, m, y, &gt);

    double worst = 0.0;
    bool shape_ok = a.curve.size() == b.curve.size();
    if (shape_ok) {
      for (std::size_t i = 0; i < a.curve.size(); ++i) {
        shape_ok = shape_ok && a.curve[i].iteration == b.curve[i].iteration;
        worst = std::max(worst, std::abs(a.curve[i].loss - b.curve[i].loss) /
                                    std::max(std::abs(a.curve[i].loss), 1e-300));
      }
      double peak = 0.0, diff = 0.0;
      for (std::size_t i = 0; i < a.image.data.size(); ++i) {
        peak = std::max(peak, std::abs(a.image.data[i]));
        diff = std::max(diff, std::abs(a.image.data[i] - b.image.data[i]));
      }
      worst = std::max(worst, diff / std::max(peak, 1e-300));
    }
    record(4, shape_ok && worst <= 1e-12, desc,
           "100 iterations, worst relative gap " + fmt(worst));
  });
}

// ------------------------------------------------------------- criteria 5-8

void report_section_lines(int id, const std::string& desc,
                          const std::vector<coggen::check_line>& lines) {
  bool pass = !lines.empty();
  std::string detail;
  for (const coggen::check_line& l : lines) {
    pass = pass && l.pass;
    if (!detail.empty()) detail += ", ";
    detail += l.name + " " + fmt(l.measured) + (l.pass ? " ok" : " BAD");
  }
  record(id, pass, desc, detail);
}

void criteria_5_to_8() {
  guarded(5, "landweber steady-state mode errors", [&] {
    report_section_lines(
        5, "simulated steady-state mode errors match eps_i/sigma_i within 1% (sigma >= 0.05)",
        coggen::verify_spectral_section().lines);
  });

  const std::string desc6 =
      "optimality gap decays at the (1 - eta mu)^k rate on 10 quadratics";
  const std::string desc7 =
      "early weighting raises mu and weighted iterations beat the closed-form bound";
  try {
    const coggen::section_report pl = coggen::verify_pl_section();
    std::vector<coggen::check_line> rate_lines, accel_lines;
    for (const coggen::check_line& l : pl.lines) {
      if (l.name.rfind("stage_linear", 0) == 0)
        rate_lines.push_back(l);
      else
        accel_lines.push_back(l);
    }
    report_section_lines(6, desc6, rate_lines);
    report_section_lines(7, desc7, accel_lines);
  } catch (const std::exception& e) {
    record(6, false, desc6, std::string("exception: ") + e.what());
    record(7, false, desc7, std::string("exception: ") + e.what());
  }

  guarded(8, "noise-imprint bounds", [&] {
    report_section_lines(
        8, "B_coggen < B_dip on the 50-configuration grid and simulation never exceeds its bound",
        coggen::verify_bounds_section().lines);
  });
}

// --------------------------------------------------------------- criterion 11

void criterion_11() {
  const std::string desc =
      "metrics match hand-computed two-pixel values and are scale equivariant";
  guarded(11, desc, [&] {
    coggen::complex_grid x(1, 2), xh(1, 2);
    x.data = {cdouble(1.0, 0.0), cdouble(1.0, 0.0)};
    xh.data = {cdouble(1.0, 0.0), cdouble(0.0, 0.0)};
    const coggen::roi_mask roi = coggen::full_roi(1, 2);

    double worst = 0.0;
    worst = std::max(worst,
                     std::abs(coggen::rlne_roi(x, xh, roi) - 1.0 / std::sqrt(2.0)));
    worst = std::max(worst, std::abs(coggen::psnr_roi(x, xh, roi) -
                                     20.0 * std::log10(std::sqrt(2.0))));
    worst = std::max(worst, std::abs(coggen::psnr_roi(x, x, roi) - 300.0));

    std::mt19937_64 rng(777);
    std::uniform_real_distribution<double> mag(0.1, 10.0);
    std::uniform_real_distribution<double> ang(0.0, 6.28318530717958648);
    for (int k = 0; k < 100; ++k) {
      const coggen::complex_grid a = oracle::random_grid(6, 6, 9400 + k);
      const coggen::complex_grid b = oracle::random_grid(6, 6, 9500 + k);
      const cdouble c = std::polar(mag(rng), ang(rng));
      coggen::complex_grid ac = a, bc = b;
      for (cdouble& z : ac.data) z *= c;
      for (cdouble& z : bc.data) z *= c;
      const coggen::roi_mask full = coggen::full_roi(6, 6);
      const double r0 = coggen::rlne_roi(a, b, full);
      const double r1 = coggen::rlne_roi(ac, bc, full);
      worst = std::max(worst, std::abs(r1 - r0) / r0);
    }
    record(11, worst <= 1e-12, desc, "worst deviation " + fmt(worst));
  });
}

// --------------------------------------------------------------- criterion 12

std::vector<unsigned char> file_bytes(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is.good()) return {};
  return std::vector<unsigned char>((std::istreambuf_iterator<char>(is)),
                                    std::istreambuf_iterator<char>());
}

bool same_file(const fs::path& a, const fs::path& b, std::string& why) {
  const std::vector<unsigned char> ba = file_bytes(a), bb = file_bytes(b);
  if (ba.empty() || bb.empty()) {
    why = "missing or empty: " + a.string();
    return false;
  }
  if (ba != bb) {
    why = a.filename().string() + " differs between runs";
    return false;
  }
  return true;
}

int run_cli(const std::string& cli, const std::string& args) {
  const std::string cmd = "COGGEN_THREADS=1 \"" + cli + "\" " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

void criterion_12(const std::string& cli) {
  const std::string desc =
      "repeated CLI runs with one config and seed produce byte-identical artifacts";
  guarded(12, desc, [&] {
    if (cli.empty()) {
      record(12, false, desc, "no --cli binary given");
      return;
    }
    const fs::path root =
        fs::temp_directory_path() /
        ("coggen_accept_" +
         std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    fs::create_directories(root);

    coggen::json cfg;
    cfg["phantom"] = {{"kind", "CHECKER_SMOOTH"}, {"height", 16}, {"width", 16},
                      {"phase_mode", "SMOOTH_RANDOM"}, {"seed", 5}};
    cfg["mask"] = {{"pattern", "VD2D"}, {"acceleration_factor", 4.0},
                   {"center_fraction", 0.08}, {"seed", 2}};
    cfg["noise"] = {{"sigma_rel", 0.02}, {"seed", 3}};
    cfg["inr"] = {{"hidden_layers", 2}, {"hidden_width", 16}, {"fourier_features", 8},
                  {"fourier_scale", 5.0}, {"omega0", 30.0}};
    cfg["curriculum"] = {{"K1", 2}, {"K2", {15, 15}}, {"w1", 0.9}, {"w2", 0.9}};
    cfg["optimizer"] = {{"optimizer_kind", "ADAM"}, {"learning_rate", 0.001},
                        {"log_every", 5}, {"seed", 7}};
    cfg["output"] = {{"pgm", true}};
    const fs::path cfg_path = root / "cfg.json";
    {
      std::ofstream os(cfg_path);
      os << cfg.dump(2) << "\n";
    }

    const fs::path a = root / "run_a", b = root / "run_b";
    bool pass = true;
    std::string why;

    for (const fs::path& dir : {a, b}) {
      fs::create_directories(dir);
      if (run_cli(cli, "reconstruct --config " + cfg_path.string() + " --out-dir " +
                           dir.string()) != 0) {
        pass = false;
        why = "reconstruct exited nonzero";
        break;
      }
    }
    if (pass) {
      for (const char* name : {"recon.cgim", "mask.cgim", "ground_truth.cgim", "curve.csv",
                               "recon.pgm"}) {
        if (!same_file(a / name, b / name, why)) {
          pass = false;
          break;
        }
      }
    }
    if (pass) {
      // standalone generators must be deterministic too
      pass = run_cli(cli, "gen-phantom --spec " + cfg_path.string() + " --out " +
                              (root / "p1.cgim").string()) == 0 &&
             run_cli(cli, "gen-phantom --spec " + cfg_path.string() + " --out " +
                              (root / "p2.cgim").string()) == 0 &&
             run_cli(cli, "gen-mask --spec " + cfg_path.string() + " --out " +
                              (root / "m1.cgim").string()) == 0 &&
             run_cli(cli, "gen-mask --spec " + cfg_path.string() + " --out " +
                              (root / "m2.cgim").string()) == 0;
      if (!pass)
        why = "generator subcommand exited nonzero";
      else
        pass = same_file(root / "p1.cgim", root / "p2.cgim", why) &&
               same_file(root / "m1.cgim", root / "m2.cgim", why);
    }
    std::error_code ec;
    fs::remove_all(root, ec);
    record(12, pass, desc, pass ? "reconstruct, gen-phantom, gen-mask" : why);
  });
}

// ----------------------------------------------------------- criteria 9 / 10

coggen::experiment_config benchmark_config() {
  coggen::experiment_config cfg;
  cfg.phantom.kind = coggen::phantom_kind::shepp_logan;
  cfg.phantom.height = 64;
  cfg.phantom.width = 64;
  cfg.phantom.phase = coggen::phase_mode::zero;
  cfg.mask.pattern = coggen::mask_pattern::vd2d;
  cfg.mask.acceleration_factor = 8.0;
  cfg.mask.center_fraction = 0.04;
  cfg.mask.seed = 0;
  cfg.noise.sigma_rel = 0.05;
  cfg.noise.seed = 0;
  // Desk-scale calibration. The small net needs a low-bandwidth feature map
  // (scale 1, omega0 15) so the unobserved spectrum is filled smoothly, and a
  // slow learning rate so the noise imprint accrues over thousands of
  // iterations instead of saturating before stage weights can matter. The
  // teacher gate (w2, r0) shields the noise-floor rim of k-space; the student
  // gate is kept mild so it does not defer real content early on.
  cfg.run.inr.hidden_layers = 3;
  cfg.run.inr.hidden_width = 64;
  cfg.run.inr.fourier_features = 128;
  cfg.run.inr.fourier_scale = 1.0;
  cfg.run.inr.omega0 = 15.0;
  cfg.run.optimizer = coggen::optimizer_kind::adam;
  cfg.run.learning_rate = 1e-5;
  cfg.run.log_every = 10;
  cfg.run.seed = 0;
  cfg.run.curriculum.w1 = 0.85;
  cfg.run.curriculum.w2 = 0.6;
  cfg.run.curriculum.r0 = 15.8;  // ~0.35 of the max k-space radius at 64x64
  return cfg;
}

std::size_t arm_index(const coggen::ablation_report& rep, const std::string& name) {
  for (std::size_t i = 0; i < rep.arms.size(); ++i)
    if (rep.arms[i] == name) return i;
  coggen::fail(coggen::errc::bad_inputs, "missing arm " + name);
}

void criteria_9_and_10() {
  const std::string desc9 =
      "curriculum beats vanilla: final error on >= 4/5 seeds, 0.8x speed-to-best on >= 3/5";
  const std::string desc10 =
      "mean final error orders dual <= min(student, teacher) <= uniform over 5 seeds";
  try {
    const std::size_t n_seeds = 5;
    std::fprintf(stderr, "benchmark: 4 arms x %zu seeds, 4000 iterations each...\n", n_seeds);
    const coggen::ablation_report rep =
        coggen::run_ablation(coggen::ablation_suite::mode_weighting, benchmark_config(), n_seeds);

    const std::size_t iu = arm_index(rep, "UNIFORM");
    const std::size_t it = arm_index(rep, "TEACHER_ONLY");
    const std::size_t is = arm_index(rep, "STUDENT_ONLY");
    const std::size_t id = arm_index(rep, "DUAL");

    // criterion 9: DUAL vs UNIFORM (= vanilla fitting, weights are all ones)
    std::size_t final_wins = 0, speed_wins = 0;
    std::string per_seed;
    for (std::size_t s = 0; s < n_seeds; ++s) {
      const coggen::ablation_run& u = rep.runs[iu * n_seeds + s];
      const coggen::ablation_run& d = rep.runs[id * n_seeds + s];
      const bool fw = !d.diverged && !u.diverged && d.final_rlne <= u.final_rlne;
      if (fw) ++final_wins;

      bool sw = false;
      if (!d.diverged && !u.diverged && std::isfinite(u.best_rlne)) {
        for (const coggen::curve_point& p : d.curve) {
          if (std::isfinite(p.rlne_roi) && p.rlne_roi <= u.best_rlne) {
            sw = static_cast<double>(p.iteration) <=
                 0.8 * static_cast<double>(u.iters_to_best);
            break;
          }
        }
      }
      if (sw) ++speed_wins;
      per_seed += (per_seed.empty() ? "seed " : "; seed ") + std::to_string(s) + ": " +
                  fmt(d.final_rlne) + (fw ? " <= " : " > ") + fmt(u.final_rlne) +
                  (sw ? ", fast" : ", slow");
    }
    record(9, final_wins >= 4 && speed_wins >= 3, desc9,
           std::to_string(final_wins) + "/5 final wins, " + std::to_string(speed_wins) +
               "/5 speed wins; " + per_seed);

    // criterion 10: arm means, single-seed inversions logged but tolerated
    const std::vector<coggen::arm_summary> sums = coggen::summarize(rep);
    double mu = 0, mt = 0, ms = 0, md = 0;
    std::size_t diverged = 0;
    for (const coggen::arm_summary& a : sums) {
      if (a.arm == "UNIFORM") mu = a.mean_final_rlne;
      if (a.arm == "TEACHER_ONLY") mt = a.mean_final_rlne;
      if (a.arm == "STUDENT_ONLY") ms = a.mean_final_rlne;
      if (a.arm == "DUAL") md = a.mean_final_rlne;
      diverged += a.diverged;
    }
    std::size_t inversions = 0;
    for (std::size_t s = 0; s < n_seeds; ++s) {
      const double du = rep.runs[iu * n_seeds + s].final_rlne;
      const double dt = rep.runs[it * n_seeds + s].final_rlne;
      const double ds = rep.runs[is * n_seeds + s].final_rlne;
      const double dd = rep.runs[id * n_seeds + s].final_rlne;
      if (!(dd <= std::min(ds, dt) && std::min(ds, dt) <= du)) ++inversions;
    }
    const bool ordered = std::isfinite(md) && std::isfinite(ms) && std::isfinite(mt) &&
                         std::isfinite(mu) && md <= std::min(ms, mt) &&
                         std::min(ms, mt) <= mu && diverged == 0;
    record(10, ordered, desc10,
           "means: dual " + fmt(md) + ", student " + fmt(ms) + ", teacher " + fmt(mt) +
               ", uniform " + fmt(mu) + "; per-seed inversions " +
               std::to_string(inversions) + "/5 (logged, tolerated)");
  } catch (const std::exception& e) {
    record(9, false, desc9, std::string("exception: ") + e.what());
    record(10, false, desc10, std::string("exception: ") + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  bool fast = false, benchmark = false;
  std::string cli;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--fast") {
      fast = true;
    } else if (arg == "--benchmark") {
      benchmark = true;
    } else if (arg == "--cli" && i + 1 < argc) {
      cli = argv[++i];
    } else {
      std::fprintf(stderr, "usage: %s [--fast | --benchmark] [--cli PATH]\n", argv[0]);
      return 2;
    }
  }
  const bool run_fast = fast || !benchmark;
  const bool run_benchmark = benchmark || !fast;

  if (run_fast) {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criteria_5_to_8();
  }
  if (run_benchmark) criteria_9_and_10();
  if (run_fast) {
    criterion_11();
    criterion_12(cli);
  }

  if (g_failures == 0) {
    std::printf("all criteria passed\n");
    return 0;
  }
  std::printf("%d criterion(s) failed\n", g_failures);
  return 1;
}
