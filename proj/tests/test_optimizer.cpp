#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "coggen/coggen.hpp"
#include "oracles.hpp"

using coggen::optimizer_kind;
using coggen::optimizer_state;
using coggen::run_config;

namespace {

struct small_problem {
  coggen::sampling_mask mask;
  coggen::measurement_set y;
  coggen::complex_grid gt;
};

small_problem make_problem(std::uint64_t seed) {
  small_problem p;
  p.mask = coggen::gen_vd_mask(8, 8, coggen::mask_pattern::vd2d, 2.0, 0.1, seed);
  p.gt = coggen::gen_phantom({coggen::phantom_kind::checker_smooth, 8, 8,
                              coggen::phase_mode::zero, seed});
  p.y = coggen::apply_forward(p.mask, p.gt);
  return p;
}

run_config base_run() {
  run_config rc;
  rc.inr.hidden_layers = 2;
  rc.inr.hidden_width = 8;
  rc.inr.fourier_features = 4;
  rc.inr.fourier_scale = 3.0;
  rc.curriculum.k1 = 2;
  rc.curriculum.k2 = {20, 20};
  rc.learning_rate = 1e-3;
  rc.log_every = 1;
  rc.seed = 3;
  return rc;
}

}  // namespace

TEST_CASE("gradient descent applies the plain update") {
  std::vector<double> theta = {1.0, -2.0};
  optimizer_state st;
  coggen::optimizer_step(theta, {0.0, 0.0}, st, optimizer_kind::gd, 0.1);
  REQUIRE(theta == std::vector<double>{1.0, -2.0});

  theta = {1.0};
  coggen::optimizer_step(theta, {2.0}, st, optimizer_kind::gd, 0.1);
  REQUIRE(theta[0] == Catch::Approx(0.8).margin(1e-15));
}

TEST_CASE("adam matches the hand-stepped reference") {
  std::vector<double> theta = {1.0, -0.5, 0.25};
  std::vector<double> ref_theta = theta;
  optimizer_state st;
  oracle::adam_ref ref;

  for (std::uint64_t step = 0; step < 5; ++step) {
    const std::vector<double> g = oracle::random_reals(3, 40 + step, -1.0, 1.0);
    coggen::optimizer_step(theta, g, st, optimizer_kind::adam, 1e-2, 0.9, 0.999, 1e-8);
    ref.apply(ref_theta, g, 1e-2, 0.9, 0.999, 1e-8);
    for (std::size_t i = 0; i < 3; ++i)
      REQUIRE(theta[i] == Catch::Approx(ref_theta[i]).margin(1e-15));
  }

  // first-step magnitude is ~lr per coordinate regardless of gradient scale
  std::vector<double> fresh = {0.0};
  optimizer_state st2;
  coggen::optimizer_step(fresh, {123.0}, st2, optimizer_kind::adam, 1e-2);
  REQUIRE(std::abs(fresh[0] + 1e-2) < 1e-9);
}

TEST_CASE("non-finite gradients are rejected") {
  std::vector<double> theta = {1.0};
  optimizer_state st;
  REQUIRE(oracle::throws_code(
      [&] {
        coggen::optimizer_step(theta, {std::numeric_limits<double>::quiet_NaN()}, st,
                               optimizer_kind::gd, 0.1);
      },
      coggen::errc::non_finite));
}

TEST_CASE("all-admitting thresholds reproduce vanilla fitting iterate-for-iterate") {
  const small_problem p = make_problem(2);

  run_config vanilla = base_run();
  vanilla.curriculum.k2 = {50, 50};
  vanilla.vanilla_mode = true;
  const coggen::recon_result a = coggen::reconstruct(vanilla, p.mask, p.y, &p.gt);

  run_config open = base_run();
  open.curriculum.k2 = {50, 50};
  open.curriculum.w1 = 1.0;
  open.curriculum.w2 = 1.0;
  open.curriculum.lambda0 = 1e9;
  open.curriculum.r0 = 1e9;
  const coggen::recon_result b = coggen::reconstruct(open, p.mask, p.y, &p.gt);

  REQUIRE(a.iterations_run == 100);
  REQUIRE(b.iterations_run == 100);
  REQUIRE(a.curve.size() == b.curve.size());
  for (std::size_t i = 0; i < a.curve.size(); ++i) {
    REQUIRE(a.curve[i].iteration == b.curve[i].iteration);
    REQUIRE(std::abs(a.curve[i].loss - b.curve[i].loss) <=
            1e-12 * std::max(1.0, std::abs(a.curve[i].loss)));
  }
  REQUIRE(coggen::max_abs_diff(a.image, b.image) <= 1e-12);
}

TEST_CASE("reconstruction is deterministic given the seed") {
  const small_problem p = make_problem(5);
  run_config rc = base_run();
  const coggen::recon_result a = coggen::reconstruct(rc, p.mask, p.y, &p.gt);
  const coggen::recon_result b = coggen::reconstruct(rc, p.mask, p.y, &p.gt);
  REQUIRE(a.curve.size() == b.curve.size());
  for (std::size_t i = 0; i < a.curve.size(); ++i) {
    REQUIRE(a.curve[i].loss == b.curve[i].loss);
    REQUIRE(a.curve[i].rlne_roi == b.curve[i].rlne_roi);
  }
  REQUIRE(a.image.data == b.image.data);

  rc.seed = 6;  // a different init must change the trajectory
  const coggen::recon_result c = coggen::reconstruct(rc, p.mask, p.y, &p.gt);
  REQUIRE(a.image.data != c.image.data);
}

TEST_CASE("the run spends the exact inner budget") {
  const small_problem p = make_problem(7);
  run_config rc = base_run();
  rc.curriculum.k1 = 3;
  rc.curriculum.k2 = {7, 11, 13};
  const coggen::recon_result r = coggen::reconstruct(rc, p.mask, p.y, &p.gt);
  REQUIRE_FALSE(r.diverged);
  REQUIRE(r.iterations_run == 31);
  REQUIRE(r.curve.back().iteration == 31);  // final post-training point
  REQUIRE(r.weights_per_stage.size() == 3);
  REQUIRE(r.stage_seconds.size() == 3);
}

TEST_CASE("weights are stage-constant and drawn from the four-product set") {
  const small_problem p = make_problem(9);
  run_config rc = base_run();
  rc.curriculum.k1 = 3;
  rc.curriculum.k2 = {10, 10, 10};
  rc.curriculum.w1 = 0.9;
  rc.curriculum.w2 = 0.8;
  const coggen::recon_result r = coggen::reconstruct(rc, p.mask, p.y, &p.gt);

  const double w1 = 0.9, w2 = 0.8;
  const std::set<double> allowed = {w1 * w2, w1 * (1.0 - w2), (1.0 - w1) * w2,
                                    (1.0 - w1) * (1.0 - w2)};
  for (const coggen::weight_vector& w : r.weights_per_stage)
    for (double v : w.v) {
      REQUIRE(v > 0.0);
      bool found = false;
      for (double a : allowed) found = found || std::abs(v - a) < 1e-15;
      REQUIRE(found);
    }

  // final stage admits everything on the teacher side: t = w2 uniformly
  for (double t : r.weights_per_stage.back().t) REQUIRE(t == w2);
}

TEST_CASE("curve is finite and sampled at the logging cadence") {
  const small_problem p = make_problem(11);
  run_config rc = base_run();
  rc.curriculum.k1 = 2;
  rc.curriculum.k2 = {25, 25};
  rc.log_every = 10;
  const coggen::recon_result r = coggen::reconstruct(rc, p.mask, p.y, &p.gt);
  REQUIRE_FALSE(r.diverged);

  std::size_t prev = 0;
  for (std::size_t i = 0; i < r.curve.size(); ++i) {
    const coggen::curve_point& pt = r.curve[i];
    REQUIRE(std::isfinite(pt.loss));
    REQUIRE(std::isfinite(pt.rlne_roi));
    REQUIRE(std::isfinite(pt.psnr_db));
    REQUIRE(pt.stage >= 1);
    REQUIRE(pt.stage <= 2);
    if (i > 0) {
      REQUIRE(pt.iteration > prev);
      REQUIRE(pt.iteration - prev <= 10);
    }
    prev = pt.iteration;
  }
  REQUIRE(r.curve.front().iteration == 0);
  REQUIRE(r.curve.back().iteration == 50);
}

TEST_CASE("gd mode also drives the reconstruction") {
  const small_problem p = make_problem(13);
  run_config rc = base_run();
  rc.optimizer = optimizer_kind::gd;
  rc.learning_rate = 1e-2;
  rc.curriculum.k2 = {10, 10};
  const coggen::recon_result r = coggen::reconstruct(rc, p.mask, p.y, &p.gt);
  REQUIRE_FALSE(r.diverged);
  REQUIRE(r.iterations_run == 20);
}

TEST_CASE("a blown-up run reports divergence with a partial curve") {
  const small_problem p = make_problem(15);
  run_config rc = base_run();
  rc.optimizer = optimizer_kind::gd;
  rc.learning_rate = 1e8;  // absurd on purpose
  rc.curriculum.k2 = {200, 200};
  const coggen::recon_result r = coggen::reconstruct(rc, p.mask, p.y, &p.gt);
  REQUIRE(r.diverged);
  REQUIRE(r.iterations_run < 400);
  for (const coggen::curve_point& pt : r.curve) REQUIRE(std::isfinite(pt.loss));
}
