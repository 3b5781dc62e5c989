#include <catch2/catch_amalgamated.hpp>

#include "coggen/coggen.hpp"

// Capacity check: with full sampling and no noise the generator must be able
// to drive the reconstruction error low on the standard head phantom. Slow by
// design; runs under the "slow" ctest label.
TEST_CASE("fully sampled noiseless fit reaches under five percent error") {
  coggen::phantom_spec ps;
  ps.kind = coggen::phantom_kind::shepp_logan;
  ps.height = 64;
  ps.width = 64;
  const coggen::complex_grid gt = coggen::gen_phantom(ps);

  const coggen::sampling_mask mask =
      coggen::gen_vd_mask(64, 64, coggen::mask_pattern::full, 1.0, 0.0, 0);
  const coggen::measurement_set y = coggen::apply_forward(mask, gt);

  coggen::run_config rc;
  rc.inr.hidden_layers = 4;
  rc.inr.hidden_width = 128;
  rc.inr.fourier_features = 32;
  rc.inr.fourier_scale = 10.0;
  rc.inr.omega0 = 30.0;
  rc.optimizer = coggen::optimizer_kind::adam;
  rc.learning_rate = 1e-3;
  rc.seed = 0;
  rc.log_every = 500;
  rc.vanilla_mode = true;
  rc.curriculum.k1 = 1;
  rc.curriculum.k2 = {5000};

  const coggen::recon_result res = coggen::reconstruct(rc, mask, y, &gt);
  REQUIRE_FALSE(res.diverged);
  REQUIRE(res.iterations_run == 5000);

  const coggen::roi_mask roi = coggen::default_roi(gt);
  const double err = coggen::rlne_roi(gt, res.image, roi);
  INFO("final relative error " << err);
  REQUIRE(err < 0.05);
}
