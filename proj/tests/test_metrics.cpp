#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "coggen/coggen.hpp"
#include "oracles.hpp"

using coggen::cdouble;
using coggen::complex_grid;
using coggen::roi_mask;

namespace {

roi_mask all_of(std::size_t h, std::size_t w) { return coggen::full_roi(h, w); }

}  // namespace

TEST_CASE("rlne is zero on a perfect reconstruction and one against zero") {
  const complex_grid x = oracle::random_grid(6, 6, 50);
  const roi_mask roi = all_of(6, 6);
  REQUIRE(coggen::rlne_roi(x, x, roi) == 0.0);

  const complex_grid zero(6, 6);
  REQUIRE(coggen::rlne_roi(x, zero, roi) == Catch::Approx(1.0).margin(1e-15));
}

TEST_CASE("two-pixel hand example: rlne 1/sqrt(2), psnr 20 log10 sqrt(2)") {
  complex_grid x(1, 2), xh(1, 2);
  x.at(0, 0) = 1.0;
  x.at(0, 1) = 1.0;
  xh.at(0, 0) = 1.0;
  xh.at(0, 1) = 0.0;
  const roi_mask roi = all_of(1, 2);

  REQUIRE(std::abs(coggen::rlne_roi(x, xh, roi) - 1.0 / std::sqrt(2.0)) < 1e-12);
  REQUIRE(std::abs(coggen::psnr_roi(x, xh, roi) - 20.0 * std::log10(std::sqrt(2.0))) < 1e-12);
}

TEST_CASE("psnr caps the zero-error sentinel at 300 dB") {
  const complex_grid x = oracle::random_grid(4, 4, 51);
  REQUIRE(coggen::psnr_roi(x, x, all_of(4, 4)) == 300.0);
}

TEST_CASE("psnr arithmetic: peak 1 and rmse 0.01 give 40 dB") {
  complex_grid x(1, 2), xh(1, 2);
  x.at(0, 0) = 1.0;
  x.at(0, 1) = 1.0;
  xh.at(0, 0) = cdouble(0.99, 0.0);
  xh.at(0, 1) = cdouble(1.01, 0.0);
  REQUIRE(std::abs(coggen::psnr_roi(x, xh, all_of(1, 2)) - 40.0) < 1e-12);
}

TEST_CASE("metrics match the direct-sum oracle on random pairs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const complex_grid x = oracle::random_grid(8, 8, 500 + seed);
    const complex_grid xh = oracle::random_grid(8, 8, 600 + seed);
    const roi_mask roi = all_of(8, 8);
    REQUIRE(coggen::rlne_roi(x, xh, roi) ==
            Catch::Approx(oracle::rlne(x, xh, roi)).epsilon(1e-13));
    REQUIRE(coggen::psnr_roi(x, xh, roi) ==
            Catch::Approx(oracle::psnr(x, xh, roi)).epsilon(1e-13));
  }
}

TEST_CASE("rlne is scale equivariant") {
  const roi_mask roi = all_of(8, 8);

  // power-of-two scaling is lossless in floating point: identical bits
  const complex_grid x = oracle::random_grid(8, 8, 52);
  const complex_grid xh = oracle::random_grid(8, 8, 53);
  complex_grid x4 = x, xh4 = xh;
  for (cdouble& z : x4.data) z *= 4.0;
  for (cdouble& z : xh4.data) z *= 4.0;
  REQUIRE(coggen::rlne_roi(x4, xh4, roi) == coggen::rlne_roi(x, xh, roi));

  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const complex_grid a = oracle::random_grid(8, 8, 700 + trial);
    const complex_grid b = oracle::random_grid(8, 8, 800 + trial);
    const double base = coggen::rlne_roi(a, b, roi);
    const double mag = oracle::random_reals(1, 900 + trial, 0.1, 10.0)[0];
    const double ang = oracle::random_reals(1, 950 + trial, -oracle::pi, oracle::pi)[0];
    const cdouble c = mag * cdouble(std::cos(ang), std::sin(ang));
    complex_grid ca = a, cb = b;
    for (cdouble& z : ca.data) z *= c;
    for (cdouble& z : cb.data) z *= c;
    REQUIRE(coggen::rlne_roi(ca, cb, roi) == Catch::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("psnr strictly decreases when one pixel gets worse") {
  const complex_grid x = oracle::random_grid(6, 6, 54);
  complex_grid xh = oracle::random_grid(6, 6, 55);
  const roi_mask roi = all_of(6, 6);
  const double before = coggen::psnr_roi(x, xh, roi);
  xh.at(3, 3) = x.at(3, 3) + 10.0 * (xh.at(3, 3) - x.at(3, 3));
  REQUIRE(coggen::psnr_roi(x, xh, roi) < before);
}

TEST_CASE("roi restriction only counts inside pixels") {
  complex_grid x(2, 2), xh(2, 2);
  x.at(0, 0) = 1.0;
  x.at(1, 1) = 1.0;
  xh = x;
  xh.at(1, 1) = 5.0;  // wrong, but outside the roi
  roi_mask roi;
  roi.height = 2;
  roi.width = 2;
  roi.inside = {1, 0, 0, 0};
  REQUIRE(coggen::rlne_roi(x, xh, roi) == 0.0);
  REQUIRE(coggen::psnr_roi(x, xh, roi) == 300.0);
}

TEST_CASE("default roi keeps pixels above five percent of the peak") {
  complex_grid gt(2, 2);
  gt.at(0, 0) = 1.0;
  gt.at(0, 1) = 0.04;   // below the cut
  gt.at(1, 0) = 0.051;  // above
  gt.at(1, 1) = 0.0;
  const roi_mask roi = coggen::default_roi(gt);
  REQUIRE(roi.inside == std::vector<std::uint8_t>{1, 0, 1, 0});
}

TEST_CASE("empty reference is rejected") {
  const complex_grid zero(3, 3);
  const complex_grid xh = oracle::random_grid(3, 3, 56);
  REQUIRE(oracle::throws_code([&] { (void)coggen::rlne_roi(zero, xh, all_of(3, 3)); },
                              coggen::errc::zero_reference));
}
