#include <doctest.h>

#include <cmath>

#include "mipseg/annotate.hpp"
#include "mipseg/phantom.hpp"
#include "oracles.hpp"

using namespace mipseg;

TEST_CASE("generation is deterministic under the seed") {
  PhantomConfig cfg;
  cfg.dims = {12, 16, 16};
  cfg.tube_count = 2;
  cfg.clutter_blob_count = 3;
  cfg.rng_seed = 99;
  Phantom a = generate(cfg);
  Phantom b = generate(cfg);
  CHECK(a.image.data == b.image.data);
  REQUIRE(a.centerlines.lines.size() == b.centerlines.lines.size());
  for (std::size_t l = 0; l < a.centerlines.lines.size(); ++l) {
    const auto& pa = a.centerlines.lines[l].points;
    const auto& pb = b.centerlines.lines[l].points;
    REQUIRE(pa.size() == pb.size());
    for (std::size_t p = 0; p < pa.size(); ++p) {
      CHECK(pa[p].x == pb[p].x);
      CHECK(pa[p].y == pb[p].y);
      CHECK(pa[p].z == pb[p].z);
    }
  }
  cfg.rng_seed = 100;
  Phantom c = generate(cfg);
  CHECK(a.image.data != c.image.data);
}

TEST_CASE("a straight tube renders to the closed-form Gaussian profile") {
  ScalarVolume vol({9, 9, 20}, 0.0);
  Polyline line;
  line.points = {{4, 4, 2}, {4, 4, 17}};
  const double radius = 2.0, peak = 0.9;
  render_tube(vol, line, radius, peak);
  const double sigma = radius / 2.0;
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j)
      for (int k = 0; k < 20; ++k) {
        double dk = k < 2 ? 2.0 - k : (k > 17 ? k - 17.0 : 0.0);
        double d2 = double(i - 4) * (i - 4) + double(j - 4) * (j - 4) + dk * dk;
        double want = d2 <= 9 * sigma * sigma
                          ? peak * std::exp(-d2 / (2 * sigma * sigma))
                          : 0.0;
        CHECK(vol.at(i, j, k) == doctest::Approx(want).epsilon(1e-12));
      }
}

TEST_CASE("generated volumes stay in [0,1] and carry one line per tube") {
  PhantomConfig cfg;
  cfg.dims = {12, 20, 20};
  cfg.tube_count = 4;
  cfg.noise_sigma = 0.2;
  cfg.clutter_blob_count = 5;
  cfg.rng_seed = 5;
  Phantom ph = generate(cfg);
  CHECK(ph.centerlines.lines.size() == 4);
  for (double v : ph.image.data) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("rasterized centerlines land on bright voxels") {
  PhantomConfig cfg;
  cfg.dims = {16, 24, 24};
  cfg.tube_count = 3;
  cfg.radius_min = 1.5;
  cfg.radius_max = 2.5;
  cfg.noise_sigma = 0.0;  // pre-noise intensities
  cfg.clutter_blob_count = 0;
  cfg.rng_seed = 31;
  Phantom ph = generate(cfg);
  LabelVolume fg = rasterize(ph.centerlines, cfg.dims, 1);
  std::int64_t total = 0, bright = 0;
  for (std::size_t p = 0; p < fg.data.size(); ++p) {
    if (fg.data[p] != kForeground) continue;
    ++total;
    bright += ph.image.data[p] >= cfg.intensity / 2.0;
  }
  REQUIRE(total > 0);
  CHECK(double(bright) / double(total) >= 0.95);
}

TEST_CASE("invalid configs are rejected") {
  PhantomConfig cfg;
  cfg.dims = {8, 8, 8};
  cfg.radius_min = -1;
  CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
  cfg = PhantomConfig{};
  cfg.dims = {8, 8, 8};
  cfg.radius_max = 4.0;  // > min(dims)/4
  CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
  cfg = PhantomConfig{};
  cfg.dims = {8, 8, 8};
  cfg.intensity = 0.0;
  CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
  cfg = PhantomConfig{};
  cfg.dims = {8, 8, 8};
  cfg.tube_count = 0;
  CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
}
