#include <doctest.h>

#include <cmath>

#include "mipseg/loss.hpp"
#include "oracles.hpp"

using namespace mipseg;

TEST_CASE("cross entropy term") {
  CHECK(cross_entropy_term(0.7, kForeground) == doctest::Approx(0.356675).epsilon(1e-5));
  CHECK(cross_entropy_term(0.7, kBackground) == doctest::Approx(1.203973).epsilon(1e-5));
  CHECK(cross_entropy_term(0.123, kIgnore) == 0.0);
  CHECK(cross_entropy_term(0.0, kForeground) == doctest::Approx(-std::log(1e-7)));
  CHECK_THROWS_AS(cross_entropy_term(-0.1, kForeground), std::invalid_argument);
  CHECK_THROWS_AS(cross_entropy_term(1.1, kBackground), std::invalid_argument);
}

TEST_CASE("loss3d on a single voxel") {
  ScalarVolume pred({1, 1, 1});
  pred.data[0] = 0.7;
  LabelVolume labels({1, 1, 1});
  labels.data[0] = kForeground;
  LossResult r = loss3d(pred, labels, Normalization::kSum);
  CHECK(r.report.total == doctest::Approx(0.356675).epsilon(1e-5));
  CHECK(r.gradient.data[0] == doctest::Approx(-1.428571).epsilon(1e-5));
  CHECK(r.report.labeled_pixel_count == 1);
}

TEST_CASE("loss3d ignores ignore voxels") {
  Rng rng(3);
  ScalarVolume pred = oracle::random_volume(rng, {2, 2, 2});
  LabelVolume labels({2, 2, 2}, kIgnore);
  for (auto norm : {Normalization::kSum, Normalization::kMeanOverLabeled}) {
    LossResult r = loss3d(pred, labels, norm);
    CHECK(r.report.total == 0.0);
    CHECK(r.report.labeled_pixel_count == 0);
    for (double g : r.gradient.data) CHECK(g == 0.0);
  }
}

TEST_CASE("loss3d rejects mismatched dims") {
  ScalarVolume pred({2, 2, 2});
  LabelVolume labels({2, 2, 3});
  CHECK_THROWS_AS(loss3d(pred, labels), std::invalid_argument);
}

TEST_CASE("loss_mip worked single-ray examples") {
  ScalarVolume pred({3, 1, 1});
  pred.data = {0.2, 0.7, 0.4};

  LabelImage img(Axis::x, {1, 1});
  SUBCASE("foreground pixel") {
    img.at(0, 0) = kForeground;
    LossResult r =
        loss_mip(pred, make_mip_set(pred.dims, {img}), Normalization::kSum);
    CHECK(r.report.total == doctest::Approx(0.356675).epsilon(1e-5));
    CHECK(r.gradient.data[0] == 0.0);
    CHECK(r.gradient.data[1] == doctest::Approx(-1.428571).epsilon(1e-5));
    CHECK(r.gradient.data[2] == 0.0);
  }
  SUBCASE("background pixel") {
    img.at(0, 0) = kBackground;
    LossResult r =
        loss_mip(pred, make_mip_set(pred.dims, {img}), Normalization::kSum);
    CHECK(r.report.total == doctest::Approx(1.203973).epsilon(1e-5));
    CHECK(r.gradient.data[1] == doctest::Approx(3.333333).epsilon(1e-5));
    CHECK(r.gradient.data[0] == 0.0);
    CHECK(r.gradient.data[2] == 0.0);
  }
}

TEST_CASE("perfect predictions give (clamped) near-zero projection loss") {
  // One fg voxel per axis-0 ray max at 1.0 and 0 elsewhere; consistent
  // annotations; only the clamp keeps the loss from being exactly 0.
  Dims3 dims{4, 4, 4};
  LabelVolume scene(dims);
  scene.at(1, 0, 0) = kForeground;
  scene.at(2, 3, 3) = kForeground;
  ScalarVolume pred(dims, 0.0);
  pred.at(1, 0, 0) = 1.0;
  pred.at(2, 3, 3) = 1.0;
  std::vector<LabelImage> entries;
  for (Axis a : {Axis::x, Axis::y, Axis::z}) {
    BinaryImage fg = project_labels_any(scene, a, {kForeground});
    LabelImage img(a, fg.dims);
    for (std::size_t p = 0; p < fg.data.size(); ++p)
      img.data[p] = fg.data[p] ? kForeground : kBackground;
    entries.push_back(img);
  }
  LossResult r = loss_mip(pred, make_mip_set(dims, std::move(entries)),
                          Normalization::kSum);
  CHECK(r.report.total < 1e-5);
  CHECK(r.report.total >= 0.0);
}

TEST_CASE("loss_mip per-axis decomposition and additivity in Sum mode") {
  Rng rng(11);
  Dims3 dims{4, 3, 5};
  ScalarVolume pred = oracle::random_volume(rng, dims, 0.05, 0.95);
  LabelImage ax = oracle::random_label_image(rng, Axis::x, image_dims(dims, Axis::x));
  LabelImage ay = oracle::random_label_image(rng, Axis::y, image_dims(dims, Axis::y));

  LossResult both = loss_mip(pred, make_mip_set(dims, {ax, ay}), Normalization::kSum);
  LossResult only_x = loss_mip(pred, make_mip_set(dims, {ax}), Normalization::kSum);
  LossResult only_y = loss_mip(pred, make_mip_set(dims, {ay}), Normalization::kSum);

  CHECK(both.report.total ==
        doctest::Approx(only_x.report.total + only_y.report.total).epsilon(1e-12));
  REQUIRE(both.report.per_axis.size() == 2);
  CHECK(both.report.per_axis[0].second == doctest::Approx(only_x.report.total));
  CHECK(both.report.per_axis[1].second == doctest::Approx(only_y.report.total));
  for (std::size_t p = 0; p < pred.data.size(); ++p)
    CHECK(both.gradient.data[p] ==
          doctest::Approx(only_x.gradient.data[p] + only_y.gradient.data[p]));
}

TEST_CASE("loss_mip gradient sparsity and carving direction") {
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    Dims3 dims = oracle::random_dims(rng, 2, 6);
    ScalarVolume pred = oracle::random_volume(rng, dims, 0.05, 0.95);
    MipAnnotationSet mips = oracle::random_mip_set(rng, dims, 1 + int(rng.bounded(3)));
    LossResult r = loss_mip(pred, mips, Normalization::kSum);

    std::int64_t nonzero = 0;
    for (double g : r.gradient.data) nonzero += g != 0.0;
    CHECK(nonzero <= r.report.labeled_pixel_count);

    // a bg-only annotation set pushes every gradient up (carving)
    MipAnnotationSet bg_only = mips;
    for (auto& e : bg_only.entries)
      for (auto& l : e.data) l = l == kForeground ? kBackground : l;
    LossResult rb = loss_mip(pred, bg_only, Normalization::kSum);
    for (double g : rb.gradient.data) CHECK(g >= 0.0);
  }
}

TEST_CASE("loss_slices restriction") {
  Rng rng(17);
  Dims3 dims{3, 2, 2};
  ScalarVolume pred = oracle::random_volume(rng, dims, 0.05, 0.95);
  LabelVolume labels = oracle::random_labels(rng, dims);

  SUBCASE("empty set") {
    LossResult r = loss_slices(pred, labels, Axis::x, {});
    CHECK(r.report.total == 0.0);
    for (double g : r.gradient.data) CHECK(g == 0.0);
  }
  SUBCASE("all slices equals loss3d") {
    for (auto norm : {Normalization::kSum, Normalization::kMeanOverLabeled}) {
      LossResult full = loss3d(pred, labels, norm);
      LossResult sl = loss_slices(pred, labels, Axis::x, {0, 1, 2}, norm);
      CHECK(sl.report.total == doctest::Approx(full.report.total));
      CHECK(sl.gradient.data == full.gradient.data);
    }
  }
  SUBCASE("single slice equals crop-then-loss, embedded") {
    LossResult sl = loss_slices(pred, labels, Axis::x, {0}, Normalization::kSum);
    ScalarVolume pc = crop(pred, {0, 0, 0}, {1, 2, 2});
    LabelVolume lc = crop(labels, {0, 0, 0}, {1, 2, 2});
    LossResult cr = loss3d(pc, lc, Normalization::kSum);
    CHECK(sl.report.total == doctest::Approx(cr.report.total));
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        CHECK(sl.gradient.at(0, j, k) == cr.gradient.at(0, j, k));
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        CHECK(sl.gradient.at(1, j, k) == 0.0);
        CHECK(sl.gradient.at(2, j, k) == 0.0);
      }
  }
  SUBCASE("out-of-range index") {
    CHECK_THROWS_AS(loss_slices(pred, labels, Axis::x, {3}), std::invalid_argument);
    CHECK_THROWS_AS(loss_slices(pred, labels, Axis::x, {-1}), std::invalid_argument);
  }
}

TEST_CASE("analytic gradients match finite differences") {
  Rng rng(23);
  const double h = 1e-4;
  for (int trial = 0; trial < 8; ++trial) {
    Dims3 dims = oracle::random_dims(rng, 3, 6);
    ScalarVolume pred = oracle::tie_free_volume(rng, dims);
    LabelVolume labels = oracle::random_labels(rng, dims);
    MipAnnotationSet mips = oracle::random_mip_set(rng, dims, 1 + int(rng.bounded(3)));
    std::vector<int> slices = {0, dims.d0 - 1};

    for (auto norm : {Normalization::kSum, Normalization::kMeanOverLabeled}) {
      auto check = [&](const LossResult& res,
                       const std::function<double(const ScalarVolume&)>& f) {
        ScalarVolume fd = oracle::fd_gradient(pred, f, h);
        for (std::size_t p = 0; p < fd.data.size(); ++p)
          CHECK(oracle::rel_err(res.gradient.data[p], fd.data[p]) < 1e-4);
      };
      check(loss3d(pred, labels, norm),
            [&](const ScalarVolume& x) { return loss3d(x, labels, norm).report.total; });
      check(loss_mip(pred, mips, norm),
            [&](const ScalarVolume& x) { return loss_mip(x, mips, norm).report.total; });
      check(loss_slices(pred, labels, Axis::x, slices, norm),
            [&](const ScalarVolume& x) {
              return loss_slices(x, labels, Axis::x, slices, norm).report.total;
            });
    }
  }
}

TEST_CASE("report formatting") {
  LossReport r;
  r.total = 1.5;
  r.per_axis = {{Axis::x, 1.0}, {Axis::z, 0.5}};
  r.labeled_pixel_count = 7;
  std::string s = format_loss_report(r);
  CHECK(s == "loss_total=1.5\nloss_axis0=1\nloss_axis2=0.5\nlabeled_pixels=7\n");
}
