// Brute-force reference implementations the tests check the library
// against. Everything here is deliberately naive and independent of the
// library's computation paths.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <vector>

#include "mipseg/carve.hpp"
#include "mipseg/project.hpp"
#include "mipseg/rng.hpp"
#include "mipseg/score.hpp"
#include "mipseg/volume.hpp"

namespace oracle {

using namespace mipseg;

// Per-ray scan: max value and first maximizer along `axis`.
inline void mip_scan(const ScalarVolume& v, Axis axis, int p, int q,
                     double* best, int* arg) {
  int len = v.dims[axis_index(axis)];
  *best = -1e300;
  *arg = 0;
  for (int r = 0; r < len; ++r) {
    auto [i, j, k] = ray_voxel(axis, p, q, r);
    double val = v.at(i, j, k);
    if (val > *best) {
      *best = val;
      *arg = r;
    }
  }
}

inline bool any_on_ray(const LabelVolume& v, Axis axis, int p, int q,
                       const std::set<std::uint8_t>& pos) {
  int len = v.dims[axis_index(axis)];
  for (int r = 0; r < len; ++r) {
    auto [i, j, k] = ray_voxel(axis, p, q, r);
    if (pos.count(v.at(i, j, k))) return true;
  }
  return false;
}

// Hull by direct conjunction of binarized annotations.
inline bool hull_voxel(const MipAnnotationSet& mips, int i, int j, int k) {
  for (const auto& e : mips.entries) {
    int p, q;
    switch (e.axis) {
      case Axis::x: p = j; q = k; break;
      case Axis::y: p = i; q = k; break;
      default: p = i; q = j; break;
    }
    if (e.at(p, q) == kBackground) return false;
  }
  return true;
}

// Central finite differences of a scalar function of one volume.
inline ScalarVolume fd_gradient(const ScalarVolume& x,
                                const std::function<double(const ScalarVolume&)>& f,
                                double h = 1e-4) {
  ScalarVolume g(x.dims);
  ScalarVolume xp = x;
  for (std::size_t p = 0; p < x.data.size(); ++p) {
    double keep = xp.data[p];
    xp.data[p] = keep + h;
    double fp = f(xp);
    xp.data[p] = keep - h;
    double fm = f(xp);
    xp.data[p] = keep;
    g.data[p] = (fp - fm) / (2 * h);
  }
  return g;
}

inline double rel_err(double a, double b) {
  double denom = std::max({std::abs(a), std::abs(b), 1e-8});
  return std::abs(a - b) / denom;
}

// Exact best F1 over every distinct prediction value used as a >= cut.
inline double exact_max_f1(const ScalarVolume& pred, const LabelVolume& labels) {
  std::vector<std::pair<double, std::uint8_t>> ranked;
  std::int64_t gt_pos = 0;
  for (std::size_t p = 0; p < pred.data.size(); ++p) {
    if (labels.data[p] == kIgnore) continue;
    ranked.emplace_back(pred.data[p], labels.data[p]);
    gt_pos += labels.data[p] == kForeground;
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  double best = 0.0;
  std::int64_t tp = 0, fp = 0;
  for (std::size_t c = 0; c < ranked.size(); ++c) {
    tp += ranked[c].second == kForeground;
    fp += ranked[c].second == kBackground;
    if (c + 1 < ranked.size() && ranked[c + 1].first == ranked[c].first) continue;
    double prec = (tp + fp) > 0 ? double(tp) / double(tp + fp) : 1.0;
    double rec = gt_pos > 0 ? double(tp) / double(gt_pos) : 1.0;
    double f1 = (prec + rec) > 0 ? 2 * prec * rec / (prec + rec) : 0.0;
    best = std::max(best, f1);
  }
  return best;
}

// Brute-force squared Euclidean distance to the nearest positive pixel.
inline std::vector<double> brute_sq_dist(Dims2 dims,
                                         const std::vector<std::uint8_t>& mask) {
  std::vector<double> out(mask.size(), 1e300);
  for (int p = 0; p < dims.a; ++p)
    for (int q = 0; q < dims.b; ++q) {
      double best = 1e300;
      for (int u = 0; u < dims.a; ++u)
        for (int v = 0; v < dims.b; ++v) {
          if (!mask[std::size_t(u) * dims.b + v]) continue;
          double d = double(p - u) * (p - u) + double(q - v) * (q - v);
          best = std::min(best, d);
        }
      out[std::size_t(p) * dims.b + q] = best;
    }
  return out;
}

// --- random instance builders ----------------------------------------------

inline Dims3 random_dims(Rng& rng, int lo = 1, int hi = 8) {
  auto draw = [&] { return lo + int(rng.bounded(std::uint64_t(hi - lo + 1))); };
  return {draw(), draw(), draw()};
}

inline ScalarVolume random_volume(Rng& rng, Dims3 dims, double lo = 0.0,
                                  double hi = 1.0) {
  ScalarVolume v(dims);
  for (double& x : v.data) x = rng.uniform(lo, hi);
  return v;
}

// float32-representable values, for file round-trip checks
inline ScalarVolume random_volume_f32(Rng& rng, Dims3 dims) {
  ScalarVolume v(dims);
  for (double& x : v.data) x = double(float(rng.uniform(-10.0, 10.0)));
  return v;
}

inline LabelVolume random_labels(Rng& rng, Dims3 dims) {
  LabelVolume v(dims);
  for (auto& l : v.data) l = std::uint8_t(rng.bounded(3));
  return v;
}

inline LabelImage random_label_image(Rng& rng, Axis axis, Dims2 dims,
                                     double fg_prob = 0.3, double ig_prob = 0.2) {
  LabelImage img(axis, dims);
  for (auto& l : img.data) {
    double u = rng.uniform01();
    l = u < fg_prob ? kForeground : (u < fg_prob + ig_prob ? kIgnore : kBackground);
  }
  return img;
}

inline MipAnnotationSet random_mip_set(Rng& rng, Dims3 dims, int entries) {
  std::vector<Axis> axes = {Axis::x, Axis::y, Axis::z};
  // random subset of the requested size, order fixed
  while (int(axes.size()) > entries)
    axes.erase(axes.begin() + std::ptrdiff_t(rng.bounded(axes.size())));
  std::vector<LabelImage> imgs;
  for (Axis a : axes)
    imgs.push_back(random_label_image(rng, a, image_dims(dims, a)));
  return make_mip_set(dims, std::move(imgs));
}

// Prediction volume with well-separated values along every ray of every
// axis, so +-h perturbations cannot flip an argmax.
inline ScalarVolume tie_free_volume(Rng& rng, Dims3 dims, double gap = 1e-3) {
  while (true) {
    ScalarVolume v = random_volume(rng, dims, 0.05, 0.95);
    bool ok = true;
    for (int a = 0; a < 3 && ok; ++a) {
      Axis axis = Axis(a);
      Dims2 id = image_dims(dims, axis);
      int len = dims[a];
      for (int p = 0; p < id.a && ok; ++p)
        for (int q = 0; q < id.b && ok; ++q) {
          std::vector<double> ray;
          for (int r = 0; r < len; ++r) {
            auto [i, j, k] = ray_voxel(axis, p, q, r);
            ray.push_back(v.at(i, j, k));
          }
          std::sort(ray.begin(), ray.end());
          for (std::size_t r = 1; r < ray.size(); ++r)
            if (ray[r] - ray[r - 1] < gap) ok = false;
        }
    }
    if (ok) return v;
  }
}

}  // namespace oracle
