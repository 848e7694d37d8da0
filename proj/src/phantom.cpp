#include "mipseg/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "mipseg/rng.hpp"

namespace mipseg {

namespace {

double point_segment_sq(double px, double py, double pz, Vec3 a, Vec3 b) {
  double ux = b.x - a.x, uy = b.y - a.y, uz = b.z - a.z;
  double len2 = ux * ux + uy * uy + uz * uz;
  double t = 0.0;
  if (len2 > 0.0) {
    t = ((px - a.x) * ux + (py - a.y) * uy + (pz - a.z) * uz) / len2;
    t = std::clamp(t, 0.0, 1.0);
  }
  double dx = px - (a.x + t * ux), dy = py - (a.y + t * uy), dz = pz - (a.z + t * uz);
  return dx * dx + dy * dy + dz * dz;
}

void validate(const PhantomConfig& cfg) {
  check_dims(cfg.dims);
  int min_dim = std::min({cfg.dims.d0, cfg.dims.d1, cfg.dims.d2});
  if (cfg.tube_count < 1) throw std::invalid_argument("tube_count must be >= 1");
  if (!(cfg.radius_min > 0) || cfg.radius_max < cfg.radius_min)
    throw std::invalid_argument("invalid tube radius range");
  if (cfg.radius_max > min_dim / 4.0)
    throw std::invalid_argument("tube radius too large for the volume");
  if (!(cfg.intensity > 0) || cfg.intensity > 1)
    throw std::invalid_argument("intensity must be in (0,1]");
  if (cfg.noise_sigma < 0) throw std::invalid_argument("noise_sigma must be >= 0");
  if (cfg.clutter_blob_count < 0)
    throw std::invalid_argument("clutter_blob_count must be >= 0");
}

// Direction perturbed by at most max_turn radians, renormalized.
std::array<double, 3> turn(Rng& rng, std::array<double, 3> dir, double max_turn) {
  auto rnd = rng.unit_vector();
  // component of rnd orthogonal to dir
  double dot = rnd[0] * dir[0] + rnd[1] * dir[1] + rnd[2] * dir[2];
  double ortho[3] = {rnd[0] - dot * dir[0], rnd[1] - dot * dir[1],
                     rnd[2] - dot * dir[2]};
  double on = std::sqrt(ortho[0] * ortho[0] + ortho[1] * ortho[1] +
                        ortho[2] * ortho[2]);
  if (on < 1e-9) return dir;
  double angle = rng.uniform(0.0, max_turn);
  double c = std::cos(angle), s = std::sin(angle) / on;
  return {c * dir[0] + s * ortho[0], c * dir[1] + s * ortho[1],
          c * dir[2] + s * ortho[2]};
}

}  // namespace

void render_tube(ScalarVolume& vol, const Polyline& line, double radius,
                 double peak) {
  const double sigma = radius / 2.0;
  const double cutoff = 3.0 * sigma;
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  auto segment = [&](Vec3 a, Vec3 b) {
    int i0 = std::max(0, int(std::floor(std::min(a.x, b.x) - cutoff)));
    int i1 = std::min(vol.dims.d0 - 1, int(std::ceil(std::max(a.x, b.x) + cutoff)));
    int j0 = std::max(0, int(std::floor(std::min(a.y, b.y) - cutoff)));
    int j1 = std::min(vol.dims.d1 - 1, int(std::ceil(std::max(a.y, b.y) + cutoff)));
    int k0 = std::max(0, int(std::floor(std::min(a.z, b.z) - cutoff)));
    int k1 = std::min(vol.dims.d2 - 1, int(std::ceil(std::max(a.z, b.z) + cutoff)));
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j)
        for (int k = k0; k <= k1; ++k) {
          double d2 = point_segment_sq(i, j, k, a, b);
          if (d2 > cutoff * cutoff) continue;
          double v = peak * std::exp(-d2 * inv2s2);
          double& cell = vol.at(i, j, k);
          cell = std::max(cell, v);
        }
  };
  if (line.points.size() == 1) segment(line.points[0], line.points[0]);
  for (std::size_t s = 0; s + 1 < line.points.size(); ++s)
    segment(line.points[s], line.points[s + 1]);
}

void render_blob(ScalarVolume& vol, Vec3 center, double sigma, double peak) {
  const double cutoff = 3.0 * sigma;
  const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
  int i0 = std::max(0, int(std::floor(center.x - cutoff)));
  int i1 = std::min(vol.dims.d0 - 1, int(std::ceil(center.x + cutoff)));
  int j0 = std::max(0, int(std::floor(center.y - cutoff)));
  int j1 = std::min(vol.dims.d1 - 1, int(std::ceil(center.y + cutoff)));
  int k0 = std::max(0, int(std::floor(center.z - cutoff)));
  int k1 = std::min(vol.dims.d2 - 1, int(std::ceil(center.z + cutoff)));
  for (int i = i0; i <= i1; ++i)
    for (int j = j0; j <= j1; ++j)
      for (int k = k0; k <= k1; ++k) {
        double dx = i - center.x, dy = j - center.y, dz = k - center.z;
        double d2 = dx * dx + dy * dy + dz * dz;
        if (d2 > cutoff * cutoff) continue;
        double v = peak * std::exp(-d2 * inv2s2);
        double& cell = vol.at(i, j, k);
        cell = std::max(cell, v);
      }
}

Phantom generate(const PhantomConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.rng_seed);
  Phantom out;
  out.image = ScalarVolume(cfg.dims, 0.0);

  const double lo[3] = {1.0, 1.0, 1.0};
  const double hi[3] = {cfg.dims.d0 - 2.0, cfg.dims.d1 - 2.0, cfg.dims.d2 - 2.0};
  const double step = 2.0;
  const double max_turn = 0.35;
  const int max_dim = std::max({cfg.dims.d0, cfg.dims.d1, cfg.dims.d2});
  const int n_steps = std::max(3, int(std::ceil(1.5 * max_dim / step)));

  // Tubes: random walks with bounded turning angle, reflected at the walls.
  // Draw order per tube: start (3 uniforms), direction, radius, then one
  // turn per step.
  for (int t = 0; t < cfg.tube_count; ++t) {
    Polyline pl;
    double p[3] = {rng.uniform(lo[0], hi[0]), rng.uniform(lo[1], hi[1]),
                   rng.uniform(lo[2], hi[2])};
    auto dir = rng.unit_vector();
    double radius = rng.uniform(cfg.radius_min, cfg.radius_max);
    pl.points.push_back({p[0], p[1], p[2]});
    pl.radii.push_back(radius);
    for (int s = 0; s < n_steps; ++s) {
      dir = turn(rng, dir, max_turn);
      for (int a = 0; a < 3; ++a) {
        p[a] += step * dir[a];
        if (p[a] < lo[a]) {
          p[a] = 2 * lo[a] - p[a];
          dir[a] = -dir[a];
        } else if (p[a] > hi[a]) {
          p[a] = 2 * hi[a] - p[a];
          dir[a] = -dir[a];
        }
      }
      pl.points.push_back({p[0], p[1], p[2]});
      pl.radii.push_back(radius);
    }
    render_tube(out.image, pl, radius, cfg.intensity);
    out.centerlines.lines.push_back(std::move(pl));
  }

  // Clutter: isotropic Gaussian blobs at tube-like scale and brightness.
  for (int b = 0; b < cfg.clutter_blob_count; ++b) {
    Vec3 c{rng.uniform(lo[0], hi[0]), rng.uniform(lo[1], hi[1]),
           rng.uniform(lo[2], hi[2])};
    double sigma = rng.uniform(cfg.radius_min, cfg.radius_max) / 2.0;
    render_blob(out.image, c, sigma, cfg.intensity);
  }

  if (cfg.noise_sigma > 0) {
    for (double& v : out.image.data) v += cfg.noise_sigma * rng.normal();
  }
  for (double& v : out.image.data) v = std::clamp(v, 0.0, 1.0);
  return out;
}

}  // namespace mipseg
