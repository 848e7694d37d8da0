#pragma once

#include <cstdint>

#include "mipseg/annotate.hpp"
#include "mipseg/volume.hpp"

namespace mipseg {

/// Seeded tubular phantom: smooth random tubes with Gaussian cross-section,
/// optional Gaussian clutter blobs, additive Gaussian noise, clipped to
/// [0,1]. Stands in for real microscopy/MRA volumes at desk scale.
struct PhantomConfig {
  Dims3 dims;
  int tube_count = 3;
  double radius_min = 1.5;
  double radius_max = 2.5;
  double intensity = 0.9;      // peak value on the centerline
  double noise_sigma = 0.05;
  int clutter_blob_count = 0;
  std::uint64_t rng_seed = 0;
};

struct Phantom {
  ScalarVolume image;
  CenterlineSet centerlines;  // the exact generating polylines
};

Phantom generate(const PhantomConfig& cfg);

/// Rendering primitives behind generate(), exposed so tests can compare a
/// hand-built scene against the closed form. Intensities combine by max.
void render_tube(ScalarVolume& vol, const Polyline& line, double radius,
                 double peak);
void render_blob(ScalarVolume& vol, Vec3 center, double sigma, double peak);

}  // namespace mipseg
