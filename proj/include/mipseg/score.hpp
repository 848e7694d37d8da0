#pragma once

#include "mipseg/volume.hpp"

namespace mipseg {

struct PrCurvePoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct F1Sweep {
  PrCurvePoint best;
  std::vector<PrCurvePoint> curve;
};

/// Threshold sweep of voxelwise precision/recall/F1 against ternary ground
/// truth; ignore voxels are excluded entirely. A voxel counts as predicted
/// positive when pred >= threshold; the grid is `thresholds` evenly spaced
/// points i/(thresholds+1) in (0,1). Best takes the highest F1, smallest
/// threshold on ties.
F1Sweep max_f1(const ScalarVolume& pred, const LabelVolume& labels,
               int thresholds = 255);

}  // namespace mipseg
