#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mipseg/project.hpp"
#include "mipseg/volume.hpp"

namespace mipseg {

enum class Normalization { kSum, kMeanOverLabeled };

/// Breakdown of one loss evaluation. Under kSum, total is the plain sum of
/// per-pixel terms; under kMeanOverLabeled, total (and the gradient) are
/// divided by labeled_pixel_count, with zero labeled pixels giving zero.
/// per_axis entries carry the same normalization so they always sum to
/// total for the projection loss.
struct LossReport {
  double total = 0.0;
  std::vector<std::pair<Axis, double>> per_axis;
  std::int64_t labeled_pixel_count = 0;
  Normalization normalization = Normalization::kMeanOverLabeled;
};

struct LossResult {
  LossReport report;
  ScalarVolume gradient;  // d(total)/d(pred), same dims as the prediction
};

/// Probabilities are clamped to [kProbEps, 1-kProbEps] before the logs so
/// the loss and gradient stay bounded.
inline constexpr double kProbEps = 1e-7;

/// Ternary cross entropy of one prediction: fg -> -log y, bg -> -log(1-y),
/// ignore -> 0. y must lie in [0,1].
double cross_entropy_term(double y, std::uint8_t label);

/// Dense 3D cross entropy over all non-ignore voxels.
LossResult loss3d(const ScalarVolume& pred, const LabelVolume& labels,
                  Normalization norm = Normalization::kMeanOverLabeled);

/// Projection loss: cross entropy between each annotated MIP of the
/// prediction and its 2D annotation. The gradient of each labeled pixel
/// goes entirely to the ray's argmax voxel (smallest index on ties);
/// contributions from different axes add up at shared voxels.
LossResult loss_mip(const ScalarVolume& pred, const MipAnnotationSet& mips,
                    Normalization norm = Normalization::kMeanOverLabeled);

/// Cross entropy restricted to the listed slices along `axis`; the
/// annotate-a-few-slices baseline.
LossResult loss_slices(const ScalarVolume& pred, const LabelVolume& labels,
                       Axis axis, const std::vector<int>& slice_indices,
                       Normalization norm = Normalization::kMeanOverLabeled);

/// key=value lines for the CLI: loss_total=, loss_axis<A>=, labeled_pixels=.
std::string format_loss_report(const LossReport& r);

}  // namespace mipseg
