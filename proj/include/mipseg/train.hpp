#pragma once

#include <optional>

#include "mipseg/loss.hpp"
#include "mipseg/net.hpp"
#include "mipseg/volume.hpp"

namespace mipseg {

struct Supervision {
  enum class Mode { kFull3d, kMip, kSlices };
  Mode mode = Mode::kFull3d;
  std::vector<Axis> axes;     // kMip
  Axis slice_axis = Axis::x;  // kSlices
  int slice_count = 0;        // kSlices
};

struct TrainConfig {
  double learning_rate = 1e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double weight_decay = 1e-4;  // L2 term added to the gradient
  int iterations = 2000;
  Dims3 crop_size{16, 32, 32};
  std::uint64_t rng_seed = 0;
  Supervision supervision;
  Normalization normalization = Normalization::kMeanOverLabeled;
};

/// Bias-corrected ADAM with L2 weight decay folded into the gradient;
/// increments step_count. Non-finite gradients abort with NumericError.
void adam_step(NetState& state, const std::vector<double>& grads,
               const TrainConfig& tc);

struct TrainSample {
  ScalarVolume image;
  std::optional<LabelVolume> labels;       // kFull3d / kSlices
  std::optional<MipAnnotationSet> mips;    // kMip
};

struct TrainResult {
  NetState state;
  std::vector<double> trace;  // per-iteration loss
};

/// Evenly spaced annotated slice indices for the slice baseline:
/// floor((m + 0.5) * extent / count).
std::vector<int> slice_budget_indices(int extent, int count);

/// Seeded training loop: per iteration draw a volume and a crop origin,
/// crop the supervision (hull-filtering cropped MIP annotations when 2+
/// axes are in play), run the configured loss, backprop, ADAM step.
/// Deterministic for a fixed seed and thread count 1; the conv kernels'
/// fixed per-element reduction order makes other thread counts match too.
TrainResult train(const std::vector<TrainSample>& dataset, const TrainConfig& tc,
                  const NetConfig& cfg);

}  // namespace mipseg
