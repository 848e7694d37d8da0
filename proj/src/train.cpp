#include "mipseg/train.hpp"

#include <cmath>

#include "mipseg/carve.hpp"

namespace mipseg {

void adam_step(NetState& state, const std::vector<double>& grads,
               const TrainConfig& tc) {
  if (grads.size() != state.params.size())
    throw std::invalid_argument("gradient size does not match parameters");
  for (double g : grads)
    if (!std::isfinite(g)) throw NumericError("non-finite gradient");

  state.step_count += 1;
  const double t = double(state.step_count);
  const double bc1 = 1.0 - std::pow(tc.beta1, t);
  const double bc2 = 1.0 - std::pow(tc.beta2, t);
  for (std::size_t p = 0; p < state.params.size(); ++p) {
    double g = grads[p] + tc.weight_decay * state.params[p];
    state.adam_m[p] = tc.beta1 * state.adam_m[p] + (1.0 - tc.beta1) * g;
    state.adam_v[p] = tc.beta2 * state.adam_v[p] + (1.0 - tc.beta2) * g * g;
    double mhat = state.adam_m[p] / bc1;
    double vhat = state.adam_v[p] / bc2;
    state.params[p] -= tc.learning_rate * mhat / (std::sqrt(vhat) + tc.adam_epsilon);
  }
}

std::vector<int> slice_budget_indices(int extent, int count) {
  if (extent <= 0 || count <= 0)
    throw std::invalid_argument("slice budget needs positive extent and count");
  std::vector<int> out;
  out.reserve(std::size_t(count));
  for (int m = 0; m < count; ++m) {
    int idx = int(std::int64_t(2 * m + 1) * extent / (2 * count));
    if (out.empty() || out.back() != idx) out.push_back(idx);
  }
  return out;
}

namespace {

void validate_dataset(const std::vector<TrainSample>& dataset,
                      const TrainConfig& tc) {
  if (dataset.empty()) throw std::invalid_argument("empty training set");
  check_dims(tc.crop_size);
  if (tc.crop_size.d0 % 4 || tc.crop_size.d1 % 4 || tc.crop_size.d2 % 4)
    throw std::invalid_argument("crop size must be divisible by 4");
  if (tc.iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  const auto mode = tc.supervision.mode;
  for (const auto& s : dataset) {
    for (int a = 0; a < 3; ++a)
      if (s.image.dims[a] < tc.crop_size[a])
        throw std::invalid_argument("training volume smaller than crop size");
    if (mode == Supervision::Mode::kFull3d || mode == Supervision::Mode::kSlices) {
      if (!s.labels || s.labels->dims != s.image.dims)
        throw std::invalid_argument("supervision needs matching 3D labels");
    }
    if (mode == Supervision::Mode::kMip) {
      if (tc.supervision.axes.empty())
        throw std::invalid_argument("MIP supervision needs at least one axis");
      if (!s.mips || s.mips->volume_dims != s.image.dims)
        throw std::invalid_argument("supervision needs matching MIP annotations");
      for (Axis a : tc.supervision.axes)
        if (!s.mips->find(a))
          throw std::invalid_argument("annotation missing for requested axis");
    }
  }
}

MipAnnotationSet select_axes(const MipAnnotationSet& mips,
                             const std::vector<Axis>& axes) {
  std::vector<LabelImage> entries;
  for (Axis a : axes) entries.push_back(*mips.find(a));
  return make_mip_set(mips.volume_dims, std::move(entries));
}

}  // namespace

TrainResult train(const std::vector<TrainSample>& dataset, const TrainConfig& tc,
                  const NetConfig& cfg) {
  validate_dataset(dataset, tc);
  Rng rng(tc.rng_seed);

  TrainResult res;
  res.state = init_state(cfg, rng);
  res.trace.reserve(std::size_t(tc.iterations));
  Network net(cfg);

  // Per-volume annotated slices for the slice baseline, fixed up front.
  std::vector<std::vector<int>> slice_sets;
  if (tc.supervision.mode == Supervision::Mode::kSlices) {
    int ax = axis_index(tc.supervision.slice_axis);
    for (const auto& s : dataset)
      slice_sets.push_back(
          slice_budget_indices(s.image.dims[ax], tc.supervision.slice_count));
  }

  for (int it = 0; it < tc.iterations; ++it) {
    // Draw order: volume, then origin along each axis.
    std::size_t vi = std::size_t(rng.bounded(dataset.size()));
    const TrainSample& sample = dataset[vi];
    std::array<int, 3> origin;
    for (int a = 0; a < 3; ++a)
      origin[a] = int(rng.bounded(
          std::uint64_t(sample.image.dims[a] - tc.crop_size[a] + 1)));

    ScalarVolume crop_img = crop(sample.image, origin, tc.crop_size);
    ScalarVolume pred = net.forward(res.state, crop_img);

    LossResult loss;
    switch (tc.supervision.mode) {
      case Supervision::Mode::kFull3d: {
        loss = loss3d(pred, crop(*sample.labels, origin, tc.crop_size),
                      tc.normalization);
        break;
      }
      case Supervision::Mode::kMip: {
        MipAnnotationSet cropped = crop_mip_set(
            select_axes(*sample.mips, tc.supervision.axes), origin, tc.crop_size);
        loss = loss_mip(pred, filter_labels(cropped), tc.normalization);
        break;
      }
      case Supervision::Mode::kSlices: {
        int ax = axis_index(tc.supervision.slice_axis);
        std::vector<int> in_crop;
        for (int s : slice_sets[vi])
          if (s >= origin[ax] && s < origin[ax] + tc.crop_size[ax])
            in_crop.push_back(s - origin[ax]);
        loss = loss_slices(pred, crop(*sample.labels, origin, tc.crop_size),
                           tc.supervision.slice_axis, in_crop, tc.normalization);
        break;
      }
    }
    if (!std::isfinite(loss.report.total))
      throw NumericError("non-finite loss at iteration " + std::to_string(it));
    res.trace.push_back(loss.report.total);

    std::vector<double> grads = net.backward(res.state, loss.gradient);
    adam_step(res.state, grads, tc);
  }
  return res;
}

}  // namespace mipseg
