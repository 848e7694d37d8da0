#include "mipseg/loss.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace mipseg {

namespace {

double clamp_prob(double y) {
  return std::clamp(y, kProbEps, 1.0 - kProbEps);
}

void check_prob_range(const ScalarVolume& pred) {
  for (double y : pred.data)
    if (!(y >= 0.0 && y <= 1.0))
      throw std::invalid_argument("prediction outside [0,1]");
}

// dC/dy for one labeled prediction; 0 for ignore.
double ce_grad(double y, std::uint8_t label) {
  if (label == kForeground) return -1.0 / clamp_prob(y);
  if (label == kBackground) return 1.0 / clamp_prob(1.0 - y);
  return 0.0;
}

void finalize(LossResult& res, Normalization norm, std::int64_t labeled) {
  res.report.labeled_pixel_count = labeled;
  res.report.normalization = norm;
  if (norm == Normalization::kMeanOverLabeled) {
    double inv = labeled > 0 ? 1.0 / double(labeled) : 0.0;
    res.report.total *= inv;
    for (auto& [axis, v] : res.report.per_axis) v *= inv;
    for (double& g : res.gradient.data) g *= inv;
  }
}

}  // namespace

double cross_entropy_term(double y, std::uint8_t label) {
  if (!(y >= 0.0 && y <= 1.0))
    throw std::invalid_argument("prediction outside [0,1]");
  if (label == kForeground) return -std::log(clamp_prob(y));
  if (label == kBackground) return -std::log(clamp_prob(1.0 - y));
  if (label == kIgnore) return 0.0;
  throw std::invalid_argument("invalid label");
}

LossResult loss3d(const ScalarVolume& pred, const LabelVolume& labels,
                  Normalization norm) {
  if (pred.dims != labels.dims)
    throw std::invalid_argument("prediction/label dims mismatch");
  check_prob_range(pred);
  LossResult res;
  res.gradient = ScalarVolume(pred.dims);
  std::int64_t labeled = 0;
  for (std::size_t p = 0; p < pred.data.size(); ++p) {
    std::uint8_t l = labels.data[p];
    if (l == kIgnore) continue;
    res.report.total += cross_entropy_term(pred.data[p], l);
    res.gradient.data[p] = ce_grad(pred.data[p], l);
    ++labeled;
  }
  finalize(res, norm, labeled);
  return res;
}

LossResult loss_mip(const ScalarVolume& pred, const MipAnnotationSet& mips,
                    Normalization norm) {
  if (mips.entries.empty()) throw std::invalid_argument("empty annotation set");
  if (pred.dims != mips.volume_dims)
    throw std::invalid_argument("prediction/annotation dims mismatch");
  check_prob_range(pred);
  LossResult res;
  res.gradient = ScalarVolume(pred.dims);
  std::int64_t labeled = 0;
  for (const auto& entry : mips.entries) {
    MipResult proj = mip(pred, entry.axis);
    double axis_sum = 0.0;
    for (int p = 0; p < entry.dims.a; ++p)
      for (int q = 0; q < entry.dims.b; ++q) {
        std::uint8_t l = entry.at(p, q);
        if (l == kIgnore) continue;
        double y = proj.image.data[std::size_t(p) * entry.dims.b + q];
        axis_sum += cross_entropy_term(y, l);
        auto [i, j, k] = ray_voxel(entry.axis, p, q, proj.argmax.at(p, q));
        res.gradient.at(i, j, k) += ce_grad(y, l);
        ++labeled;
      }
    res.report.total += axis_sum;
    res.report.per_axis.emplace_back(entry.axis, axis_sum);
  }
  finalize(res, norm, labeled);
  return res;
}

LossResult loss_slices(const ScalarVolume& pred, const LabelVolume& labels,
                       Axis axis, const std::vector<int>& slice_indices,
                       Normalization norm) {
  if (pred.dims != labels.dims)
    throw std::invalid_argument("prediction/label dims mismatch");
  check_prob_range(pred);
  const int extent = pred.dims[axis_index(axis)];
  std::vector<int> slices = slice_indices;
  std::sort(slices.begin(), slices.end());
  slices.erase(std::unique(slices.begin(), slices.end()), slices.end());
  for (int s : slices)
    if (s < 0 || s >= extent)
      throw std::invalid_argument("slice index out of range");

  LossResult res;
  res.gradient = ScalarVolume(pred.dims);
  std::int64_t labeled = 0;
  Dims2 sdims = image_dims(pred.dims, axis);
  for (int s : slices)
    for (int p = 0; p < sdims.a; ++p)
      for (int q = 0; q < sdims.b; ++q) {
        auto [i, j, k] = ray_voxel(axis, p, q, s);
        std::uint8_t l = labels.at(i, j, k);
        if (l == kIgnore) continue;
        double y = pred.at(i, j, k);
        res.report.total += cross_entropy_term(y, l);
        res.gradient.at(i, j, k) = ce_grad(y, l);
        ++labeled;
      }
  finalize(res, norm, labeled);
  return res;
}

std::string format_loss_report(const LossReport& r) {
  char buf[64];
  std::string out;
  std::snprintf(buf, sizeof buf, "loss_total=%.9g\n", r.total);
  out += buf;
  for (const auto& [axis, v] : r.per_axis) {
    std::snprintf(buf, sizeof buf, "loss_axis%d=%.9g\n", axis_index(axis), v);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "labeled_pixels=%lld\n",
                static_cast<long long>(r.labeled_pixel_count));
  out += buf;
  return out;
}

}  // namespace mipseg
