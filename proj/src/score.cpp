#include "mipseg/score.hpp"

#include <algorithm>

namespace mipseg {

namespace {

PrCurvePoint point_at(double threshold, std::int64_t tp, std::int64_t fp,
                      std::int64_t gt_pos) {
  PrCurvePoint pt;
  pt.threshold = threshold;
  pt.precision = (tp + fp) > 0 ? double(tp) / double(tp + fp) : 1.0;
  pt.recall = gt_pos > 0 ? double(tp) / double(gt_pos) : 1.0;
  double s = pt.precision + pt.recall;
  pt.f1 = s > 0 ? 2.0 * pt.precision * pt.recall / s : 0.0;
  return pt;
}

}  // namespace

F1Sweep max_f1(const ScalarVolume& pred, const LabelVolume& labels, int thresholds) {
  if (pred.dims != labels.dims)
    throw std::invalid_argument("prediction/label dims mismatch");
  if (thresholds < 2) throw std::invalid_argument("need at least 2 thresholds");
  for (double y : pred.data)
    if (!(y >= 0.0 && y <= 1.0))
      throw std::invalid_argument("prediction outside [0,1]");

  // (value, is_fg) for the evaluated voxels, sorted descending, so the
  // positives at threshold t are a prefix.
  std::vector<std::pair<double, std::uint8_t>> ranked;
  ranked.reserve(pred.data.size());
  std::int64_t gt_pos = 0;
  for (std::size_t p = 0; p < pred.data.size(); ++p) {
    std::uint8_t l = labels.data[p];
    if (l == kIgnore) continue;
    ranked.emplace_back(pred.data[p], l);
    gt_pos += l == kForeground;
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  F1Sweep out;
  out.curve.reserve(std::size_t(thresholds));
  std::size_t cursor = 0;
  std::int64_t tp = 0, fp = 0;
  bool have_best = false;
  // descending thresholds so the prefix cursor only advances
  for (int t = thresholds; t >= 1; --t) {
    double threshold = double(t) / double(thresholds + 1);
    while (cursor < ranked.size() && ranked[cursor].first >= threshold) {
      tp += ranked[cursor].second == kForeground;
      fp += ranked[cursor].second == kBackground;
      ++cursor;
    }
    PrCurvePoint pt = point_at(threshold, tp, fp, gt_pos);
    out.curve.push_back(pt);
    if (!have_best || pt.f1 > out.best.f1 ||
        (pt.f1 == out.best.f1 && pt.threshold < out.best.threshold)) {
      out.best = pt;
      have_best = true;
    }
  }
  std::reverse(out.curve.begin(), out.curve.end());
  return out;
}

}  // namespace mipseg
