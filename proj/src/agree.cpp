#include "mipseg/agree.hpp"

#include <cmath>

#include "mipseg/carve.hpp"
#include "mipseg/dist.hpp"

namespace mipseg {

std::pair<double, double> pr_2d_vs_3d(const BinaryImage& ann2d,
                                      const BinaryImage& proj3d) {
  if (ann2d.dims != proj3d.dims)
    throw std::invalid_argument("image dims mismatch");
  std::int64_t na = 0, nb = 0, nboth = 0;
  for (std::size_t p = 0; p < ann2d.data.size(); ++p) {
    bool a = ann2d.data[p], b = proj3d.data[p];
    na += a;
    nb += b;
    nboth += a && b;
  }
  double precision = na > 0 ? double(nboth) / double(na) : 1.0;
  double recall = nb > 0 ? double(nboth) / double(nb) : 1.0;
  return {precision, recall};
}

ConsistencyCurve distance_match_curve(const BinaryImage& a, const BinaryImage& b,
                                      int d_max) {
  if (a.dims != b.dims) throw std::invalid_argument("image dims mismatch");
  if (d_max < 0) throw std::invalid_argument("d_max must be >= 0");
  auto sq = squared_distance_transform(b.dims, b.data);
  std::int64_t na = 0;
  std::vector<std::int64_t> matched(std::size_t(d_max) + 1, 0);
  for (std::size_t p = 0; p < a.data.size(); ++p) {
    if (!a.data[p]) continue;
    ++na;
    for (int d = 0; d <= d_max; ++d)
      if (sq[p] <= double(d) * d) ++matched[std::size_t(d)];
  }
  ConsistencyCurve curve;
  for (int d = 0; d <= d_max; ++d) {
    curve.distances.push_back(d);
    curve.fraction.push_back(na > 0 ? double(matched[std::size_t(d)]) / double(na)
                                    : 1.0);
  }
  return curve;
}

std::vector<BinaryImage> cross_view_flags(const MipAnnotationSet& mips, int d) {
  if (mips.entries.size() < 2)
    throw std::invalid_argument("need at least 2 annotations");
  std::vector<BinaryImage> dilated;
  dilated.reserve(mips.entries.size());
  for (const auto& e : mips.entries)
    dilated.push_back(dilate_disk(binarize_for_hull(e), double(d)));
  Hull hull = hull_from_binary(dilated, mips.volume_dims);

  std::vector<BinaryImage> flags;
  flags.reserve(mips.entries.size());
  for (const auto& e : mips.entries) {
    BinaryImage support = project_hull(hull, e.axis);
    BinaryImage flag(e.axis, e.dims);
    for (std::size_t p = 0; p < e.data.size(); ++p)
      flag.data[p] = (e.data[p] != kBackground && !support.data[p]) ? 1 : 0;
    flags.push_back(std::move(flag));
  }
  return flags;
}

ConsistencyCurve cross_view_inconsistency(const MipAnnotationSet& mips, int d_max) {
  if (d_max < 0) throw std::invalid_argument("d_max must be >= 0");
  std::int64_t fg_total = 0;
  for (const auto& e : mips.entries)
    for (auto l : e.data) fg_total += l == kForeground;

  ConsistencyCurve curve;
  for (int d = 0; d <= d_max; ++d) {
    auto flags = cross_view_flags(mips, d);
    std::int64_t flagged_fg = 0;
    for (std::size_t e = 0; e < flags.size(); ++e)
      for (std::size_t p = 0; p < flags[e].data.size(); ++p)
        flagged_fg += flags[e].data[p] && mips.entries[e].data[p] == kForeground;
    curve.distances.push_back(d);
    curve.fraction.push_back(fg_total > 0 ? double(flagged_fg) / double(fg_total)
                                          : 0.0);
  }
  return curve;
}

}  // namespace mipseg
