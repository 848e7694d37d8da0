#pragma once

#include <utility>

#include "mipseg/volume.hpp"

namespace mipseg {

/// Fraction of annotations matched (or still inconsistent) as a function of
/// an integer pixel distance d.
struct ConsistencyCurve {
  std::vector<int> distances;
  std::vector<double> fraction;
};

/// Precision/recall of a 2D annotation against the projection of a 3D one.
/// P = |a AND b| / |a|, R = |a AND b| / |b|, with 0/0 taken as 1.
std::pair<double, double> pr_2d_vs_3d(const BinaryImage& ann2d,
                                      const BinaryImage& proj3d);

/// fraction(d) = share of positives of `a` whose Euclidean distance to the
/// nearest positive of `b` is <= d, for d = 0..d_max.
ConsistencyCurve distance_match_curve(const BinaryImage& a, const BinaryImage& b,
                                      int d_max);

/// Per-entry masks of positive labels (fg or ignore) with no support in the
/// hull built from the entries' positive sets dilated by a Euclidean disk
/// of radius d. At d = 0 this is exactly the set filter_labels relabels.
std::vector<BinaryImage> cross_view_flags(const MipAnnotationSet& mips, int d);

/// Lower-bound estimate of cross-view annotation inconsistency: the fg
/// fraction still flagged after dilation by d, for d = 0..d_max. Ignore
/// pixels take part in hull building but are excluded from the fractions.
ConsistencyCurve cross_view_inconsistency(const MipAnnotationSet& mips, int d_max);

}  // namespace mipseg
