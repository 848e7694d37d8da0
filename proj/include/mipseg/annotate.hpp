#pragma once

#include <filesystem>

#include "mipseg/volume.hpp"

namespace mipseg {

struct Vec3 {
  double x = 0, y = 0, z = 0;
};

struct Vec2 {
  double a = 0, b = 0;
};

/// One open polyline in voxel coordinates (x,y,z map to indices i,j,k).
/// radii is empty or one radius per point; radii never affect labeling.
struct Polyline {
  std::vector<Vec3> points;
  std::vector<double> radii;
};

struct CenterlineSet {
  std::vector<Polyline> lines;
};

struct Polyline2 {
  std::vector<Vec2> points;
};

/// SWC-subset reader: whitespace-separated `id type x y z radius parent`
/// records, `#` comments. Parent links are split into maximal unbranched
/// chains (each chain starts at a root or at a branch point, which is
/// included so geometry stays connected); orphan points become single-point
/// polylines.
CenterlineSet read_swc(const std::filesystem::path& path);

void write_swc(const CenterlineSet& lines, const std::filesystem::path& path);

/// Ternary rasterization. Foreground is the voxel chain traced under each
/// segment (one rounded sample per unit step of the dominant axis, both
/// endpoints included); ignore is every other voxel whose center lies
/// within Euclidean distance (margin_width-1)/2 of the continuous
/// centerline. margin_width is a diameter and must be odd.
LabelVolume rasterize(const CenterlineSet& lines, Dims3 dims, int margin_width);

/// 2D analogue of rasterize for in-plane polylines of the `axis` projection.
LabelImage rasterize_mip(const std::vector<Polyline2>& lines2d, Dims2 dims,
                         int margin_width, Axis axis);

/// MIP annotations derived from 3D ground truth: the fg voxels are
/// projected existentially per axis and the ignore margin is applied in 2D
/// around the projected pixels.
MipAnnotationSet mips_from_3d_labels(const LabelVolume& labels3d,
                                     const std::vector<Axis>& axes,
                                     int margin_width);
MipAnnotationSet mips_from_3d_labels(const CenterlineSet& lines, Dims3 dims,
                                     const std::vector<Axis>& axes,
                                     int margin_width);

}  // namespace mipseg
