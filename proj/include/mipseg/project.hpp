#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include "mipseg/volume.hpp"
#include "mipseg/volume_io.hpp"

namespace mipseg {

/// Per-pixel index of the ray element attaining the maximum, smallest index
/// on ties. This is the bookkeeping that routes loss gradients through the
/// max-projection.
struct ArgmaxMap {
  Axis axis = Axis::x;
  Dims2 dims;
  std::vector<std::int32_t> data;

  std::int32_t at(int p, int q) const { return data[std::size_t(p) * dims.b + q]; }
};

using MipImage = ScalarImage;

struct MipResult {
  MipImage image;
  ArgmaxMap argmax;
};

/// Maximum intensity projection along `axis`.
MipResult mip(const ScalarVolume& vol, Axis axis);

/// One MipResult per axis; axes must be distinct.
std::vector<MipResult> mip_set(const ScalarVolume& vol, const std::vector<Axis>& axes);

/// Existential projection: pixel true iff any voxel on the ray carries a
/// label from positive_set. Used for hull projections and for projecting
/// 3D annotations, where the ignore code must not shadow foreground.
BinaryImage project_labels_any(const LabelVolume& lv, Axis axis,
                               const std::set<std::uint8_t>& positive_set);

/// Volume coordinates of (pixel p,q; ray index r) for projections along `a`.
inline std::array<int, 3> ray_voxel(Axis a, int p, int q, int r) {
  switch (a) {
    case Axis::x: return {r, p, q};
    case Axis::y: return {p, r, q};
    default: return {p, q, r};
  }
}

}  // namespace mipseg
