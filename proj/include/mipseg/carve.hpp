#pragma once

#include "mipseg/volume.hpp"

namespace mipseg {

/// Visual hull: boolean volume, true where every available projection
/// annotation is positive at the voxel's footprint.
struct Hull {
  Dims3 dims;
  std::vector<std::uint8_t> data;

  Hull() = default;
  explicit Hull(Dims3 d) : dims(d), data(std::size_t(d.voxels()), 0) {}

  std::uint8_t& at(int i, int j, int k) {
    return data[(std::size_t(i) * dims.d1 + j) * dims.d2 + k];
  }
  const std::uint8_t& at(int i, int j, int k) const {
    return data[(std::size_t(i) * dims.d1 + j) * dims.d2 + k];
  }
};

/// Ternary annotation to hull silhouette: foreground and ignore count as
/// positive, background as negative.
BinaryImage binarize_for_hull(const LabelImage& img);

/// Conjunction of 2 or 3 binary silhouettes, one per distinct axis. Images
/// must agree on the volume dims they pin.
Hull hull_from_binary(const std::vector<BinaryImage>& silhouettes, Dims3 volume_dims);

/// Visual hull of an annotation set; needs 2 or 3 entries.
Hull build_hull(const MipAnnotationSet& mips);

/// Project hull along `axis`: pixel true iff any hull voxel on the ray.
BinaryImage project_hull(const Hull& h, Axis axis);

/// Space-carving cleanup of cropped annotations: positive labels (fg or
/// ignore) whose ray misses the hull projection are relabeled background.
/// With a single entry there is nothing to intersect and the set is
/// returned unchanged.
MipAnnotationSet filter_labels(const MipAnnotationSet& mips);

LabelVolume to_label_volume(const Hull& h);

}  // namespace mipseg
