#pragma once

#include <vector>

#include "mipseg/volume.hpp"

namespace mipseg {

/// Exact squared Euclidean distance to the nearest nonzero pixel
/// (Felzenszwalb-Huttenlocher lower-envelope transform, two 1D passes).
/// Pixels of an all-zero mask get a value larger than any image diagonal.
std::vector<double> squared_distance_transform(Dims2 dims,
                                               const std::vector<std::uint8_t>& mask);

/// Morphological dilation by a closed Euclidean disk of radius r.
BinaryImage dilate_disk(const BinaryImage& img, double radius);

}  // namespace mipseg
