#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include "mipseg/volume.hpp"

namespace mipseg {

/// File or format problem (bad magic, truncated payload, invalid label
/// byte, I/O failure). The CLI maps this to exit code 3.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// VSG1 container
//   bytes 0-3  magic "VSG1"
//   byte  4    dtype: 0 = scalar float32 LE, 1 = ternary label u8
//   byte  5    rank: 2 or 3
//   byte  6    axis tag for rank-2 images (0/1/2), 255 when none / rank-3
//   byte  7    reserved, 0
//   then rank x u32 LE dims in index order, then the raw payload with the
//   last index fastest.

/// Scalar 2D image in the same container (a stored MIP or any 2D field).
struct ScalarImage {
  Axis axis = Axis::x;
  Dims2 dims;
  std::vector<double> data;
};

void write_volume(const ScalarVolume& v, const std::filesystem::path& path);
void write_volume(const LabelVolume& v, const std::filesystem::path& path);
void write_image(const ScalarImage& img, const std::filesystem::path& path);
void write_image(const LabelImage& img, const std::filesystem::path& path);
void write_image(const BinaryImage& img, const std::filesystem::path& path);

std::variant<ScalarVolume, LabelVolume> read_volume(const std::filesystem::path& path);

ScalarVolume read_scalar_volume(const std::filesystem::path& path);
LabelVolume read_label_volume(const std::filesystem::path& path);
ScalarImage read_scalar_image(const std::filesystem::path& path);
LabelImage read_label_image(const std::filesystem::path& path);

/// Min-max normalized 8-bit preview, binary portable graymap (P5).
void write_pgm_preview(const ScalarImage& img, const std::filesystem::path& path);

}  // namespace mipseg
