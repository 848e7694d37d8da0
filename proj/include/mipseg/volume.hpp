#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mipseg {

/// Projection directions. Axis::x projects along index i (dim 0) and yields
/// an image indexed (j,k); Axis::y along j gives (i,k); Axis::z along k
/// gives (i,j).
enum class Axis : std::uint8_t { x = 0, y = 1, z = 2 };

inline int axis_index(Axis a) { return static_cast<int>(a); }

/// The two volume dimensions an image projected along `a` is indexed by,
/// in index order.
inline std::array<int, 2> other_axes(Axis a) {
  switch (a) {
    case Axis::x: return {1, 2};
    case Axis::y: return {0, 2};
    default: return {0, 1};
  }
}

// Ternary label codes, shared by 2D and 3D containers.
inline constexpr std::uint8_t kBackground = 0;
inline constexpr std::uint8_t kForeground = 1;
inline constexpr std::uint8_t kIgnore = 2;

struct Dims3 {
  int d0 = 0, d1 = 0, d2 = 0;
  std::int64_t voxels() const {
    return std::int64_t(d0) * d1 * d2;
  }
  int operator[](int a) const { return a == 0 ? d0 : (a == 1 ? d1 : d2); }
  bool operator==(const Dims3&) const = default;
};

struct Dims2 {
  int a = 0, b = 0;
  std::int64_t pixels() const { return std::int64_t(a) * b; }
  bool operator==(const Dims2&) const = default;
};

inline Dims2 image_dims(Dims3 d, Axis axis) {
  auto o = other_axes(axis);
  return {d[o[0]], d[o[1]]};
}

void check_dims(Dims3 d);
void check_dims(Dims2 d);

/// Dense 3D scalar field, k-fastest (row-major) storage. Values are stored
/// as doubles in memory; the file format keeps float32 (see volume_io).
struct ScalarVolume {
  Dims3 dims;
  std::vector<double> data;

  ScalarVolume() = default;
  explicit ScalarVolume(Dims3 d, double fill = 0.0)
      : dims(d), data(std::size_t(check_sized(d)), fill) {}

  double& at(int i, int j, int k) {
    return data[(std::size_t(i) * dims.d1 + j) * dims.d2 + k];
  }
  const double& at(int i, int j, int k) const {
    return data[(std::size_t(i) * dims.d1 + j) * dims.d2 + k];
  }

 private:
  static std::int64_t check_sized(Dims3 d) {
    check_dims(d);
    return d.voxels();
  }
};

/// Dense ternary label volume, one byte per voxel, same layout as
/// ScalarVolume.
struct LabelVolume {
  Dims3 dims;
  std::vector<std::uint8_t> data;

  LabelVolume() = default;
  explicit LabelVolume(Dims3 d, std::uint8_t fill = kBackground);

  std::uint8_t& at(int i, int j, int k) {
    return data[(std::size_t(i) * dims.d1 + j) * dims.d2 + k];
  }
  const std::uint8_t& at(int i, int j, int k) const {
    return data[(std::size_t(i) * dims.d1 + j) * dims.d2 + k];
  }
};

/// Ternary 2D annotation of the projection along `axis`.
struct LabelImage {
  Axis axis = Axis::x;
  Dims2 dims;
  std::vector<std::uint8_t> data;

  LabelImage() = default;
  LabelImage(Axis ax, Dims2 d, std::uint8_t fill = kBackground);

  std::uint8_t& at(int p, int q) { return data[std::size_t(p) * dims.b + q]; }
  const std::uint8_t& at(int p, int q) const {
    return data[std::size_t(p) * dims.b + q];
  }
};

/// Binary 2D mask with the same indexing as LabelImage; values 0/1.
struct BinaryImage {
  Axis axis = Axis::x;
  Dims2 dims;
  std::vector<std::uint8_t> data;

  BinaryImage() = default;
  BinaryImage(Axis ax, Dims2 d, std::uint8_t fill = 0);

  std::uint8_t& at(int p, int q) { return data[std::size_t(p) * dims.b + q]; }
  const std::uint8_t& at(int p, int q) const {
    return data[std::size_t(p) * dims.b + q];
  }
};

/// 1-3 per-axis MIP annotations of one volume, at most one per axis.
/// Construct through make_mip_set so the axis-uniqueness and shape
/// invariants hold everywhere downstream.
struct MipAnnotationSet {
  Dims3 volume_dims;
  std::vector<LabelImage> entries;

  const LabelImage* find(Axis a) const;
};

MipAnnotationSet make_mip_set(Dims3 volume_dims, std::vector<LabelImage> entries);

/// Derives volume_dims from the entries' shapes; needs >= 2 entries (a
/// single projection leaves its own axis extent undetermined).
MipAnnotationSet make_mip_set(std::vector<LabelImage> entries);

ScalarVolume crop(const ScalarVolume& v, std::array<int, 3> origin, Dims3 size);
LabelVolume crop(const LabelVolume& v, std::array<int, 3> origin, Dims3 size);
LabelImage crop(const LabelImage& img, std::array<int, 2> origin, Dims2 size);

/// Crops every entry to the 2D window induced by projecting the 3D crop
/// along its axis. The result can contain foreground labels whose
/// generating structure lies outside the crop; carve::filter_labels deals
/// with those.
MipAnnotationSet crop_mip_set(const MipAnnotationSet& mips,
                              std::array<int, 3> origin, Dims3 size);

}  // namespace mipseg
