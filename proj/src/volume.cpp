#include "mipseg/volume.hpp"

#include <algorithm>

namespace mipseg {

void check_dims(Dims3 d) {
  if (d.d0 <= 0 || d.d1 <= 0 || d.d2 <= 0)
    throw std::invalid_argument("volume dims must be positive");
}

void check_dims(Dims2 d) {
  if (d.a <= 0 || d.b <= 0)
    throw std::invalid_argument("image dims must be positive");
}

LabelVolume::LabelVolume(Dims3 d, std::uint8_t fill) : dims(d) {
  check_dims(d);
  data.assign(std::size_t(d.voxels()), fill);
}

LabelImage::LabelImage(Axis ax, Dims2 d, std::uint8_t fill) : axis(ax), dims(d) {
  check_dims(d);
  data.assign(std::size_t(d.pixels()), fill);
}

BinaryImage::BinaryImage(Axis ax, Dims2 d, std::uint8_t fill) : axis(ax), dims(d) {
  check_dims(d);
  data.assign(std::size_t(d.pixels()), fill);
}

const LabelImage* MipAnnotationSet::find(Axis a) const {
  for (const auto& e : entries)
    if (e.axis == a) return &e;
  return nullptr;
}

static void validate_entries(Dims3 volume_dims, const std::vector<LabelImage>& entries) {
  if (entries.empty() || entries.size() > 3)
    throw std::invalid_argument("annotation set needs 1-3 entries");
  bool seen[3] = {false, false, false};
  for (const auto& e : entries) {
    int a = axis_index(e.axis);
    if (seen[a]) throw std::invalid_argument("duplicate projection axis in annotation set");
    seen[a] = true;
    if (e.dims != image_dims(volume_dims, e.axis))
      throw std::invalid_argument("annotation dims do not match volume dims");
  }
}

MipAnnotationSet make_mip_set(Dims3 volume_dims, std::vector<LabelImage> entries) {
  check_dims(volume_dims);
  validate_entries(volume_dims, entries);
  return MipAnnotationSet{volume_dims, std::move(entries)};
}

MipAnnotationSet make_mip_set(std::vector<LabelImage> entries) {
  if (entries.size() < 2)
    throw std::invalid_argument("volume dims cannot be derived from fewer than 2 projections");
  // Each projection pins the two dims it is indexed by; with >=2 entries
  // every dim is pinned at least once and shared dims must agree.
  int dims[3] = {0, 0, 0};
  for (const auto& e : entries) {
    auto o = other_axes(e.axis);
    int ext[2] = {e.dims.a, e.dims.b};
    for (int s = 0; s < 2; ++s) {
      if (dims[o[s]] == 0)
        dims[o[s]] = ext[s];
      else if (dims[o[s]] != ext[s])
        throw std::invalid_argument("projection dims are mutually inconsistent");
    }
  }
  Dims3 vd{dims[0], dims[1], dims[2]};
  check_dims(vd);
  return make_mip_set(vd, std::move(entries));
}

static void check_window(Dims3 dims, std::array<int, 3> origin, Dims3 size) {
  check_dims(size);
  for (int a = 0; a < 3; ++a) {
    if (origin[a] < 0 || origin[a] + size[a] > dims[a])
      throw std::invalid_argument("crop window out of bounds");
  }
}

template <class Vol>
static Vol crop_volume(const Vol& v, std::array<int, 3> origin, Dims3 size) {
  check_window(v.dims, origin, size);
  Vol out(size);
  for (int i = 0; i < size.d0; ++i)
    for (int j = 0; j < size.d1; ++j) {
      const auto* src = &v.at(origin[0] + i, origin[1] + j, origin[2]);
      auto* dst = &out.at(i, j, 0);
      std::copy(src, src + size.d2, dst);
    }
  return out;
}

ScalarVolume crop(const ScalarVolume& v, std::array<int, 3> origin, Dims3 size) {
  return crop_volume(v, origin, size);
}

LabelVolume crop(const LabelVolume& v, std::array<int, 3> origin, Dims3 size) {
  return crop_volume(v, origin, size);
}

LabelImage crop(const LabelImage& img, std::array<int, 2> origin, Dims2 size) {
  check_dims(size);
  if (origin[0] < 0 || origin[1] < 0 || origin[0] + size.a > img.dims.a ||
      origin[1] + size.b > img.dims.b)
    throw std::invalid_argument("crop window out of bounds");
  LabelImage out(img.axis, size);
  for (int p = 0; p < size.a; ++p) {
    const auto* src = &img.at(origin[0] + p, origin[1]);
    std::copy(src, src + size.b, &out.at(p, 0));
  }
  return out;
}

MipAnnotationSet crop_mip_set(const MipAnnotationSet& mips,
                              std::array<int, 3> origin, Dims3 size) {
  check_window(mips.volume_dims, origin, size);
  std::vector<LabelImage> out;
  out.reserve(mips.entries.size());
  for (const auto& e : mips.entries) {
    auto o = other_axes(e.axis);
    out.push_back(crop(e, {origin[o[0]], origin[o[1]]}, {size[o[0]], size[o[1]]}));
  }
  return MipAnnotationSet{size, std::move(out)};
}

}  // namespace mipseg
