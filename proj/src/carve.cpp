#include "mipseg/carve.hpp"

#include <algorithm>

namespace mipseg {

BinaryImage binarize_for_hull(const LabelImage& img) {
  BinaryImage out(img.axis, img.dims);
  std::transform(img.data.begin(), img.data.end(), out.data.begin(),
                 [](std::uint8_t l) { return l == kBackground ? 0 : 1; });
  return out;
}

Hull hull_from_binary(const std::vector<BinaryImage>& silhouettes, Dims3 volume_dims) {
  check_dims(volume_dims);
  if (silhouettes.size() < 2 || silhouettes.size() > 3)
    throw std::invalid_argument("hull needs 2 or 3 silhouettes");
  const BinaryImage* per_axis[3] = {nullptr, nullptr, nullptr};
  for (const auto& s : silhouettes) {
    int a = axis_index(s.axis);
    if (per_axis[a]) throw std::invalid_argument("duplicate silhouette axis");
    if (s.dims != image_dims(volume_dims, s.axis))
      throw std::invalid_argument("silhouette dims do not match volume dims");
    per_axis[a] = &s;
  }
  const BinaryImage* sx = per_axis[0];
  const BinaryImage* sy = per_axis[1];
  const BinaryImage* sz = per_axis[2];
  Hull h(volume_dims);
  for (int i = 0; i < volume_dims.d0; ++i)
    for (int j = 0; j < volume_dims.d1; ++j)
      for (int k = 0; k < volume_dims.d2; ++k) {
        bool on = true;
        if (sx) on = on && sx->at(j, k);
        if (sy) on = on && sy->at(i, k);
        if (sz) on = on && sz->at(i, j);
        h.at(i, j, k) = on ? 1 : 0;
      }
  return h;
}

Hull build_hull(const MipAnnotationSet& mips) {
  if (mips.entries.size() < 2)
    throw std::invalid_argument("hull needs at least 2 annotations");
  std::vector<BinaryImage> sil;
  sil.reserve(mips.entries.size());
  for (const auto& e : mips.entries) sil.push_back(binarize_for_hull(e));
  return hull_from_binary(sil, mips.volume_dims);
}

BinaryImage project_hull(const Hull& h, Axis axis) {
  BinaryImage out(axis, image_dims(h.dims, axis));
  for (int i = 0; i < h.dims.d0; ++i)
    for (int j = 0; j < h.dims.d1; ++j)
      for (int k = 0; k < h.dims.d2; ++k) {
        if (!h.at(i, j, k)) continue;
        switch (axis) {
          case Axis::x: out.at(j, k) = 1; break;
          case Axis::y: out.at(i, k) = 1; break;
          case Axis::z: out.at(i, j) = 1; break;
        }
      }
  return out;
}

MipAnnotationSet filter_labels(const MipAnnotationSet& mips) {
  if (mips.entries.empty()) throw std::invalid_argument("empty annotation set");
  if (mips.entries.size() == 1) return mips;
  Hull hull = build_hull(mips);
  MipAnnotationSet out = mips;
  for (auto& e : out.entries) {
    BinaryImage support = project_hull(hull, e.axis);
    for (std::size_t p = 0; p < e.data.size(); ++p)
      if (e.data[p] != kBackground && !support.data[p]) e.data[p] = kBackground;
  }
  return out;
}

LabelVolume to_label_volume(const Hull& h) {
  LabelVolume out(h.dims);
  std::transform(h.data.begin(), h.data.end(), out.data.begin(),
                 [](std::uint8_t v) { return v ? kForeground : kBackground; });
  return out;
}

}  // namespace mipseg
