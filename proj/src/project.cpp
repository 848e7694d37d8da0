#include "mipseg/project.hpp"

namespace mipseg {

// All three projections run as one streaming pass in storage order; the
// strict > comparison keeps the smallest ray index on ties.

MipResult mip(const ScalarVolume& vol, Axis axis) {
  check_dims(vol.dims);
  const int d0 = vol.dims.d0, d1 = vol.dims.d1, d2 = vol.dims.d2;
  Dims2 idims = image_dims(vol.dims, axis);
  MipResult res;
  res.image.axis = axis;
  res.image.dims = idims;
  res.argmax.axis = axis;
  res.argmax.dims = idims;
  res.image.data.assign(std::size_t(idims.pixels()), 0.0);
  res.argmax.data.assign(std::size_t(idims.pixels()), 0);
  double* img = res.image.data.data();
  std::int32_t* amax = res.argmax.data.data();

  switch (axis) {
    case Axis::x:
      for (int j = 0; j < d1; ++j) {
        const double* line = &vol.at(0, j, 0);
        std::copy(line, line + d2, img + std::size_t(j) * d2);
      }
      for (int i = 1; i < d0; ++i)
        for (int j = 0; j < d1; ++j) {
          const double* line = &vol.at(i, j, 0);
          double* out = img + std::size_t(j) * d2;
          std::int32_t* am = amax + std::size_t(j) * d2;
          for (int k = 0; k < d2; ++k)
            if (line[k] > out[k]) {
              out[k] = line[k];
              am[k] = i;
            }
        }
      break;
    case Axis::y:
      for (int i = 0; i < d0; ++i) {
        const double* line = &vol.at(i, 0, 0);
        std::copy(line, line + d2, img + std::size_t(i) * d2);
        for (int j = 1; j < d1; ++j) {
          line = &vol.at(i, j, 0);
          double* out = img + std::size_t(i) * d2;
          std::int32_t* am = amax + std::size_t(i) * d2;
          for (int k = 0; k < d2; ++k)
            if (line[k] > out[k]) {
              out[k] = line[k];
              am[k] = j;
            }
        }
      }
      break;
    case Axis::z:
      for (int i = 0; i < d0; ++i)
        for (int j = 0; j < d1; ++j) {
          const double* line = &vol.at(i, j, 0);
          double best = line[0];
          std::int32_t bk = 0;
          for (int k = 1; k < d2; ++k)
            if (line[k] > best) {
              best = line[k];
              bk = k;
            }
          img[std::size_t(i) * d1 + j] = best;
          amax[std::size_t(i) * d1 + j] = bk;
        }
      break;
  }
  return res;
}

std::vector<MipResult> mip_set(const ScalarVolume& vol, const std::vector<Axis>& axes) {
  if (axes.empty() || axes.size() > 3)
    throw std::invalid_argument("need 1-3 projection axes");
  bool seen[3] = {false, false, false};
  for (Axis a : axes) {
    if (seen[axis_index(a)]) throw std::invalid_argument("duplicate projection axis");
    seen[axis_index(a)] = true;
  }
  std::vector<MipResult> out;
  out.reserve(axes.size());
  for (Axis a : axes) out.push_back(mip(vol, a));
  return out;
}

BinaryImage project_labels_any(const LabelVolume& lv, Axis axis,
                               const std::set<std::uint8_t>& positive_set) {
  check_dims(lv.dims);
  bool pos[3] = {positive_set.count(0) > 0, positive_set.count(1) > 0,
                 positive_set.count(2) > 0};
  BinaryImage out(axis, image_dims(lv.dims, axis));
  const int d0 = lv.dims.d0, d1 = lv.dims.d1, d2 = lv.dims.d2;
  for (int i = 0; i < d0; ++i)
    for (int j = 0; j < d1; ++j) {
      const std::uint8_t* line = &lv.at(i, j, 0);
      for (int k = 0; k < d2; ++k) {
        if (!pos[line[k]]) continue;
        switch (axis) {
          case Axis::x: out.at(j, k) = 1; break;
          case Axis::y: out.at(i, k) = 1; break;
          case Axis::z: out.at(i, j) = 1; break;
        }
      }
    }
  return out;
}

}  // namespace mipseg
