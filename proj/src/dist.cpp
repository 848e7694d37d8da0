#include "mipseg/dist.hpp"

#include <limits>

namespace mipseg {

namespace {

constexpr double kInf = std::numeric_limits<double>::max() / 4;

// 1D squared distance transform of a sampled function f, written to d.
// v and z are scratch of size n and n+1.
void dt1d(const double* f, int n, double* d, int* v, double* z) {
  int k = 0;
  v[0] = 0;
  z[0] = -kInf;
  z[1] = kInf;
  for (int q = 1; q < n; ++q) {
    double s;
    while (true) {
      int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * (q - p));
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    double dq = q - v[k];
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

std::vector<double> squared_distance_transform(Dims2 dims,
                                               const std::vector<std::uint8_t>& mask) {
  check_dims(dims);
  if (mask.size() != std::size_t(dims.pixels()))
    throw std::invalid_argument("mask size does not match dims");
  const int rows = dims.a, cols = dims.b;
  std::vector<double> d(mask.size());
  for (std::size_t p = 0; p < mask.size(); ++p) d[p] = mask[p] ? 0.0 : kInf;

  int n = std::max(rows, cols);
  std::vector<double> f(n), out(n), z(n + 1);
  std::vector<int> v(n);

  // columns first, then rows
  for (int q = 0; q < cols; ++q) {
    for (int p = 0; p < rows; ++p) f[p] = d[std::size_t(p) * cols + q];
    dt1d(f.data(), rows, out.data(), v.data(), z.data());
    for (int p = 0; p < rows; ++p) d[std::size_t(p) * cols + q] = out[p];
  }
  for (int p = 0; p < rows; ++p) {
    double* row = d.data() + std::size_t(p) * cols;
    for (int q = 0; q < cols; ++q) f[q] = row[q];
    dt1d(f.data(), cols, row, v.data(), z.data());
  }
  return d;
}

BinaryImage dilate_disk(const BinaryImage& img, double radius) {
  if (radius < 0) throw std::invalid_argument("dilation radius must be >= 0");
  if (radius == 0) return img;
  auto sq = squared_distance_transform(img.dims, img.data);
  BinaryImage out(img.axis, img.dims);
  double r2 = radius * radius;
  for (std::size_t p = 0; p < sq.size(); ++p) out.data[p] = sq[p] <= r2 ? 1 : 0;
  return out;
}

}  // namespace mipseg
