#include "mipseg/volume_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <limits>

namespace mipseg {

namespace {

constexpr char kMagic[4] = {'V', 'S', 'G', '1'};
constexpr std::uint8_t kDtypeScalar = 0;
constexpr std::uint8_t kDtypeLabel = 1;
constexpr std::uint8_t kNoAxis = 255;

static_assert(std::endian::native == std::endian::little,
              "VSG1 I/O assumes a little-endian host");

void put_u32(std::string& out, std::uint32_t v) {
  char b[4];
  std::memcpy(b, &v, 4);
  out.append(b, 4);
}

std::string header(std::uint8_t dtype, std::uint8_t rank, std::uint8_t axis,
                   const std::uint32_t* dims) {
  std::string h(kMagic, 4);
  h.push_back(char(dtype));
  h.push_back(char(rank));
  h.push_back(char(axis));
  h.push_back(0);
  for (int a = 0; a < rank; ++a) put_u32(h, dims[a]);
  return h;
}

void write_file(const std::filesystem::path& path, const std::string& head,
                const void* payload, std::size_t payload_bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f.write(head.data(), std::streamsize(head.size()));
  f.write(static_cast<const char*>(payload), std::streamsize(payload_bytes));
  if (!f) throw IoError("write failed: " + path.string());
}

std::vector<float> to_f32(const std::vector<double>& v) {
  std::vector<float> out(v.size());
  std::transform(v.begin(), v.end(), out.begin(),
                 [](double x) { return float(x); });
  return out;
}

struct Reader {
  std::string bytes;
  std::size_t pos = 0;

  explicit Reader(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path.string());
    bytes.assign(std::istreambuf_iterator<char>(f), {});
  }

  void need(std::size_t n) {
    if (pos + n > bytes.size()) throw IoError("truncated payload");
  }
  std::uint8_t u8() {
    need(1);
    return std::uint8_t(bytes[pos++]);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v;
    std::memcpy(&v, bytes.data() + pos, 4);
    pos += 4;
    return v;
  }
  void raw(void* dst, std::size_t n) {
    need(n);
    std::memcpy(dst, bytes.data() + pos, n);
    pos += n;
  }
};

struct Header {
  std::uint8_t dtype = 0, rank = 0, axis = kNoAxis;
  std::uint32_t dims[3] = {0, 0, 0};
};

Header read_header(Reader& r) {
  char magic[4];
  r.raw(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw IoError("bad magic");
  Header h;
  h.dtype = r.u8();
  h.rank = r.u8();
  h.axis = r.u8();
  std::uint8_t reserved = r.u8();
  if (h.dtype != kDtypeScalar && h.dtype != kDtypeLabel)
    throw IoError("unknown dtype");
  if (h.rank != 2 && h.rank != 3) throw IoError("unsupported rank");
  if (reserved != 0) throw IoError("nonzero reserved byte");
  if (h.rank == 2) {
    if (h.axis > 2 && h.axis != kNoAxis) throw IoError("invalid axis tag");
  } else if (h.axis != kNoAxis) {
    throw IoError("invalid axis tag");
  }
  for (int a = 0; a < h.rank; ++a) {
    h.dims[a] = r.u32();
    if (h.dims[a] == 0) throw IoError("zero dimension");
    if (h.dims[a] > std::uint32_t(std::numeric_limits<int>::max()))
      throw IoError("dimension too large");
  }
  return h;
}

void read_scalar_payload(Reader& r, std::int64_t n, std::vector<double>& out) {
  std::vector<float> raw(static_cast<std::size_t>(n));
  r.raw(raw.data(), std::size_t(n) * 4);
  out.resize(std::size_t(n));
  std::transform(raw.begin(), raw.end(), out.begin(),
                 [](float x) { return double(x); });
}

void read_label_payload(Reader& r, std::int64_t n, std::vector<std::uint8_t>& out) {
  out.resize(std::size_t(n));
  r.raw(out.data(), std::size_t(n));
  for (auto v : out)
    if (v > kIgnore) throw IoError("invalid label");
}

void finish(const Reader& r) {
  if (r.pos != r.bytes.size()) throw IoError("trailing bytes after payload");
}

}  // namespace

void write_volume(const ScalarVolume& v, const std::filesystem::path& path) {
  check_dims(v.dims);
  std::uint32_t d[3] = {std::uint32_t(v.dims.d0), std::uint32_t(v.dims.d1),
                        std::uint32_t(v.dims.d2)};
  auto f32 = to_f32(v.data);
  write_file(path, header(kDtypeScalar, 3, kNoAxis, d), f32.data(), f32.size() * 4);
}

void write_volume(const LabelVolume& v, const std::filesystem::path& path) {
  check_dims(v.dims);
  for (auto b : v.data)
    if (b > kIgnore) throw IoError("invalid label");
  std::uint32_t d[3] = {std::uint32_t(v.dims.d0), std::uint32_t(v.dims.d1),
                        std::uint32_t(v.dims.d2)};
  write_file(path, header(kDtypeLabel, 3, kNoAxis, d), v.data.data(), v.data.size());
}

void write_image(const ScalarImage& img, const std::filesystem::path& path) {
  check_dims(img.dims);
  std::uint32_t d[2] = {std::uint32_t(img.dims.a), std::uint32_t(img.dims.b)};
  auto f32 = to_f32(img.data);
  write_file(path, header(kDtypeScalar, 2, std::uint8_t(img.axis), d),
             f32.data(), f32.size() * 4);
}

void write_image(const LabelImage& img, const std::filesystem::path& path) {
  check_dims(img.dims);
  std::uint32_t d[2] = {std::uint32_t(img.dims.a), std::uint32_t(img.dims.b)};
  write_file(path, header(kDtypeLabel, 2, std::uint8_t(img.axis), d),
             img.data.data(), img.data.size());
}

void write_image(const BinaryImage& img, const std::filesystem::path& path) {
  LabelImage as_labels(img.axis, img.dims);
  std::transform(img.data.begin(), img.data.end(), as_labels.data.begin(),
                 [](std::uint8_t v) { return v ? kForeground : kBackground; });
  write_image(as_labels, path);
}

std::variant<ScalarVolume, LabelVolume> read_volume(const std::filesystem::path& path) {
  Reader r(path);
  Header h = read_header(r);
  if (h.rank != 3) throw IoError("expected a rank-3 volume");
  Dims3 dims{int(h.dims[0]), int(h.dims[1]), int(h.dims[2])};
  if (h.dtype == kDtypeScalar) {
    ScalarVolume v;
    v.dims = dims;
    read_scalar_payload(r, h.dims[0] * std::int64_t(h.dims[1]) * h.dims[2], v.data);
    finish(r);
    return v;
  }
  LabelVolume v;
  v.dims = dims;
  read_label_payload(r, dims.voxels(), v.data);
  finish(r);
  return v;
}

ScalarVolume read_scalar_volume(const std::filesystem::path& path) {
  auto v = read_volume(path);
  if (!std::holds_alternative<ScalarVolume>(v))
    throw IoError("expected a scalar volume: " + path.string());
  return std::get<ScalarVolume>(std::move(v));
}

LabelVolume read_label_volume(const std::filesystem::path& path) {
  auto v = read_volume(path);
  if (!std::holds_alternative<LabelVolume>(v))
    throw IoError("expected a label volume: " + path.string());
  return std::get<LabelVolume>(std::move(v));
}

namespace {

Header read_image_header(Reader& r, std::uint8_t want_dtype,
                         const std::filesystem::path& path) {
  Header h = read_header(r);
  if (h.rank != 2) throw IoError("expected a rank-2 image: " + path.string());
  if (h.dtype != want_dtype) throw IoError("unexpected dtype: " + path.string());
  return h;
}

Axis axis_from_tag(std::uint8_t tag) {
  // Untagged rank-2 files default to the x projection.
  return tag == kNoAxis ? Axis::x : Axis(tag);
}

}  // namespace

ScalarImage read_scalar_image(const std::filesystem::path& path) {
  Reader r(path);
  Header h = read_image_header(r, kDtypeScalar, path);
  ScalarImage img;
  img.axis = axis_from_tag(h.axis);
  img.dims = {int(h.dims[0]), int(h.dims[1])};
  read_scalar_payload(r, img.dims.pixels(), img.data);
  finish(r);
  return img;
}

LabelImage read_label_image(const std::filesystem::path& path) {
  Reader r(path);
  Header h = read_image_header(r, kDtypeLabel, path);
  LabelImage img;
  img.axis = axis_from_tag(h.axis);
  img.dims = {int(h.dims[0]), int(h.dims[1])};
  read_label_payload(r, img.dims.pixels(), img.data);
  finish(r);
  return img;
}

void write_pgm_preview(const ScalarImage& img, const std::filesystem::path& path) {
  check_dims(img.dims);
  double lo = img.data[0], hi = img.data[0];
  for (double v : img.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
  std::string head = "P5\n" + std::to_string(img.dims.b) + " " +
                     std::to_string(img.dims.a) + "\n255\n";
  std::vector<std::uint8_t> px(img.data.size());
  std::transform(img.data.begin(), img.data.end(), px.begin(), [&](double v) {
    return std::uint8_t(std::clamp((v - lo) * scale + 0.5, 0.0, 255.0));
  });
  write_file(path, head, px.data(), px.size());
}

}  // namespace mipseg
