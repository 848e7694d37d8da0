#include "mipseg/annotate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "mipseg/dist.hpp"
#include "mipseg/project.hpp"
#include "mipseg/volume_io.hpp"

namespace mipseg {

namespace {

struct SwcNode {
  long long id;
  double x, y, z, radius;
  long long parent;
};

int roundc(double v) { return int(std::floor(v + 0.5)); }

double point_segment_sq(double px, double py, double pz, Vec3 a, Vec3 b) {
  double ux = b.x - a.x, uy = b.y - a.y, uz = b.z - a.z;
  double len2 = ux * ux + uy * uy + uz * uz;
  double t = 0.0;
  if (len2 > 0.0) {
    t = ((px - a.x) * ux + (py - a.y) * uy + (pz - a.z) * uz) / len2;
    t = std::clamp(t, 0.0, 1.0);
  }
  double dx = px - (a.x + t * ux), dy = py - (a.y + t * uy), dz = pz - (a.z + t * uz);
  return dx * dx + dy * dy + dz * dz;
}

int margin_radius(int margin_width) {
  if (margin_width <= 0 || margin_width % 2 == 0)
    throw std::invalid_argument("margin width must be odd and positive");
  return (margin_width - 1) / 2;
}

void check_point_bounds(double v, int extent, int r) {
  if (v < -0.5 - r || v > extent - 0.5 + r)
    throw std::invalid_argument("centerline point out of volume bounds");
}

// Rounded samples of a segment, one per unit step of the dominant axis.
template <class Mark>
void trace_segment(Vec3 a, Vec3 b, Mark&& mark) {
  double span = std::max({std::abs(b.x - a.x), std::abs(b.y - a.y),
                          std::abs(b.z - a.z)});
  int n = std::max(1, int(std::ceil(span)));
  for (int s = 0; s <= n; ++s) {
    double t = double(s) / n;
    mark(roundc(a.x + t * (b.x - a.x)), roundc(a.y + t * (b.y - a.y)),
         roundc(a.z + t * (b.z - a.z)));
  }
}

}  // namespace

CenterlineSet read_swc(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open: " + path.string());

  std::vector<SwcNode> nodes;
  std::map<long long, std::size_t> by_id;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    std::size_t h = line.find('#');
    if (h != std::string::npos) line.erase(h);
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::istringstream ss(line);
    SwcNode n;
    int type;
    std::string extra;
    if (!(ss >> n.id >> type >> n.x >> n.y >> n.z >> n.radius >> n.parent) ||
        (ss >> extra))
      throw IoError("malformed SWC line " + std::to_string(lineno));
    if (by_id.count(n.id))
      throw IoError("duplicate SWC id " + std::to_string(n.id));
    by_id[n.id] = nodes.size();
    nodes.push_back(n);
  }

  std::vector<std::vector<std::size_t>> children(nodes.size());
  std::vector<bool> is_root(nodes.size(), false);
  for (std::size_t idx = 0; idx < nodes.size(); ++idx) {
    if (nodes[idx].parent < 0) {
      is_root[idx] = true;
      continue;
    }
    auto it = by_id.find(nodes[idx].parent);
    if (it == by_id.end())
      throw IoError("dangling SWC parent id " + std::to_string(nodes[idx].parent));
    children[it->second].push_back(idx);
  }

  // Maximal unbranched chains, in file order of their first own node. A
  // chain starting below a branch point also carries the branch coordinates
  // so the geometry stays connected.
  CenterlineSet out;
  auto append_node = [&](Polyline& pl, std::size_t idx) {
    pl.points.push_back({nodes[idx].x, nodes[idx].y, nodes[idx].z});
    pl.radii.push_back(nodes[idx].radius);
  };
  for (std::size_t idx = 0; idx < nodes.size(); ++idx) {
    std::size_t par = std::size_t(-1);
    bool starts = is_root[idx];
    if (!starts) {
      par = by_id[nodes[idx].parent];
      starts = children[par].size() > 1;
    }
    if (!starts) continue;
    Polyline pl;
    if (par != std::size_t(-1)) append_node(pl, par);
    std::size_t cur = idx;
    while (true) {
      append_node(pl, cur);
      if (children[cur].size() != 1) break;
      cur = children[cur][0];
    }
    out.lines.push_back(std::move(pl));
  }
  return out;
}

void write_swc(const CenterlineSet& lines, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot open for writing: " + path.string());
  f << "# id type x y z radius parent\n";
  long long id = 0;
  for (const auto& pl : lines.lines) {
    long long prev = -1;
    for (std::size_t p = 0; p < pl.points.size(); ++p) {
      ++id;
      double r = pl.radii.size() == pl.points.size() ? pl.radii[p] : 1.0;
      f << id << " 3 " << pl.points[p].x << " " << pl.points[p].y << " "
        << pl.points[p].z << " " << r << " " << prev << "\n";
      prev = id;
    }
  }
  if (!f) throw IoError("write failed: " + path.string());
}

LabelVolume rasterize(const CenterlineSet& lines, Dims3 dims, int margin_width) {
  check_dims(dims);
  int r = margin_radius(margin_width);
  for (const auto& pl : lines.lines) {
    if (pl.points.empty())
      throw std::invalid_argument("empty polyline");
    for (const auto& p : pl.points) {
      check_point_bounds(p.x, dims.d0, r);
      check_point_bounds(p.y, dims.d1, r);
      check_point_bounds(p.z, dims.d2, r);
    }
  }

  LabelVolume out(dims, kBackground);
  auto mark_fg = [&](int i, int j, int k) {
    if (i < 0 || j < 0 || k < 0 || i >= dims.d0 || j >= dims.d1 || k >= dims.d2)
      return;
    out.at(i, j, k) = kForeground;
  };
  auto segments = [&](auto&& fn) {
    for (const auto& pl : lines.lines) {
      if (pl.points.size() == 1) fn(pl.points[0], pl.points[0]);
      for (std::size_t s = 0; s + 1 < pl.points.size(); ++s)
        fn(pl.points[s], pl.points[s + 1]);
    }
  };

  segments([&](Vec3 a, Vec3 b) { trace_segment(a, b, mark_fg); });

  if (r > 0) {
    double r2 = double(r) * r;
    segments([&](Vec3 a, Vec3 b) {
      int i0 = std::max(0, int(std::floor(std::min(a.x, b.x) - r)));
      int i1 = std::min(dims.d0 - 1, int(std::ceil(std::max(a.x, b.x) + r)));
      int j0 = std::max(0, int(std::floor(std::min(a.y, b.y) - r)));
      int j1 = std::min(dims.d1 - 1, int(std::ceil(std::max(a.y, b.y) + r)));
      int k0 = std::max(0, int(std::floor(std::min(a.z, b.z) - r)));
      int k1 = std::min(dims.d2 - 1, int(std::ceil(std::max(a.z, b.z) + r)));
      for (int i = i0; i <= i1; ++i)
        for (int j = j0; j <= j1; ++j)
          for (int k = k0; k <= k1; ++k) {
            if (out.at(i, j, k) != kBackground) continue;
            if (point_segment_sq(i, j, k, a, b) <= r2) out.at(i, j, k) = kIgnore;
          }
    });
  }
  return out;
}

LabelImage rasterize_mip(const std::vector<Polyline2>& lines2d, Dims2 dims,
                         int margin_width, Axis axis) {
  check_dims(dims);
  int r = margin_radius(margin_width);
  for (const auto& pl : lines2d) {
    if (pl.points.empty()) throw std::invalid_argument("empty polyline");
    for (const auto& p : pl.points) {
      check_point_bounds(p.a, dims.a, r);
      check_point_bounds(p.b, dims.b, r);
    }
  }

  LabelImage out(axis, dims, kBackground);
  auto mark_fg = [&](int p, int q) {
    if (p < 0 || q < 0 || p >= dims.a || q >= dims.b) return;
    out.at(p, q) = kForeground;
  };
  auto segments = [&](auto&& fn) {
    for (const auto& pl : lines2d) {
      if (pl.points.size() == 1) fn(pl.points[0], pl.points[0]);
      for (std::size_t s = 0; s + 1 < pl.points.size(); ++s)
        fn(pl.points[s], pl.points[s + 1]);
    }
  };

  segments([&](Vec2 a, Vec2 b) {
    double span = std::max(std::abs(b.a - a.a), std::abs(b.b - a.b));
    int n = std::max(1, int(std::ceil(span)));
    for (int s = 0; s <= n; ++s) {
      double t = double(s) / n;
      mark_fg(roundc(a.a + t * (b.a - a.a)), roundc(a.b + t * (b.b - a.b)));
    }
  });

  if (r > 0) {
    double r2 = double(r) * r;
    segments([&](Vec2 a, Vec2 b) {
      int p0 = std::max(0, int(std::floor(std::min(a.a, b.a) - r)));
      int p1 = std::min(dims.a - 1, int(std::ceil(std::max(a.a, b.a) + r)));
      int q0 = std::max(0, int(std::floor(std::min(a.b, b.b) - r)));
      int q1 = std::min(dims.b - 1, int(std::ceil(std::max(a.b, b.b) + r)));
      for (int p = p0; p <= p1; ++p)
        for (int q = q0; q <= q1; ++q) {
          if (out.at(p, q) != kBackground) continue;
          if (point_segment_sq(p, q, 0.0, {a.a, a.b, 0.0}, {b.a, b.b, 0.0}) <= r2)
            out.at(p, q) = kIgnore;
        }
    });
  }
  return out;
}

MipAnnotationSet mips_from_3d_labels(const LabelVolume& labels3d,
                                     const std::vector<Axis>& axes,
                                     int margin_width) {
  int r = margin_radius(margin_width);
  if (axes.empty() || axes.size() > 3)
    throw std::invalid_argument("need 1-3 projection axes");
  std::vector<LabelImage> entries;
  for (Axis a : axes) {
    BinaryImage fg = project_labels_any(labels3d, a, {kForeground});
    LabelImage img(a, fg.dims, kBackground);
    if (r > 0) {
      auto sq = squared_distance_transform(fg.dims, fg.data);
      double r2 = double(r) * r;
      for (std::size_t p = 0; p < sq.size(); ++p)
        if (sq[p] <= r2) img.data[p] = kIgnore;
    }
    for (std::size_t p = 0; p < fg.data.size(); ++p)
      if (fg.data[p]) img.data[p] = kForeground;
    entries.push_back(std::move(img));
  }
  return make_mip_set(labels3d.dims, std::move(entries));
}

MipAnnotationSet mips_from_3d_labels(const CenterlineSet& lines, Dims3 dims,
                                     const std::vector<Axis>& axes,
                                     int margin_width) {
  return mips_from_3d_labels(rasterize(lines, dims, 1), axes, margin_width);
}

}  // namespace mipseg
