#include "hdgml/mesh.hpp"

#include <stdexcept>
#include <string>

namespace hdgml {

StructuredMesh::StructuredMesh(int n_per_side, Rectangle domain)
    : n_(n_per_side), domain_(domain) {
  if (n_ < 1) throw std::invalid_argument("StructuredMesh: need at least one element per side");
  if (!(domain_.x1 > domain_.x0) || !(domain_.y1 > domain_.y0))
    throw std::invalid_argument("StructuredMesh: empty domain");
  hx_ = (domain_.x1 - domain_.x0) / n_;
  hy_ = (domain_.y1 - domain_.y0) / n_;
}

std::array<double, 2> StructuredMesh::element_origin(int e) const {
  const auto [i, j] = element_index(e);
  return {domain_.x0 + i * hx_, domain_.y0 + j * hy_};
}

std::array<int, 2> StructuredMesh::edge_index(int edge) const {
  if (orientation(edge) == Orientation::horizontal) return {edge / n_, edge % n_};
  const int v = edge - n_ * (n_ + 1);
  return {v / n_, v % n_};
}

bool StructuredMesh::is_boundary(int edge) const {
  const int line = edge_index(edge)[0];
  return line == 0 || line == n_;
}

double StructuredMesh::edge_length(int edge) const {
  return orientation(edge) == Orientation::horizontal ? hx_ : hy_;
}

std::array<double, 4> StructuredMesh::edge_endpoints(int edge) const {
  const auto [line, seg] = edge_index(edge);
  if (orientation(edge) == Orientation::horizontal) {
    const double y = domain_.y0 + line * hy_;
    return {domain_.x0 + seg * hx_, y, domain_.x0 + (seg + 1) * hx_, y};
  }
  const double x = domain_.x0 + line * hx_;
  return {x, domain_.y0 + seg * hy_, x, domain_.y0 + (seg + 1) * hy_};
}

std::array<double, 2> StructuredMesh::boundary_normal(int edge) const {
  const int line = edge_index(edge)[0];
  if (orientation(edge) == Orientation::horizontal) return {0.0, line == 0 ? -1.0 : 1.0};
  return {line == 0 ? -1.0 : 1.0, 0.0};
}

int StructuredMesh::face_edge(int e, int f) const {
  const auto [i, j] = element_index(e);
  switch (f) {
    case south: return horizontal_edge(i, j);
    case east: return vertical_edge(i + 1, j);
    case north: return horizontal_edge(i, j + 1);
    case west: return vertical_edge(i, j);
    default: throw std::out_of_range("face_edge: bad face " + std::to_string(f));
  }
}

std::array<int, 2> StructuredMesh::edge_elements(int edge) const {
  const auto [line, seg] = edge_index(edge);
  std::array<int, 2> out{-1, -1};
  int k = 0;
  if (orientation(edge) == Orientation::horizontal) {
    if (line > 0) out[k++] = element_id(seg, line - 1);
    if (line < n_) out[k++] = element_id(seg, line);
  } else {
    if (line > 0) out[k++] = element_id(line - 1, seg);
    if (line < n_) out[k++] = element_id(line, seg);
  }
  return out;
}

std::uint32_t morton_index(std::uint32_t x, std::uint32_t y) {
  std::uint32_t m = 0;
  for (int b = 0; b < 16; ++b) {
    m |= ((x >> b) & 1u) << (2 * b);
    m |= ((y >> b) & 1u) << (2 * b + 1);
  }
  return m;
}

int SkeletonHierarchy::level1_front_of_element(int e) const {
  const auto [i, j] = mesh_.element_index(e);
  return static_cast<int>(morton_index(i >> 1, j >> 1));
}

SkeletonHierarchy build_hierarchy(int levels, Rectangle domain) {
  if (levels < 2) throw std::invalid_argument("build_hierarchy: need at least 2 levels");
  if (levels > 15) throw std::invalid_argument("build_hierarchy: too many levels");
  const int n = 1 << levels;
  SkeletonHierarchy h{StructuredMesh(n, domain)};
  h.levels_ = levels;
  const StructuredMesh& mesh = h.mesh_;

  h.edges_.resize(mesh.edge_count());
  for (int id = 0; id < mesh.edge_count(); ++id) {
    SkeletonEdge& e = h.edges_[id];
    const auto [line, seg] = mesh.edge_index(id);
    e.id = id;
    e.orientation = mesh.orientation(id);
    if (e.orientation == Orientation::horizontal) {
      e.start = {seg, line};
      e.end = {seg + 1, line};
    } else {
      e.start = {line, seg};
      e.end = {line, seg + 1};
    }
    e.kind = mesh.is_boundary(id) ? EdgeKind::boundary : EdgeKind::interior;
  }

  h.fronts_.resize(levels);
  for (int k = 1; k <= levels; ++k) {
    const int s = 1 << k;
    const int per_side = n / s;
    auto& fronts = h.fronts_[k - 1];
    fronts.resize(static_cast<std::size_t>(per_side) * per_side);
    for (int by = 0; by < per_side; ++by) {
      for (int bx = 0; bx < per_side; ++bx) {
        const int idx = static_cast<int>(morton_index(bx, by));
        SeparatorFront& f = fronts[idx];
        f.level = k;
        f.index = idx;
        f.block_x = bx;
        f.block_y = by;
        const int cx = bx * s + s / 2;
        const int cy = by * s + s / 2;
        for (int i = bx * s; i < cx; ++i) f.arms[arm_west].push_back(mesh.horizontal_edge(i, cy));
        for (int i = cx; i < (bx + 1) * s; ++i) f.arms[arm_east].push_back(mesh.horizontal_edge(i, cy));
        for (int j = by * s; j < cy; ++j) f.arms[arm_south].push_back(mesh.vertical_edge(cx, j));
        for (int j = cy; j < (by + 1) * s; ++j) f.arms[arm_north].push_back(mesh.vertical_edge(cx, j));
        for (int a = 0; a < 4; ++a) {
          for (std::size_t pos = 0; pos < f.arms[a].size(); ++pos) {
            SkeletonEdge& e = h.edges_[f.arms[a][pos]];
            if (e.nd_level != 0) throw std::logic_error("build_hierarchy: edge assigned twice");
            e.nd_level = k;
            e.front_id = idx;
            e.arm_id = a;
            e.position = static_cast<int>(pos);
          }
        }
      }
    }
    for (const auto& f : fronts)
      for (const auto& arm : f.arms) h.order_.insert(h.order_.end(), arm.begin(), arm.end());
  }
  return h;
}

LumpingMap build_lumping_map(const SkeletonHierarchy& hierarchy) {
  const StructuredMesh& mesh = hierarchy.mesh();
  LumpingMap map;
  map.lumped.resize(hierarchy.levels());
  for (int k = 1; k <= hierarchy.levels(); ++k) {
    const auto& fronts = hierarchy.fronts()[k - 1];
    auto& out = map.lumped[k - 1];
    out.resize(fronts.size() * 4);
    for (const auto& f : fronts) {
      for (int a = 0; a < 4; ++a) {
        LumpedEdge& le = out[f.index * 4 + a];
        le.level = k;
        le.front = f.index;
        le.arm = a;
        le.fine_edges = f.arms[a];
        const auto first = mesh.edge_endpoints(le.fine_edges.front());
        const auto last = mesh.edge_endpoints(le.fine_edges.back());
        le.extent = {first[0], first[1], last[2], last[3]};
        le.length = 0.0;
        for (int e : le.fine_edges) le.length += mesh.edge_length(e);
      }
    }
  }
  return map;
}

}  // namespace hdgml
