#pragma once

// Structured quadrilateral meshes, their skeleton, and the nested-dissection
// hierarchy of separator fronts (crosses) used by the multilevel solvers.
//
// Edge numbering: horizontal edge H(i, j) sits on grid line y = j and covers
// segment i; vertical edge V(i, j) sits on grid line x = i and covers segment j.
// Horizontal ids come first: H(i, j) -> j * n + i, V(i, j) -> n (n + 1) + i * n + j.

#include <array>
#include <cstdint>
#include <vector>

namespace hdgml {

struct Rectangle {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;

  static Rectangle unit_square() { return {}; }
};

enum class Orientation : std::uint8_t { horizontal, vertical };

/// Local face numbering of a quadrilateral element.
enum Face : int { south = 0, east = 1, north = 2, west = 3 };

class StructuredMesh {
 public:
  /// n x n elements on `domain`; n >= 1.
  StructuredMesh(int n_per_side, Rectangle domain = Rectangle::unit_square());

  int n() const { return n_; }
  const Rectangle& domain() const { return domain_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  int element_count() const { return n_ * n_; }
  int edge_count() const { return 2 * n_ * (n_ + 1); }

  int element_id(int i, int j) const { return j * n_ + i; }
  std::array<int, 2> element_index(int e) const { return {e % n_, e / n_}; }
  /// Lower-left corner of element e.
  std::array<double, 2> element_origin(int e) const;

  int horizontal_edge(int i, int j) const { return j * n_ + i; }
  int vertical_edge(int i, int j) const { return n_ * (n_ + 1) + i * n_ + j; }
  Orientation orientation(int edge) const {
    return edge < n_ * (n_ + 1) ? Orientation::horizontal : Orientation::vertical;
  }
  /// (line index, segment index) of an edge.
  std::array<int, 2> edge_index(int edge) const;
  bool is_boundary(int edge) const;
  double edge_length(int edge) const;
  /// Physical start/end points, ordered by increasing coordinate.
  std::array<double, 4> edge_endpoints(int edge) const;
  /// Outward unit normal of a boundary edge.
  std::array<double, 2> boundary_normal(int edge) const;

  /// Edge id of local face f of element e.
  int face_edge(int e, int f) const;
  /// Elements adjacent to an edge: (first, second); second = -1 on the boundary.
  std::array<int, 2> edge_elements(int edge) const;

 private:
  int n_;
  Rectangle domain_;
  double hx_;
  double hy_;
};

enum class EdgeKind : std::uint8_t { interior, boundary };

struct SkeletonEdge {
  int id = -1;
  Orientation orientation = Orientation::horizontal;
  std::array<int, 2> start{};  // grid coordinates
  std::array<int, 2> end{};
  EdgeKind kind = EdgeKind::interior;
  int nd_level = 0;  // 1..N for interior edges, 0 on the boundary
  int front_id = -1;
  int arm_id = -1;
  int position = -1;  // index along the arm, increasing coordinate
};

/// Arm numbering inside a cross: west, east (horizontal line), south, north (vertical line).
enum Arm : int { arm_west = 0, arm_east = 1, arm_south = 2, arm_north = 3 };

struct SeparatorFront {
  int level = 0;
  int index = 0;  // quadtree (Morton) index within the level
  int block_x = 0;
  int block_y = 0;
  std::array<std::vector<int>, 4> arms;  // fine edge ids per arm, increasing coordinate
};

class SkeletonHierarchy {
 public:
  int levels() const { return levels_; }
  const StructuredMesh& mesh() const { return mesh_; }
  const std::vector<SkeletonEdge>& edges() const { return edges_; }
  /// fronts()[k - 1] holds the level-k fronts in quadtree order.
  const std::vector<std::vector<SeparatorFront>>& fronts() const { return fronts_; }
  const SeparatorFront& front(int level, int index) const { return fronts_[level - 1][index]; }
  /// Interior edges in elimination order (level-ascending).
  const std::vector<int>& elimination_order() const { return order_; }
  /// Level-1 front index of the 2x2 block that contains element e.
  int level1_front_of_element(int e) const;

 private:
  friend SkeletonHierarchy build_hierarchy(int, Rectangle);
  explicit SkeletonHierarchy(StructuredMesh mesh) : mesh_(std::move(mesh)) {}

  StructuredMesh mesh_;
  int levels_ = 0;
  std::vector<SkeletonEdge> edges_;
  std::vector<std::vector<SeparatorFront>> fronts_;
  std::vector<int> order_;
};

/// 2^levels x 2^levels mesh with its nested-dissection hierarchy. levels >= 2.
SkeletonHierarchy build_hierarchy(int levels, Rectangle domain = Rectangle::unit_square());

/// Morton interleave of (x, y).
std::uint32_t morton_index(std::uint32_t x, std::uint32_t y);

struct LumpedEdge {
  int level = 0;
  int front = 0;
  int arm = 0;
  std::vector<int> fine_edges;   // increasing coordinate
  std::array<double, 4> extent{};  // physical start (x, y) and end (x, y)
  double length = 0.0;
};

struct LumpingMap {
  /// lumped[k - 1][front * 4 + arm]
  std::vector<std::vector<LumpedEdge>> lumped;
  const LumpedEdge& at(int level, int front, int arm) const {
    return lumped[level - 1][front * 4 + arm];
  }
};

LumpingMap build_lumping_map(const SkeletonHierarchy& hierarchy);

}  // namespace hdgml
