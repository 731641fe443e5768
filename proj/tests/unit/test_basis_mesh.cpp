#include <doctest.h>

#include "hdgml/basis.hpp"
#include "hdgml/mesh.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <set>

using namespace hdgml;

TEST_CASE("gauss rule integrates monomials up to degree 2n-1") {
  for (int n = 1; n <= 12; ++n) {
    const auto r = gauss_legendre(n);
    for (int d = 0; d <= 2 * n - 1; ++d) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.points[i], d);
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("GLL nodes and lagrange basis") {
  for (int p = 1; p <= 10; ++p) {
    const auto nodes = gll_nodes(p);
    REQUIRE(nodes.size() == static_cast<size_t>(p + 1));
    CHECK(nodes.front() == doctest::Approx(-1.0));
    CHECK(nodes.back() == doctest::Approx(1.0));
    for (size_t i = 1; i < nodes.size(); ++i) CHECK(nodes[i] > nodes[i - 1]);
    const LagrangeBasis b(p);
    for (int i = 0; i <= p; ++i)
      for (int j = 0; j <= p; ++j) CHECK(b.value(i, nodes[j]) == doctest::Approx(i == j ? 1.0 : 0.0));
    // partition of unity and zero-sum derivative
    for (double x : {-0.9, -0.3, 0.1, 0.77}) {
      double s = 0.0, ds = 0.0;
      for (int i = 0; i <= p; ++i) {
        s += b.value(i, x);
        ds += b.derivative(i, x);
      }
      CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(std::abs(ds) < 1e-9);
    }
    // interpolated x^p differentiates exactly
    for (double x : {-0.5, 0.25}) {
      double d = 0.0;
      for (int i = 0; i <= p; ++i) d += std::pow(nodes[i], p) * b.derivative(i, x);
      CHECK(d == doctest::Approx(p * std::pow(x, p - 1)).epsilon(1e-10));
    }
    CHECK(b.mass().sum() == doctest::Approx(2.0).epsilon(1e-13));
  }
}

TEST_CASE("structured mesh numbering") {
  const StructuredMesh m(4, {0, 2, 0, 1});
  CHECK(m.edge_count() == 40);
  CHECK(m.hx() == doctest::Approx(0.5));
  CHECK(m.hy() == doctest::Approx(0.25));
  int boundary = 0;
  for (int e = 0; e < m.edge_count(); ++e) boundary += m.is_boundary(e);
  CHECK(boundary == 16);
  for (int e = 0; e < m.element_count(); ++e) {
    for (int f : {south, east, north, west}) {
      const auto adj = m.edge_elements(m.face_edge(e, f));
      CHECK((adj[0] == e || adj[1] == e));
      CHECK((adj[1] == -1) == m.is_boundary(m.face_edge(e, f)));
    }
  }
  const auto p = m.edge_endpoints(m.vertical_edge(4, 1));
  CHECK(p[0] == doctest::Approx(2.0));
  CHECK(p[1] == doctest::Approx(0.25));
  CHECK(p[3] == doctest::Approx(0.5));
  const auto n = m.boundary_normal(m.vertical_edge(4, 1));
  CHECK(n[0] == 1.0);
}

TEST_CASE("hierarchy front counts") {
  const auto h = build_hierarchy(3);
  REQUIRE(h.fronts().size() == 3);
  CHECK(h.fronts()[0].size() == 16);
  CHECK(h.fronts()[1].size() == 4);
  CHECK(h.fronts()[2].size() == 1);
  for (int k = 1; k <= 3; ++k)
    for (const auto& f : h.fronts()[k - 1])
      for (const auto& arm : f.arms) CHECK(arm.size() == static_cast<size_t>(1 << (k - 1)));
  const auto h2 = build_hierarchy(2);
  CHECK(h2.elimination_order().size() == 24);
  CHECK_THROWS(build_hierarchy(1));
}

TEST_CASE("hierarchy partitions the interior edges") {
  for (int levels = 2; levels <= 6; ++levels) {
    const auto h = build_hierarchy(levels);
    const auto& mesh = h.mesh();
    std::multiset<int> owned;
    for (const auto& lvl : h.fronts())
      for (const auto& f : lvl)
        for (const auto& arm : f.arms) owned.insert(arm.begin(), arm.end());
    std::set<int> interior;
    for (int e = 0; e < mesh.edge_count(); ++e)
      if (!mesh.is_boundary(e)) interior.insert(e);
    CHECK(owned.size() == interior.size());
    CHECK(std::set<int>(owned.begin(), owned.end()) == interior);
    CHECK(std::set<int>(h.elimination_order().begin(), h.elimination_order().end()) == interior);
    // elimination order is level-ascending
    int last = 0;
    for (int e : h.elimination_order()) {
      CHECK(h.edges()[e].nd_level >= last);
      last = h.edges()[e].nd_level;
    }
  }
}

namespace {
int find_root(std::vector<int>& parent, int x) {
  while (parent[x] != x) x = parent[x] = parent[parent[x]];
  return x;
}
}  // namespace

TEST_CASE("separators decouple 2^k x 2^k blocks") {
  const int levels = 4;
  const auto h = build_hierarchy(levels);
  const auto& mesh = h.mesh();
  for (int k = 0; k <= levels; ++k) {
    std::vector<int> parent(mesh.element_count());
    std::iota(parent.begin(), parent.end(), 0);
    for (int e = 0; e < mesh.edge_count(); ++e) {
      if (mesh.is_boundary(e) || h.edges()[e].nd_level > k) continue;
      const auto el = mesh.edge_elements(e);
      parent[find_root(parent, el[0])] = find_root(parent, el[1]);
    }
    std::map<int, std::set<int>> comps;
    for (int e = 0; e < mesh.element_count(); ++e) comps[find_root(parent, e)].insert(e);
    CHECK(comps.size() == static_cast<size_t>(1) << (2 * (levels - k)));
    for (const auto& [root, elems] : comps) {
      CHECK(elems.size() == (static_cast<size_t>(1) << (2 * k)));
      const auto ij = mesh.element_index(*elems.begin());
      for (int e : elems) {
        const auto kl = mesh.element_index(e);
        CHECK((kl[0] >> k) == (ij[0] >> k));
        CHECK((kl[1] >> k) == (ij[1] >> k));
      }
    }
  }
}

TEST_CASE("lumping map") {
  const auto h = build_hierarchy(4, {0, 2, 0, 2});
  const auto map = build_lumping_map(h);
  REQUIRE(map.lumped.size() == 4);
  for (int k = 1; k <= 4; ++k) {
    CHECK(map.lumped[k - 1].size() == h.fronts()[k - 1].size() * 4);
    for (const auto& le : map.lumped[k - 1]) {
      CHECK(le.fine_edges.size() == static_cast<size_t>(1 << (k - 1)));
      double len = 0.0;
      for (int e : le.fine_edges) len += h.mesh().edge_length(e);
      CHECK(len == doctest::Approx(le.length).epsilon(1e-15));
      const double ext = std::hypot(le.extent[2] - le.extent[0], le.extent[3] - le.extent[1]);
      CHECK(ext == doctest::Approx(le.length).epsilon(1e-14));
    }
  }
  // level-2 front: 8 fine edges in 4 lumped edges; level-3: 16 in 4
  size_t fine2 = 0, fine3 = 0;
  for (int a = 0; a < 4; ++a) {
    fine2 += map.at(2, 0, a).fine_edges.size();
    fine3 += map.at(3, 0, a).fine_edges.size();
  }
  CHECK(fine2 == 8);
  CHECK(fine3 == 16);
  CHECK(map.at(1, 3, arm_north).fine_edges == h.front(1, 3).arms[arm_north]);
}

TEST_CASE("morton index interleaves bits") {
  CHECK(morton_index(0, 0) == 0);
  CHECK(morton_index(1, 0) == 1);
  CHECK(morton_index(0, 1) == 2);
  CHECK(morton_index(3, 3) == 15);
  CHECK(morton_index(2, 1) == 6);
}
