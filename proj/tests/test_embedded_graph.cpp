#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>

#include "perc/embedded_graph.hpp"
#include "perc/graph_io.hpp"
#include "support/checks.hpp"

using namespace perc;

namespace {

// Triangle drawn counterclockwise: (0,0), (1,0), (0.5,1).
embedded_graph triangle() {
  graph_builder b;
  b.add_vertex({}, point{0, 0});
  b.add_vertex({}, point{1, 0});
  b.add_vertex({}, point{0.5, 1});
  b.set_rotation(0, {1, 2});
  b.set_rotation(1, {2, 0});
  b.set_rotation(2, {0, 1});
  return b.build();
}

// Outer triangle 0,1,2 counterclockwise with 3 in the center.
embedded_graph k4_planar() {
  graph_builder b;
  for (int i = 0; i < 4; ++i) b.add_vertex();
  b.set_rotation(0, {1, 3, 2});
  b.set_rotation(1, {2, 3, 0});
  b.set_rotation(2, {0, 3, 1});
  b.set_rotation(3, {2, 0, 1});
  return b.build();
}

embedded_graph square() {
  graph_builder b;
  for (int i = 0; i < 4; ++i) b.add_vertex();
  b.set_rotation(0, {1, 3});
  b.set_rotation(1, {2, 0});
  b.set_rotation(2, {3, 1});
  b.set_rotation(3, {2, 0});
  return b.build();
}

embedded_graph path(int n, bool frontier_ends) {
  graph_builder b;
  for (int i = 0; i < n; ++i) b.add_vertex();
  for (int i = 0; i < n; ++i) {
    std::vector<int> rot;
    if (i + 1 < n) rot.push_back(i + 1);
    if (i > 0) rot.push_back(i - 1);
    b.set_rotation(i, rot);
  }
  if (frontier_ends) {
    b.mark_frontier(0);
    b.mark_frontier(n - 1);
  }
  return b.build();
}

std::multiset<int> face_sizes(const embedded_graph& g) {
  std::multiset<int> out;
  for (auto& f : g.faces()) out.insert(int(f.walk.size()));
  return out;
}

}  // namespace

TEST_CASE("builder validates the rotation system") {
  SECTION("asymmetric rotation") {
    graph_builder b;
    b.add_vertex();
    b.add_vertex();
    b.set_rotation(0, {1});
    REQUIRE_ERRC(b.build(), errc::asymmetric_rotation);
  }
  SECTION("self loop") {
    graph_builder b;
    b.add_vertex();
    b.set_rotation(0, {0});
    REQUIRE_ERRC(b.build(), errc::self_loop);
  }
  SECTION("repeated neighbor") {
    graph_builder b;
    b.add_vertex();
    b.add_vertex();
    b.set_rotation(0, {1, 1});
    b.set_rotation(1, {0});
    REQUIRE_ERRC(b.build(), errc::duplicate_neighbor);
  }
  SECTION("unknown id in rotation") {
    graph_builder b;
    b.add_vertex();
    b.set_rotation(0, {5});
    REQUIRE_ERRC(b.build(), errc::unknown_vertex);
  }
  SECTION("coordinates are all-or-nothing") {
    graph_builder b;
    b.add_vertex({}, point{0, 0});
    b.add_vertex();
    REQUIRE_ERRC(b.build(), errc::missing_coordinates);
  }
  SECTION("coordinates must be distinct") {
    graph_builder b;
    b.add_vertex({}, point{1, 2});
    b.add_vertex({}, point{1, 2});
    REQUIRE_ERRC(b.build(), errc::precondition_violated);
  }
  SECTION("labels must be distinct") {
    graph_builder b;
    b.add_vertex({1, 0, 1});
    b.add_vertex({1, 0, 1});
    REQUIRE_ERRC(b.build(), errc::label_mismatch);
  }
}

TEST_CASE("label lookup") {
  graph_builder b;
  b.add_vertex({1, 0, 1});
  b.add_vertex({1, 1, 1});
  b.add_vertex({2, 1, 1});
  b.add_vertex();  // unlabeled
  auto g = b.build();
  REQUIRE(g.has_labels());
  REQUIRE(g.find_label(1, 0, 1) == 0);
  REQUIRE(g.find_label(1, 1, 1) == 1);
  REQUIRE(g.find_label(2, 1, 1) == 2);
  REQUIRE(g.find_label(2, 0, 1) == -1);
  REQUIRE_FALSE(g.label(3).present());
}

TEST_CASE("faces of small embeddings") {
  SECTION("triangle: inner face and outer face") {
    auto g = triangle();
    auto fs = g.faces();
    REQUIRE(fs.size() == 2);
    REQUIRE(face_sizes(g) == std::multiset<int>{3, 3});
    // all faces finite: no frontier
    for (auto& f : fs) REQUIRE(f.finite);
    // Euler: V - E + F = 2
    REQUIRE(g.vertex_count() - g.edge_count() + std::int64_t(fs.size()) == 2);
  }
  SECTION("square: two quadrilateral faces") {
    auto g = square();
    REQUIRE(face_sizes(g) == std::multiset<int>{4, 4});
  }
  SECTION("K4: four triangles") {
    auto g = k4_planar();
    auto fs = g.faces();
    REQUIRE(face_sizes(g) == std::multiset<int>{3, 3, 3, 3});
    REQUIRE(g.vertex_count() - g.edge_count() + std::int64_t(fs.size()) == 2);
    // the inner face 0,1,3 appears with counterclockwise orientation
    bool found = false;
    for (auto& f : fs) {
      auto w = f.walk;
      auto it = std::find(w.begin(), w.end(), 0);
      std::rotate(w.begin(), it, w.end());
      if (w == std::vector<int>{0, 1, 3}) found = true;
    }
    REQUIRE(found);
  }
  SECTION("frontier vertices make faces infinite") {
    auto g = path(3, true);
    auto fs = g.faces();
    REQUIRE(fs.size() == 1);
    REQUIRE(fs[0].walk.size() == 4);  // 0,1,2,1
    REQUIRE_FALSE(fs[0].finite);
  }
}

TEST_CASE("distances") {
  auto g = path(5, false);
  REQUIRE(g.bfs_distance(0, 4) == 4);
  REQUIRE(g.bfs_distance(2, 2) == 0);
  std::vector<char> region(5, 1);
  region[2] = 0;
  REQUIRE(g.bfs_distance(0, 4, &region) == -1);
  REQUIRE(g.bfs_distance(0, 1, &region) == 1);
  REQUIRE_ERRC(g.bfs_distance(0, 9), errc::unknown_vertex);
}

TEST_CASE("interior of a vertex set") {
  SECTION("path with frontier ends") {
    auto g = path(5, true);
    // 1,2,3 have all neighbors inside {0..4}; 0 and 4 are frontier
    REQUIRE(g.interior({0, 1, 2, 3, 4}) == std::vector<int>{1, 2, 3});
    REQUIRE(g.interior({1, 2, 3}) == std::vector<int>{2});
    REQUIRE(g.interior({2}).empty());
  }
  SECTION("whole triangle is its own interior") {
    auto g = triangle();
    REQUIRE(g.interior({0, 1, 2}) == std::vector<int>{0, 1, 2});
  }
}

TEST_CASE("components after removal") {
  auto g = path(5, true);
  SECTION("splitting the middle") {
    auto r = g.components_after_removal({2});
    REQUIRE(r.count == 2);
    REQUIRE(r.component[2] == -1);
    REQUIRE(r.component[0] == r.component[1]);
    REQUIRE(r.component[3] == r.component[4]);
    REQUIRE(r.component[0] != r.component[3]);
    REQUIRE(r.infinite_proxy[r.component[0]] == 1);
    REQUIRE(r.infinite_proxy[r.component[4]] == 1);
  }
  SECTION("finite pieces are not flagged") {
    auto r = g.components_after_removal({1, 3});
    REQUIRE(r.count == 3);
    REQUIRE(r.infinite_proxy[r.component[2]] == 0);
    REQUIRE(r.infinite_proxy[r.component[0]] == 1);
  }
  SECTION("no frontier, no proxy") {
    auto t = triangle();
    auto r = t.components_after_removal({0});
    REQUIRE(r.count == 1);
    REQUIRE(r.infinite_proxy[0] == 0);
  }
}

TEST_CASE("induced subgraph") {
  auto g = k4_planar();
  auto h = induce(g, {0, 1, 2});
  REQUIRE(h.vertex_count() == 3);
  REQUIRE(h.edge_count() == 3);
  // rotations keep their cyclic order after dropping vertex 3
  REQUIRE(std::vector<int>(h.neighbors(0).begin(), h.neighbors(0).end()) ==
          std::vector<int>{1, 2});
  auto p = path(4, true);
  auto q = induce(p, {1, 2});
  REQUIRE(q.vertex_count() == 2);
  REQUIRE(q.frontier().empty());
  REQUIRE_ERRC(induce(g, {0, 0}), errc::duplicate_neighbor);
}

TEST_CASE("graph text round trip") {
  SECTION("labels, coordinates and frontier survive") {
    graph_builder b;
    b.add_vertex({1, 0, 1}, point{0, 0});
    b.add_vertex({1, 1, 2}, point{0.1, -3.25});
    b.add_vertex({}, point{1.0 / 3.0, 2});
    b.set_rotation(0, {1, 2});
    b.set_rotation(1, {2, 0});
    b.set_rotation(2, {0, 1});
    b.mark_frontier(2);
    auto g = b.build();
    auto text = emit_graph(g);
    auto h = parse_graph(text);
    REQUIRE(emit_graph(h) == text);
    REQUIRE(h.vertex_count() == 3);
    REQUIRE(h.label(1) == vertex_label{1, 1, 2});
    REQUIRE(h.coord(2).x == 1.0 / 3.0);
    REQUIRE(h.is_frontier(2));
    REQUIRE_FALSE(h.is_frontier(0));
  }
  SECTION("plain graph without decorations") {
    auto g = square();
    REQUIRE(emit_graph(parse_graph(emit_graph(g))) == emit_graph(g));
  }
  SECTION("comments and blank lines are ignored") {
    auto g = parse_graph("pg 1\n# hello\n\nv 0\nv 1\nr 0 1\nr 1 0\n");
    REQUIRE(g.vertex_count() == 2);
    REQUIRE(g.edge_count() == 1);
  }
}

TEST_CASE("graph text rejects malformed input") {
  REQUIRE_ERRC(parse_graph("v 0\n"), errc::graph_parse);               // no header
  REQUIRE_ERRC(parse_graph("pg 2\n"), errc::graph_parse);              // wrong version
  REQUIRE_ERRC(parse_graph("pg 1\nv 1\n"), errc::graph_parse);         // ids not consecutive
  REQUIRE_ERRC(parse_graph("pg 1\nv 0 color=red\nr 0\n"), errc::graph_parse);
  REQUIRE_ERRC(parse_graph("pg 1\nv 0 x=1\nr 0\n"), errc::graph_parse);  // x without y
  REQUIRE_ERRC(parse_graph("pg 1\nv 0 depth=1\nr 0\n"), errc::graph_parse);
  REQUIRE_ERRC(parse_graph("pg 1\nv 0\n"), errc::graph_parse);         // missing r line
  REQUIRE_ERRC(parse_graph("pg 1\nv 0\nr 0\nr 0\n"), errc::graph_parse);
  REQUIRE_ERRC(parse_graph("pg 1\nv 0\nr 0\nf 3\n"), errc::graph_parse);
  REQUIRE_ERRC(parse_graph("pg 1\nv 0\nr 0 1x\n"), errc::graph_parse);
  REQUIRE_ERRC(parse_graph("pg 1\nzz\n"), errc::graph_parse);
  // structural problems surface with their own codes
  REQUIRE_ERRC(parse_graph("pg 1\nv 0\nv 1\nr 0 1\nr 1\n"), errc::asymmetric_rotation);
}
