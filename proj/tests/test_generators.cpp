#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <set>
#include <vector>

#include "perc/adic.hpp"
#include "perc/embedded_graph.hpp"
#include "perc/generators.hpp"
#include "perc/graph_io.hpp"
#include "support/checks.hpp"

using namespace perc;

namespace {

// straight BFS reachability, used as a connectivity oracle
int reachable_count(const embedded_graph& g, int src) {
  std::vector<char> seen(g.vertex_count(), 0);
  std::vector<int> queue{src};
  seen[src] = 1;
  for (std::size_t h = 0; h < queue.size(); ++h)
    for (int w : g.neighbors(queue[h]))
      if (!seen[w]) seen[w] = 1, queue.push_back(w);
  return int(queue.size());
}

int up_neighbor_count(const embedded_graph& g, int v) {
  int up = 0;
  for (int w : g.neighbors(v))
    if (g.label(w).depth < g.label(v).depth) ++up;
  return up;
}

embedded_graph counterexample(int M, int d, int N) {
  return counterexample_graph(adic_params{M, d, N});
}

}  // namespace

TEST_CASE("digit word addresses") {
  std::array<int, 3> w101 = {1, 0, 1};
  CHECK(addr(2, w101) == 5);
  std::array<int, 2> w21 = {2, 1};
  CHECK(addr(3, w21) == 7);
  std::array<int, 4> zeros = {0, 0, 0, 0};
  CHECK(addr(2, zeros) == 0);
  CHECK(prefix_address(2, w101, 0) == 0);
  CHECK(prefix_address(2, w101, 2) == 2);

  std::array<int, 1> bad = {3};
  REQUIRE_ERRC(addr(3, bad), errc::digit_out_of_range);
  REQUIRE_ERRC(prefix_address(2, w101, 4), errc::depth_out_of_range);
}

TEST_CASE("group endpoint columns") {
  adic_params p{2, 3, 3};
  std::array<int, 3> b = {1, 0, 0};
  CHECK(lr_boundary(p, b, 1, lr_side::left) == std::pair{1, std::uint64_t(5)});
  CHECK(lr_boundary(p, b, 1, lr_side::right) == std::pair{1, std::uint64_t(8)});
  CHECK(lr_boundary(p, b, 0, lr_side::left) == std::pair{0, std::uint64_t(1)});
  CHECK(lr_boundary(p, b, 0, lr_side::right) == std::pair{0, std::uint64_t(1)});
}

TEST_CASE("bary tree shape") {
  embedded_graph t = bary_tree(8, 2);
  REQUIRE(t.vertex_count() == 73);
  CHECK(t.edge_count() == 72);
  CHECK(int(t.frontier().size()) == 64);
  CHECK(t.degree(0) == 8);

  embedded_graph small = bary_tree(2, 0);
  REQUIRE(small.vertex_count() == 1);
  CHECK(small.is_frontier(0));

  embedded_graph deep = bary_tree(8, 3);
  for (int v = 0; v < deep.vertex_count(); ++v) {
    int depth = deep.label(v).depth;
    if (depth == 0) CHECK(deep.degree(v) == 8);
    if (depth == 1 || depth == 2) CHECK(deep.degree(v) == 9);
    if (depth == 3) CHECK(deep.degree(v) == 1);
  }

  REQUIRE_ERRC(bary_tree(8, 12), errc::size_overflow);
}

TEST_CASE("strip graph adds in-group horizontal edges") {
  adic_params p1{2, 3, 1};
  embedded_graph s1 = strip_graph(p1);
  REQUIRE(s1.vertex_count() == 9);
  // level 1 splits into two width-4 groups: 3 horizontal edges each
  CHECK(s1.edge_count() == 8 + 6);

  adic_params p2{2, 3, 2};
  embedded_graph s2 = strip_graph(p2);
  REQUIRE(s2.vertex_count() == 1 + 8 + 64);
  std::int64_t horizontal2 = 0;
  for (int v = 0; v < s2.vertex_count(); ++v)
    for (int w : s2.neighbors(v))
      if (s2.label(v).depth == 2 && s2.label(w).depth == 2 && v < w) ++horizontal2;
  CHECK(horizontal2 == 60);  // four width-16 groups

  // the group of column 17 on level 2 is addressed by the digit word (0,1)
  std::array<int, 2> word = {0, 1};
  std::uint64_t a = prefix_address(2, word, 2);
  CHECK(a * p2.group_size(2) + 1 == 17);
  int v17 = s2.find_label(1, 2, 17);
  int v16 = s2.find_label(1, 2, 16);
  REQUIRE(v17 >= 0);
  REQUIRE(v16 >= 0);
  CHECK(!s2.adjacent(v16, v17));  // group boundary between 16 and 17
  CHECK(s2.adjacent(v17, s2.find_label(1, 2, 18)));
}

TEST_CASE("fan triangulation of small faces") {
  // unit square, counterclockwise rotations
  graph_builder b;
  b.add_vertex({}, point{0, 1});
  b.add_vertex({}, point{1, 1});
  b.add_vertex({}, point{1, 0});
  b.add_vertex({}, point{0, 0});
  b.set_rotation(0, {3, 1});
  b.set_rotation(1, {0, 2});
  b.set_rotation(2, {1, 3});
  b.set_rotation(3, {2, 0});
  embedded_graph sq = b.build();

  embedded_graph t = fan_triangulate(sq);
  CHECK(t.edge_count() == 5);
  CHECK(t.adjacent(0, 2));  // chord from the top-left corner
  int triangles = 0;
  for (auto& f : t.faces())
    if (f.walk.size() == 3) ++triangles;
  CHECK(triangles == 2);

  // hexagon: three chords, all from the apex
  graph_builder hb;
  hb.add_vertex({}, point{0, 2});
  hb.add_vertex({}, point{1, 1});
  hb.add_vertex({}, point{1, -1});
  hb.add_vertex({}, point{0, -2});
  hb.add_vertex({}, point{-1, -1});
  hb.add_vertex({}, point{-1, 1});
  for (int v = 0; v < 6; ++v) hb.set_rotation(v, {(v + 5) % 6, (v + 1) % 6});
  embedded_graph hex = fan_triangulate(hb.build());
  CHECK(hex.edge_count() == 9);
  CHECK(hex.degree(0) == 5);

  graph_builder bare;
  bare.add_vertex();
  bare.add_vertex();
  bare.set_rotation(0, {1});
  bare.set_rotation(1, {0});
  REQUIRE_ERRC(fan_triangulate(bare.build()), errc::missing_coordinates);
}

TEST_CASE("triangulated strip has only triangle faces") {
  embedded_graph g = fan_triangulate(strip_graph(adic_params{2, 3, 2}));
  for (auto& f : g.faces())
    if (f.finite) CHECK(f.walk.size() == 3);
  // a second pass changes nothing
  CHECK(emit_graph(fan_triangulate(g)) == emit_graph(g));
}

TEST_CASE("doubling mirrors the strip and joins group endpoints") {
  adic_params p{2, 3, 1};
  embedded_graph g0 = double_and_glue(fan_triangulate(strip_graph(p)), p);
  REQUIRE(g0.vertex_count() == 18);
  CHECK(g0.edge_count() == 30);

  // exactly the endpoints of the first level-1 group are joined to the copy
  for (std::uint64_t j = 1; j <= 8; ++j) {
    int v1 = g0.find_label(1, 1, j);
    int v2 = g0.find_label(2, 1, j);
    REQUIRE(v1 >= 0);
    REQUIRE(v2 >= 0);
    CHECK(g0.adjacent(v1, v2) == (j == 1 || j == 4));
  }
  CHECK(!g0.adjacent(g0.find_label(1, 0, 1), g0.find_label(2, 0, 1)));

  // swapping the copies is an automorphism of the doubled graph
  auto twin = [&](int v) {
    auto l = g0.label(v);
    return g0.find_label(3 - l.copy, l.depth, l.index);
  };
  for (int v = 0; v < g0.vertex_count(); ++v) {
    REQUIRE(twin(v) >= 0);
    CHECK(g0.degree(twin(v)) == g0.degree(v));
    for (int w : g0.neighbors(v)) CHECK(g0.adjacent(twin(v), twin(w)));
  }
}

TEST_CASE("full construction: degrees and up-neighbors") {
  for (int N : {2, 3}) {
    embedded_graph g = counterexample(2, 3, N);
    REQUIRE(g.vertex_count() == 2 * int(adic_params{2, 3, N}.level_offset(N + 1)));
    for (int v = 0; v < g.vertex_count(); ++v) {
      CHECK(up_neighbor_count(g, v) <= 2);
      if (!g.is_frontier(v)) CHECK(g.degree(v) >= 8);
    }
    for (auto& f : g.faces())
      if (f.finite) CHECK(f.walk.size() == 3);
    CHECK(reachable_count(g, 0) == g.vertex_count());
  }
  REQUIRE_ERRC(counterexample_graph(adic_params{2, 3, 0}), errc::bad_parameters);
}

TEST_CASE("corridor of the all-zeros word") {
  adic_params p{2, 3, 3};
  std::array<int, 3> b = {0, 0, 0};
  embedded_graph single = corridor_graph(p, b, false);
  REQUIRE(single.vertex_count() == 1 + 4 + 16 + 64);
  CHECK(reachable_count(single, 0) == single.vertex_count());

  embedded_graph both = corridor_graph(p, b, true);
  REQUIRE(both.vertex_count() == 2 * 85);
  CHECK(reachable_count(both, 0) == both.vertex_count());

  std::array<int, 2> shortword = {0, 0};
  REQUIRE_ERRC(corridor_graph(p, shortword, true), errc::word_length_mismatch);
}

TEST_CASE("direct corridor builder matches the induced subgraph") {
  for (int M : {2, 3}) {
    adic_params p{M, 3, 3};
    embedded_graph full = counterexample_graph(p);
    embedded_graph tilde = fan_triangulate(strip_graph(p));
    std::array<int, 3> b{};
    for (b[0] = 0; b[0] < M; ++b[0])
      for (b[1] = 0; b[1] < M; ++b[1])
        for (b[2] = 0; b[2] < M; ++b[2]) {
          CAPTURE(M, b[0], b[1], b[2]);
          REQUIRE(emit_graph(corridor_graph(p, b, true)) ==
                  emit_graph(corridor_subgraph(full, p, b, true)));
          REQUIRE(emit_graph(corridor_graph(p, b, false)) ==
                  emit_graph(corridor_subgraph(tilde, p, b, false)));
        }
  }
  // depth 4 reaches the ten-cycle faces along the right edge
  adic_params p4{2, 3, 4};
  embedded_graph full4 = counterexample_graph(p4);
  std::array<int, 4> w{};
  for (int mask = 0; mask < 16; ++mask) {
    for (int t = 0; t < 4; ++t) w[t] = (mask >> t) & 1;
    CAPTURE(mask);
    REQUIRE(emit_graph(corridor_graph(p4, w, true)) ==
            emit_graph(corridor_subgraph(full4, p4, w, true)));
  }
}

TEST_CASE("corridors of a wider alphabet stay consistent") {
  // spot checks at M = 5: the direct builder agrees with the induced
  // subgraph of the full graph at a depth where both are materializable
  adic_params p{5, 3, 2};
  embedded_graph full = counterexample_graph(p);
  for (std::array<int, 2> b : {std::array<int, 2>{0, 0}, {4, 4}, {2, 3}, {1, 0}, {3, 4}})
    REQUIRE(emit_graph(corridor_graph(p, b, true)) ==
            emit_graph(corridor_subgraph(full, p, b, true)));
}

TEST_CASE("triangular lattice patch") {
  crossing_patch patch = triangular_lattice(2);
  REQUIRE(patch.graph.vertex_count() == 9);
  CHECK(patch.graph.degree(4) == 6);  // the single interior vertex
  CHECK(patch.left.size() == 3);
  CHECK(patch.right.size() == 3);
  CHECK(patch.bottom.size() == 3);
  CHECK(patch.top.size() == 3);
  for (auto& f : patch.graph.faces())
    if (f.finite) CHECK(f.walk.size() == 3);

  crossing_patch big = triangular_lattice(8);
  int interior = 0;
  for (int v = 0; v < big.graph.vertex_count(); ++v)
    if (!big.graph.is_frontier(v)) {
      ++interior;
      CHECK(big.graph.degree(v) == 6);
    }
  CHECK(interior == 49);
}

TEST_CASE("coned tree") {
  embedded_graph c1 = cone_tree(1);
  REQUIRE(c1.vertex_count() == 9);
  CHECK(c1.degree(8) == 8);  // apex sees every tree vertex

  embedded_graph c2 = cone_tree(2);
  int n = c2.vertex_count();
  REQUIRE(n == 58);
  int apex = n - 1;
  CHECK(c2.degree(apex) == 57);
  CHECK(c2.is_frontier(apex));
  // Euler relation for the combinatorial map
  std::int64_t faces = std::int64_t(c2.faces().size());
  CHECK(n - c2.edge_count() + faces == 2);
  // tree leaves remain frontier
  for (int v = 0; v + 1 < n; ++v)
    CHECK(c2.is_frontier(v) == (c2.label(v).depth == 2));
}
