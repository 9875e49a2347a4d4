#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "perc/generators.hpp"
#include "perc/phi.hpp"
#include "support/checks.hpp"
#include "support/phi_oracle.hpp"

using namespace perc;

namespace {

// 0 - 1 - ... - (n-1)
embedded_graph line(int n) {
  graph_builder b;
  for (int i = 0; i < n; ++i) b.add_vertex();
  for (int i = 0; i < n; ++i) {
    std::vector<int> rot;
    if (i + 1 < n) rot.push_back(i + 1);
    if (i > 0) rot.push_back(i - 1);
    b.set_rotation(i, rot);
  }
  return b.build();
}

// Two 4-cycles joined through a cut vertex, a wheel hub in the first block.
embedded_graph two_blocks() {
  graph_builder b;
  for (int i = 0; i < 10; ++i) b.add_vertex();
  b.set_rotation(0, {1, 4, 3});
  b.set_rotation(1, {2, 4, 0});
  b.set_rotation(2, {3, 4, 1, 5});
  b.set_rotation(3, {0, 4, 2});
  b.set_rotation(4, {0, 1, 2, 3});
  b.set_rotation(5, {2, 6});
  b.set_rotation(6, {5, 7, 9});
  b.set_rotation(7, {6, 8});
  b.set_rotation(8, {7, 9});
  b.set_rotation(9, {8, 6});
  return b.build();
}

std::vector<int> ball(const embedded_graph& g, int center, int radius) {
  std::set<int> out{center};
  std::vector<int> frontier{center};
  for (int r = 0; r < radius; ++r) {
    std::vector<int> next;
    for (int v : frontier)
      for (int w : g.neighbors(v))
        if (out.insert(w).second) next.push_back(w);
    frontier = std::move(next);
  }
  return {out.begin(), out.end()};
}

}  // namespace

TEST_CASE("a straight segment admits exactly two open routes out") {
  embedded_graph g = line(9);
  std::vector<int> S{2, 3, 4, 5, 6};
  for (double p : {0.0, 0.25, 0.5, 0.8, 1.0}) {
    phi_estimate e = phi_value(g, p, 4, S);
    CHECK(e.method == estimate_method::exact);
    CHECK(e.se == 0.0);
    CHECK(e.value == Catch::Approx(2 * p * p).margin(1e-14));
    REQUIRE(e.value == testing::phi_reference(g, p, 4, S));
  }
  CHECK(phi_value(g, 0.0, 4, S).value == 0.0);
  CHECK(phi_value(g, 1.0, 4, S).value == 2.0);

  phi_estimate mc = phi_value(g, 0.5, 4, S, estimate_method::monte_carlo, 30000, 11);
  CHECK(mc.method == estimate_method::monte_carlo);
  CHECK(mc.se > 0);
  CHECK(std::abs(mc.value - 0.5) < 4 * mc.se + 1e-9);
  phi_estimate mc2 = phi_value(g, 0.5, 4, S, estimate_method::monte_carlo, 30000, 11);
  CHECK(mc2.value == mc.value);  // replay determinism
}

TEST_CASE("boundary and frontier starts short-circuit to one") {
  embedded_graph g = line(9);
  std::vector<int> S{2, 3, 4, 5, 6};
  for (double p : {0.1, 0.9}) {
    CHECK(phi_value(g, p, 2, S).value == 1.0);
    CHECK(phi_value(g, p, 6, S).value == 1.0);
    CHECK(testing::phi_reference(g, p, 2, S) == 1.0);
  }

  // a frontier vertex is never interior even with all neighbors in S
  embedded_graph strip = strip_graph({2, 3, 1});
  std::vector<int> all(strip.vertex_count());
  std::iota(all.begin(), all.end(), 0);
  int deep = strip.frontier().front();
  CHECK(phi_value(strip, 0.5, deep, all).value == 1.0);
}

TEST_CASE("exact phi equals the brute-force reference bit for bit") {
  std::vector<embedded_graph> graphs;
  graphs.push_back(triangular_lattice(5).graph);
  graphs.push_back(bary_tree(2, 4));
  graphs.push_back(bary_tree(3, 3));
  graphs.push_back(strip_graph({2, 3, 2}));
  graphs.push_back(corridor_graph({2, 3, 2}, std::vector<int>{0, 1}, true));
  graphs.push_back(counterexample_graph({2, 3, 2}));

  int checked = 0;
  for (const embedded_graph& g : graphs) {
    int n = g.vertex_count();
    for (int pick = 0; pick < 7; ++pick) {
      int center = int((std::uint64_t(pick) * 2654435761ull + 17) % std::uint64_t(n));
      for (int radius : {1, 2}) {
        std::vector<int> S = ball(g, center, radius);
        if (int(g.interior(S).size()) > 12) continue;
        for (double p : {0.3, 0.5, 0.77}) {
          phi_estimate e = phi_value(g, p, center, S);
          REQUIRE(e.value == testing::phi_reference(g, p, center, S));
        }
        ++checked;
      }
    }
  }
  CHECK(checked >= 50);
}

TEST_CASE("phi argument checking") {
  embedded_graph lat = triangular_lattice(8).graph;
  int center = lat.vertex_count() / 2;
  std::vector<int> big = ball(lat, center, 4);
  REQUIRE(lat.interior(big).size() > 20);
  REQUIRE_ERRC(phi_value(lat, 0.5, center, big), errc::interior_too_large_for_exact);

  embedded_graph g = line(9);
  REQUIRE_ERRC(phi_value(g, 0.5, 0, {2, 3, 4}), errc::vertex_not_in_s);
  REQUIRE_ERRC(phi_value(g, 1.2, 3, {2, 3, 4}), errc::bad_probability);
  REQUIRE_ERRC(phi_value(g, 0.5, 3, {2, 3, 4}, estimate_method::monte_carlo, 0),
               errc::bad_parameters);
}

TEST_CASE("exact phi never falls as p rises") {
  embedded_graph lat = triangular_lattice(5).graph;
  int center = lat.vertex_count() / 2;
  std::vector<int> S = ball(lat, center, 1);
  double prev = -1;
  for (double p = 0.0; p <= 1.0001; p += 0.1) {
    double v = phi_value(lat, std::min(p, 1.0), center, S).value;
    REQUIRE(v >= prev - 1e-12);
    prev = v;
  }
}

TEST_CASE("crossing factorization holds exactly on enumerable instances") {
  embedded_graph g = line(9);
  std::vector<int> all9(9);
  std::iota(all9.begin(), all9.end(), 0);

  embedded_graph blocks = two_blocks();
  std::vector<int> all10(10);
  std::iota(all10.begin(), all10.end(), 0);

  for (double p : {0.2, 0.5, 0.8}) {
    cutset_report a = cutset_inequality_check(g, p, 4, {2, 3, 4, 5, 6}, all9, {0, 8});
    REQUIRE(a.exact);
    REQUIRE(a.holds);
    // the left side agrees with the independent double enumerator
    CHECK(a.lhs ==
          Catch::Approx(connectivity_probability_exact(g, 4, {0, 8}, p, all9).value)
              .margin(1e-9));

    cutset_report b = cutset_inequality_check(blocks, p, 4, {0, 1, 2, 3, 4}, all10, {8});
    REQUIRE(b.exact);
    REQUIRE(b.holds);
    CHECK(b.rhs <= 1.0 + 1e-12);

    // boundary start: the factorization collapses to equality
    cutset_report c = cutset_inequality_check(blocks, p, 2, {0, 1, 2, 3, 4}, all10, {8});
    REQUIRE(c.holds);
    REQUIRE(c.lhs == c.rhs);
  }

  REQUIRE_ERRC(cutset_inequality_check(g, 0.5, 0, {2, 3, 4}, all9, {8}),
               errc::precondition_violated);
  REQUIRE_ERRC(cutset_inequality_check(g, 0.5, 3, {2, 3, 4}, {2, 3, 5}, {8}),
               errc::precondition_violated);
  REQUIRE_ERRC(cutset_inequality_check(g, 0.5, 3, {2, 3, 4}, all9, {4, 8}),
               errc::precondition_violated);

  embedded_graph lat = triangular_lattice(4).graph;
  std::vector<int> a15(15);
  std::iota(a15.begin(), a15.end(), 0);
  REQUIRE_ERRC(cutset_inequality_check(lat, 0.5, 1, {0, 1}, a15, {20}),
               errc::region_too_large_for_exact);
}

TEST_CASE("crossing factorization holds under sampling noise") {
  embedded_graph blocks = two_blocks();
  std::vector<int> all10(10);
  std::iota(all10.begin(), all10.end(), 0);
  cutset_report rep = cutset_inequality_check(blocks, 0.5, 4, {0, 1, 2, 3, 4}, all10, {8},
                                              estimate_method::monte_carlo, 4000, 77);
  CHECK_FALSE(rep.exact);
  CHECK(rep.lhs_se > 0);
  CHECK(rep.holds);
}

TEST_CASE("threshold scan on the 8-ary tree brackets one over the branching") {
  embedded_graph tree = bary_tree(8, 3);
  std::vector<std::vector<int>> family{ball(tree, 0, 1), ball(tree, 0, 2)};
  std::vector<double> grid;
  for (int i = 1; i <= 40; ++i) grid.push_back(0.005 * i);

  phi_scan_report rep = phi_threshold_scan(tree, 0, family, grid, 0.2);
  REQUIRE(rep.rows.size() == 2 * grid.size());
  CHECK(rep.monotone == std::vector<char>{1, 1});

  // radius 1: phi = 8p; radius 2: phi = 64 p^2
  for (const phi_scan_row& row : rep.rows) {
    double want = row.family_index == 0 ? 8 * row.p : 64 * row.p * row.p;
    REQUIRE(row.value == Catch::Approx(want).margin(1e-10));
  }
  // min(8p, 64p^2) <= 0.8 up to p = sqrt(0.8)/8 ~ 0.1118
  CHECK(rep.threshold_proxy == Catch::Approx(0.110));

  REQUIRE_ERRC(phi_threshold_scan(tree, 0, {}, grid, 0.2), errc::empty_family);
  REQUIRE_ERRC(phi_threshold_scan(tree, 0, family, {}, 0.2), errc::empty_grid);
}

TEST_CASE("closed-form bounds evaluate and validate") {
  CHECK(supercritical_lower_bound(0.5, 0.3, 0.1) ==
        Catch::Approx(0.2612716470504427).margin(1e-12));
  CHECK(supercritical_lower_bound(0.3, 0.3, 0.1) == 0.0);
  CHECK(supercritical_lower_bound(0.999, 0.3, 0.1) > 0.99);
  double prev = 0;
  for (double p = 0.3; p < 0.95; p += 0.05) {
    double b = supercritical_lower_bound(p, 0.3, 0.1);
    REQUIRE(b >= prev);
    REQUIRE(b < 1.0);
    prev = b;
  }
  REQUIRE_ERRC(supercritical_lower_bound(0.2, 0.3, 0.1), errc::bad_parameters);
  REQUIRE_ERRC(supercritical_lower_bound(0.5, 0.0, 0.1), errc::bad_parameters);
  REQUIRE_ERRC(supercritical_lower_bound(0.5, 0.3, 1.0), errc::bad_parameters);

  decay_bound d = le85_bound(5, 0.05, 3);
  CHECK(d.base == Catch::Approx(0.89));
  CHECK(d.value == Catch::Approx(0.7049690000000001).margin(1e-12));
  CHECK_FALSE(d.vacuous);
  CHECK(d.theta == Catch::Approx(0.85));
  CHECK_FALSE(d.theta_converges);  // 5 * 0.85^2 > 1

  CHECK(le85_bound(2, 0.05, 2).vacuous);  // base (4 + 0.45)/2 > 1
  decay_bound wide = le85_bound(50, 0.01, 4);
  CHECK_FALSE(wide.vacuous);
  CHECK(wide.theta_converges);  // 50 * 0.09^2 < 1
  REQUIRE_ERRC(le85_bound(5, 0.05, 0), errc::bad_parameters);
  REQUIRE_ERRC(le85_bound(1, 0.05, 2), errc::bad_parameters);
  REQUIRE_ERRC(le85_bound(5, 0.0, 2), errc::bad_parameters);
}
