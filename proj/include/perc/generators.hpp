#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "perc/adic.hpp"
#include "perc/embedded_graph.hpp"
#include "perc/errors.hpp"

namespace perc {

// ---------------------------------------------------------------------------
// B-ary tree, levels 0..depth, level-order ids.  Level n sits on y = -n with
// column i at x = i * B^{depth-n}; the deepest level is the frontier.
// ---------------------------------------------------------------------------
inline embedded_graph bary_tree(int B, int depth,
                                std::uint64_t cap = default_vertex_cap) {
  require(B >= 2 && depth >= 0, errc::bad_parameters, "need B >= 2, depth >= 0");
  std::uint64_t total = 0, lvl = 1;
  std::vector<std::uint64_t> level_size(depth + 1), level_off(depth + 1);
  std::vector<std::uint64_t> xscale(depth + 1);
  for (int n = 0; n <= depth; ++n) {
    level_off[n] = total;
    level_size[n] = lvl;
    require(total + lvl >= total && total + lvl <= cap, errc::size_overflow,
            "tree exceeds vertex cap");
    total += lvl;
    if (n < depth)
      require(!__builtin_mul_overflow(lvl, std::uint64_t(B), &lvl),
              errc::size_overflow, "level size");
    require(checked_pow(std::uint64_t(B), unsigned(depth - n), xscale[n]),
            errc::size_overflow, "coordinate scale");
  }

  graph_builder b;
  for (int n = 0; n <= depth; ++n)
    for (std::uint64_t i = 1; i <= level_size[n]; ++i) {
      int v = b.add_vertex({1, n, i},
                           point{double(i) * double(xscale[n]), double(-n)});
      if (n == depth) b.mark_frontier(v);
    }
  for (int n = 0; n <= depth; ++n)
    for (std::uint64_t i = 1; i <= level_size[n]; ++i) {
      std::vector<int> rot;
      if (n > 0) rot.push_back(int(level_off[n - 1] + (i + B - 1) / B - 1));
      if (n < depth) {
        std::uint64_t first = std::uint64_t(B) * (i - 1) + 1;
        for (int c = 0; c < B; ++c)
          rot.push_back(int(level_off[n + 1] + first + c - 1));
      }
      b.set_rotation(int(level_off[n] + i - 1), std::move(rot));
    }
  return b.build();
}

// ---------------------------------------------------------------------------
// Strip graph: the B-ary tree plus horizontal edges between consecutive
// columns inside each width-s_n group.  Rotations run counterclockwise:
// right, parent, left, then children left to right.
// ---------------------------------------------------------------------------
inline embedded_graph strip_graph(const adic_params& params,
                                  std::uint64_t cap = default_vertex_cap) {
  params.validate();
  int N = params.N;
  std::uint64_t B = params.B();
  std::vector<std::uint64_t> level_size(N + 1), level_off(N + 1), group(N + 1),
      xscale(N + 1);
  std::uint64_t total = 0;
  for (int n = 0; n <= N; ++n) {
    level_off[n] = total;
    level_size[n] = params.level_size(n);
    group[n] = params.group_size(n);
    require(checked_pow(std::uint64_t(params.M), unsigned(params.d * (N - n)), xscale[n]),
            errc::size_overflow, "coordinate scale");
    require(total + level_size[n] >= total && total + level_size[n] <= cap,
            errc::size_overflow, "strip exceeds vertex cap");
    total += level_size[n];
  }

  graph_builder b;
  for (int n = 0; n <= N; ++n)
    for (std::uint64_t i = 1; i <= level_size[n]; ++i) {
      int v = b.add_vertex({1, n, i},
                           point{double(i) * double(xscale[n]), double(-n)});
      if (n == N) b.mark_frontier(v);
    }
  auto id = [&](int n, std::uint64_t i) { return int(level_off[n] + i - 1); };
  for (int n = 0; n <= N; ++n)
    for (std::uint64_t i = 1; i <= level_size[n]; ++i) {
      std::vector<int> rot;
      if (i < level_size[n] && i % group[n] != 0) rot.push_back(id(n, i + 1));
      if (n > 0) rot.push_back(id(n - 1, (i + B - 1) / B));
      if (i > 1 && (i - 1) % group[n] != 0) rot.push_back(id(n, i - 1));
      if (n < N) {
        std::uint64_t first = B * (i - 1) + 1;
        for (std::uint64_t c = 0; c < B; ++c) rot.push_back(id(n + 1, first + c));
      }
      b.set_rotation(id(n, i), std::move(rot));
    }
  return b.build();
}

// ---------------------------------------------------------------------------
// Fan triangulation: every finite face of length >= 4 gets chords from its
// uppermost (then leftmost) boundary vertex to the boundary vertices it is
// not yet adjacent to.  Chord adjacency is checked against the graph as
// already extended by earlier faces, so no parallel edges arise; faces are
// the faces of the input graph, enumerated in deterministic order.
// ---------------------------------------------------------------------------
inline embedded_graph fan_triangulate(const embedded_graph& g) {
  require(g.has_coords(), errc::missing_coordinates, "fan rule needs coordinates");
  int n = g.vertex_count();
  std::vector<std::vector<int>> rot(n);
  std::unordered_set<std::uint64_t> edges;
  edges.reserve(std::size_t(g.edge_count()) * 3);
  for (int v = 0; v < n; ++v) {
    auto nb = g.neighbors(v);
    rot[v].assign(nb.begin(), nb.end());
    for (int w : nb) edges.insert(embedded_graph::edge_key(v, w));
  }
  auto adjacent = [&](int u, int v) {
    return edges.count(embedded_graph::edge_key(u, v)) != 0;
  };
  auto insert_after = [](std::vector<int>& r, int anchor, auto first, auto last) {
    auto it = std::find(r.begin(), r.end(), anchor);
    r.insert(it + 1, first, last);
  };

  for (auto& f : g.faces()) {
    std::size_t L = f.walk.size();
    if (!f.finite || L < 4) continue;
    {
      std::unordered_set<int> distinct(f.walk.begin(), f.walk.end());
      require(distinct.size() == L, errc::precondition_violated,
              "cannot fan a face that revisits a vertex");
    }
    auto upper_left = [&](int a, int v) {
      auto pa = g.coord(a), pv = g.coord(v);
      return pv.y > pa.y || (pv.y == pa.y && pv.x < pa.x) ? v : a;
    };
    int w = f.walk[0];
    for (int v : f.walk) w = upper_left(w, v);
    std::vector<int> walk = f.walk;
    std::rotate(walk.begin(), std::find(walk.begin(), walk.end(), w), walk.end());

    std::vector<int> run;  // new neighbors of w, in walk order
    for (std::size_t i = 2; i + 1 < L; ++i) {
      int t = walk[i];
      if (adjacent(w, t)) continue;
      run.push_back(t);
      insert_after(rot[t], walk[i + 1], &w, &w + 1);
      edges.insert(embedded_graph::edge_key(w, t));
      edges.insert(embedded_graph::edge_key(t, w));
    }
    if (!run.empty()) insert_after(rot[w], walk[1], run.begin(), run.end());
  }

  graph_builder b;
  for (int v = 0; v < n; ++v) {
    int id = b.add_vertex(g.label(v), g.coord(v));
    if (g.is_frontier(v)) b.mark_frontier(id);
  }
  for (int v = 0; v < n; ++v) b.set_rotation(v, std::move(rot[v]));
  return b.build();
}

// ---------------------------------------------------------------------------
// Doubling: a mirror copy (copy label 2, y reflected below the original) plus
// vertical edges joining in both copies the left and right endpoint columns
// of every group except the last one per level.  Mirroring reverses the copy
// rotations; the new edges sit after the parent (left endpoints) or after the
// last child (right endpoints), which is where the slit between the copies
// opens.
// ---------------------------------------------------------------------------
inline embedded_graph double_and_glue(const embedded_graph& g_tilde,
                                      const adic_params& params) {
  params.validate();
  require(g_tilde.has_labels(), errc::label_mismatch, "doubling needs construction labels");
  int n1 = g_tilde.vertex_count();
  int N = params.N;

  std::vector<std::vector<int>> rot(2 * std::size_t(n1));
  for (int v = 0; v < n1; ++v) {
    auto nb = g_tilde.neighbors(v);
    rot[v].assign(nb.begin(), nb.end());
  }

  // glue targets per copy-1 vertex: vertex -> true if left endpoint
  std::vector<std::pair<int, bool>> glued;
  for (int n = 1; n <= N; ++n) {
    std::uint64_t s = params.group_size(n);
    std::uint64_t blocks = 1;
    for (int k = 0; k < n; ++k) blocks *= std::uint64_t(params.M);
    for (std::uint64_t i = 1; i + 1 <= blocks; ++i) {
      int l = g_tilde.find_label(1, n, (i - 1) * s + 1);
      int r = g_tilde.find_label(1, n, i * s);
      require(l >= 0 && r >= 0, errc::label_mismatch, "glue endpoint label missing");
      glued.push_back({l, true});
      glued.push_back({r, false});
    }
  }
  for (auto [v, is_left] : glued) {
    if (is_left) {
      // after the unique neighbor one level up
      int parent = -1;
      for (int w : rot[v])
        if (g_tilde.label(w).depth == g_tilde.label(v).depth - 1) parent = w;
      require(parent >= 0, errc::label_mismatch, "left glue endpoint has no parent");
      auto it = std::find(rot[v].begin(), rot[v].end(), parent);
      rot[v].insert(it + 1, v + n1);
    } else {
      rot[v].push_back(v + n1);
    }
  }
  for (int v = 0; v < n1; ++v) {
    auto& r2 = rot[v + n1];
    r2.assign(rot[v].rbegin(), rot[v].rend());
    for (int& w : r2) w = (w == v + n1) ? v : w + n1;
  }

  graph_builder b;
  for (int v = 0; v < n1; ++v) {
    int id = b.add_vertex(g_tilde.label(v), g_tilde.coord(v));
    if (g_tilde.is_frontier(v)) b.mark_frontier(id);
  }
  for (int v = 0; v < n1; ++v) {
    auto lab = g_tilde.label(v);
    lab.copy = 2;
    point c = g_tilde.coord(v);
    c.y = double(-(2 * N + 1)) - c.y;
    int id = b.add_vertex(lab, c);
    if (g_tilde.is_frontier(v)) b.mark_frontier(id);
  }
  for (int v = 0; v < 2 * n1; ++v) b.set_rotation(v, std::move(rot[v]));
  return b.build();
}

// The full construction: strip, triangulate, double and glue, triangulate.
inline embedded_graph counterexample_graph(const adic_params& params,
                                           std::uint64_t cap = default_vertex_cap) {
  params.validate();
  require(2 * params.level_offset(params.N + 1) <= cap, errc::size_overflow,
          "doubled graph exceeds vertex cap");
  return fan_triangulate(
      double_and_glue(fan_triangulate(strip_graph(params, cap)), params));
}

// ---------------------------------------------------------------------------
// Corridors: the induced subgraph following one digit word through the group
// hierarchy (level 0 plus, for each level n, the group addressed by the
// length-n prefix), in one copy or both.
// ---------------------------------------------------------------------------
inline std::vector<int> corridor_vertices(const embedded_graph& g,
                                          const adic_params& params,
                                          std::span<const int> b, bool doubled) {
  params.validate();
  require(int(b.size()) == params.N, errc::word_length_mismatch,
          "word length must equal the truncation depth");
  std::vector<int> keep;
  for (int copy = 1; copy <= (doubled ? 2 : 1); ++copy) {
    for (int n = 0; n <= params.N; ++n) {
      std::uint64_t a = prefix_address(params.M, b, n);
      std::uint64_t s = params.group_size(n);
      for (std::uint64_t j = a * s + 1; j <= (a + 1) * s; ++j) {
        int v = g.find_label(copy, n, j);
        require(v >= 0, errc::label_mismatch, "corridor vertex label missing");
        keep.push_back(v);
      }
    }
  }
  return keep;
}

inline embedded_graph corridor_subgraph(const embedded_graph& g,
                                        const adic_params& params,
                                        std::span<const int> b, bool doubled) {
  return induce(g, corridor_vertices(g, params, b, doubled));
}

namespace detail {

// Rotation assembly for the direct corridor builder: reproduces, vertex by
// vertex, the rotation list the full construction would give, as (copy,
// level, column) triples.  Stages mirror the pipeline: strip order, fan
// diagonals, glue, final-triangulation chords at their face anchors.
struct gv {
  int copy;
  int n;
  std::uint64_t j;
  bool operator==(const gv&) const = default;
};

class full_rotation_rules {
 public:
  full_rotation_rules(const adic_params& params) : M_(params.M), N_(params.N) {
    B_ = params.B();
    group_.resize(N_ + 2);
    level_.resize(N_ + 2);
    blocks_.resize(N_ + 2);
    for (int n = 0; n <= N_ + 1; ++n) {
      group_[n] = n <= N_ ? params.group_size(n) : 0;
      level_[n] = n <= N_ ? params.level_size(n) : 0;
      std::uint64_t m = 1;
      for (int k = 0; k < n && k < N_; ++k) m *= std::uint64_t(M_);
      blocks_[n] = m;
    }
  }

  bool glue(int n, std::uint64_t block) const {
    return n >= 1 && n <= N_ && block >= 1 && block + 1 <= blocks_[n];
  }

  // apex of the rightmost-gap face at gap level g: the left one of the two
  // parents of the gap columns (the root itself when g = 1)
  gv descent_apex(int g) const {
    if (g <= 1) return {1, 0, 1};
    return {1, g - 1, (blocks_[g] - 1) * (group_[g - 1] / std::uint64_t(M_))};
  }

  // copy-1 rotation through the glue stage (no final-triangulation chords)
  std::vector<gv> base_list(int n, std::uint64_t j) const {
    std::vector<gv> r;
    std::uint64_t s = group_[n];
    bool is_l = n >= 1 && (j - 1) % s == 0;
    bool is_r = n >= 1 && j % s == 0;
    if (j < level_[n] && j % s != 0) r.push_back({1, n, j + 1});
    if (n > 0) {
      r.push_back({1, n - 1, (j + B_ - 1) / B_});
      // fan diagonal up-left; the quad it cuts must stay clear of the frontier
      if ((j - 1) % B_ == 0 && j > 1 && n <= N_ - 1) {
        std::uint64_t q = (j - 1) / B_;
        if (q % group_[n - 1] != 0 && (j - 1) % s != 0) r.push_back({1, n - 1, q});
      }
    }
    if (is_l && glue(n, (j - 1) / s + 1)) r.push_back({2, n, j});
    if (j > 1 && (j - 1) % s != 0) r.push_back({1, n, j - 1});
    if (n < N_) {
      std::uint64_t first = B_ * (j - 1) + 1;
      for (std::uint64_t c = 0; c < B_; ++c) r.push_back({1, n + 1, first + c});
      if (n + 1 <= N_ - 1 && j % s != 0 && (B_ * j) % group_[n + 1] != 0)
        r.push_back({1, n + 1, B_ * j + 1});
    }
    if (is_r && glue(n, j / s)) r.push_back({2, n, j});
    return r;
  }

  std::vector<gv> rotation(int copy, int n, std::uint64_t j) const {
    std::vector<gv> r = base_list(n, j);
    if (copy == 2) {
      // mirror: reversed list, entries swapped into the other copy
      std::reverse(r.begin(), r.end());
      for (auto& e : r) e.copy = e.copy == 2 ? 1 : 2;
    }
    std::uint64_t s = group_[n];
    auto after = [&](std::vector<gv>& rr, gv anchor, std::initializer_list<gv> vals) {
      auto it = std::find(rr.begin(), rr.end(), anchor);
      require(it != rr.end(), errc::precondition_violated, "rotation anchor missing");
      rr.insert(it + 1, vals.begin(), vals.end());
    };

    // The faces needing chords fall into four shapes.  Quads sit along a gap
    // that already existed one level up (both endpoint columns glued).
    // Freshly opened gaps have a hexagon (level-1, shared parent = root) or
    // an eight-cycle (two parents) on top.  The rightmost gap of each level
    // is special: its left column belongs to the unglued last group, so the
    // face descends one more level to the first glued left endpoint, giving
    // an eight-cycle at the root and a ten-cycle deeper down.  Every chord
    // runs to the face's apex: its uppermost, then leftmost, vertex.
    std::uint64_t sub = n >= 1 ? s / std::uint64_t(M_) : 0;
    if (copy == 1) {
      if (n == 0 && N_ >= 2) {
        // gap faces under the root, left to right; the root-to-mirror chord
        // goes to whichever of them is triangulated first
        bool root_chord = false;
        for (std::uint64_t i = 1; i + 1 <= std::uint64_t(M_); ++i) {
          bool rightmost = i + 1 == std::uint64_t(M_);
          if (rightmost && N_ < 3) continue;
          std::vector<gv> run = {{2, 1, i * group_[1]}};
          if (!root_chord) {
            run.push_back({2, 0, 1});
            root_chord = true;
          }
          run.push_back({2, 1, i * group_[1] + 1});
          if (rightmost) {
            run.push_back({2, 2, B_ * i * group_[1] + 1});
            run.push_back({1, 2, B_ * i * group_[1] + 1});
          }
          auto it = std::find(r.begin(), r.end(), gv{1, 1, i * group_[1]});
          r.insert(it + 1, run.begin(), run.end());
        }
      }
      if (n >= 1 && (j - 1) % s == 0) {  // left endpoint column
        std::uint64_t k = (j - 1) / s + 1;
        std::uint64_t parent_block = (k - 1) / M_ + 1;
        if (n + 1 <= N_ - 1 && glue(n, k) && glue(n + 1, (k - 1) * M_ + 1))
          after(r, {2, n, j}, {{2, n + 1, B_ * (j - 1) + 1}});
        if (n >= 2 && n <= N_ - 1 && (k - 1) % std::uint64_t(M_) != 0 &&
            glue(n, k - 1) && glue(n, k))
          after(r, {1, n - 1, (j + B_ - 1) / B_}, {{1, n - 1, (j - 1) / B_}});
        if (n >= 2 && n <= N_ - 1 && (k - 1) % std::uint64_t(M_) == 0 &&
            parent_block == blocks_[n - 1])
          after(r, {1, n - 1, (j + B_ - 1) / B_}, {descent_apex(n - 1)});
        if (n >= 2 && n + 1 <= N_ - 1 && k == blocks_[n])
          after(r, {1, n - 1, (j + B_ - 1) / B_}, {descent_apex(n)});
      }
      if (n >= 1 && j % s == 0) {  // right endpoint column
        std::uint64_t k = j / s;
        if (n + 1 <= N_ - 1 && glue(n, k) && glue(n + 1, k * M_))
          after(r, {1, n + 1, B_ * j}, {{2, n + 1, B_ * j}});
      }
      if (n >= 1 && j % s != 0 && j % sub == 0) {
        // apex of the gap faces below: eight-cycle, or ten-cycle when the
        // gap is the level's rightmost
        std::uint64_t a = (j - 1) / s;
        std::uint64_t t = (j % s) / sub;
        if (n + 1 <= N_ - 1 && glue(n + 1, a * M_ + t) && glue(n + 1, a * M_ + t + 1))
          after(r, {1, n + 1, B_ * j},
                {{2, n + 1, B_ * j},
                 {2, n, j},
                 {2, n, j + 1},
                 {2, n + 1, B_ * j + 1},
                 {1, n + 1, B_ * j + 1}});
        else if (n + 2 <= N_ - 1 && a * M_ + t + 1 == blocks_[n + 1])
          after(r, {1, n + 1, B_ * j},
                {{2, n + 1, B_ * j},
                 {2, n, j},
                 {2, n, j + 1},
                 {2, n + 1, B_ * j + 1},
                 {2, n + 2, B_ * B_ * j + 1},
                 {1, n + 2, B_ * B_ * j + 1},
                 {1, n + 1, B_ * j + 1}});
      }
    } else {
      if (n == 0 && N_ >= (M_ >= 3 ? 2 : 3))
        after(r, {2, 1, group_[1] + 1}, {{1, 0, 1}});
      if (n >= 1 && n <= N_ - 1 && (j - 1) % s == 0) {  // left endpoint, mirror
        std::uint64_t k = (j - 1) / s + 1;
        std::uint64_t parent_block = (k - 1) / M_ + 1;
        bool old_gap = (k - 1) % std::uint64_t(M_) == 0;
        if (k == blocks_[n]) {
          // unglued wall of the rightmost gap; the chord arrives along the
          // descent, after the first child
          if (n + 1 <= N_ - 1)
            after(r, {2, n + 1, B_ * (j - 1) + 1},
                  {n == 1 ? gv{1, 0, 1} : descent_apex(n)});
        } else if (old_gap && parent_block == blocks_[n - 1]) {
          if (n >= 2) after(r, {1, n, j}, {descent_apex(n - 1)});
        } else if (old_gap) {
          if (n >= 2 && glue(n - 1, parent_block) && glue(n, k))
            after(r, {1, n, j}, {{1, n - 1, (j - 1) / B_ + 1}});
        } else if (glue(n, k - 1) && glue(n, k)) {
          after(r, {1, n, j},
                {n == 1 ? gv{1, 0, 1} : gv{1, n - 1, (j - 1) / B_}});
        }
      }
      if (n >= 1 && n <= N_ - 1 && j % s == 0) {  // right endpoint, mirror
        std::uint64_t k = j / s;
        bool old_gap = k % std::uint64_t(M_) == 0;
        bool closed = old_gap ? n >= 2 && glue(n - 1, k / M_) && glue(n, k)
                              : glue(n, k) && glue(n, k + 1);
        bool rightmost = k + 1 == blocks_[n] && n + 1 <= N_ - 1;
        if (closed || rightmost) {
          gv apex = n == 1 ? gv{1, 0, 1} : gv{1, n - 1, j / B_};
          after(r, {2, n - 1, (j + B_ - 1) / B_}, {apex});
        }
      }
      if (n >= 1 && j % s != 0 && j % sub == 0) {  // left top of a fresh gap
        std::uint64_t a = (j - 1) / s, t = (j % s) / sub;
        bool closed = n + 1 <= N_ - 1 && glue(n + 1, a * M_ + t) &&
                      glue(n + 1, a * M_ + t + 1);
        bool rightmost = a * M_ + t + 1 == blocks_[n + 1] && n + 2 <= N_ - 1;
        if (closed || rightmost) after(r, {2, n, j + 1}, {{1, n, j}});
      }
      if (n >= 1 && (j - 1) % s != 0 && (j - 1) % sub == 0) {  // right top
        std::uint64_t a = (j - 1) / s, t = ((j - 1) % s) / sub;
        bool closed = n + 1 <= N_ - 1 && glue(n + 1, a * M_ + t) &&
                      glue(n + 1, a * M_ + t + 1);
        bool rightmost = a * M_ + t + 1 == blocks_[n + 1] && n + 2 <= N_ - 1;
        if (closed || rightmost)
          after(r, {2, n + 1, B_ * (j - 1) + 1}, {{1, n, j - 1}});
      }
    }
    return r;
  }

  std::uint64_t level_size(int n) const { return level_[n]; }

 private:
  int M_, N_;
  std::uint64_t B_;
  std::vector<std::uint64_t> group_, level_, blocks_;
};

}  // namespace detail

// Direct corridor builder: same graph as corridor_subgraph applied to the
// full construction, without materializing the full graph.  doubled=false
// gives the single-copy corridor of the triangulated strip (no glue, no
// final-triangulation chords).
inline embedded_graph corridor_graph(const adic_params& params, std::span<const int> b,
                                     bool doubled,
                                     std::uint64_t cap = default_vertex_cap) {
  params.validate();
  require(int(b.size()) == params.N, errc::word_length_mismatch,
          "word length must equal the truncation depth");
  int N = params.N;

  std::vector<std::uint64_t> astart(N + 1), off(N + 1);
  std::uint64_t per_copy = 0;
  for (int n = 0; n <= N; ++n) {
    std::uint64_t a = prefix_address(params.M, b, n);
    std::uint64_t s = params.group_size(n);
    astart[n] = a * s + 1;
    off[n] = per_copy;
    per_copy += s;
    require((doubled ? 2 : 1) * per_copy <= cap, errc::size_overflow,
            "corridor exceeds vertex cap");
  }
  auto member = [&](const detail::gv& e) {
    if (e.copy == 2 && !doubled) return false;
    if (e.n < 0 || e.n > N) return false;
    return e.j >= astart[e.n] && e.j < astart[e.n] + params.group_size(e.n);
  };
  auto local = [&](const detail::gv& e) {
    return int((e.copy == 2 ? per_copy : 0) + off[e.n] + (e.j - astart[e.n]));
  };

  detail::full_rotation_rules rules(params);
  graph_builder bld;
  for (int copy = 1; copy <= (doubled ? 2 : 1); ++copy)
    for (int n = 0; n <= N; ++n) {
      std::uint64_t s = params.group_size(n);
      std::uint64_t xs;
      require(checked_pow(std::uint64_t(params.M), unsigned(params.d * (N - n)), xs),
              errc::size_overflow, "coordinate scale");
      for (std::uint64_t j = astart[n]; j < astart[n] + s; ++j) {
        double y = copy == 1 ? double(-n) : double(-(2 * N + 1) + n);
        vertex_label lab{copy, n, j};
        int v = bld.add_vertex(lab, point{double(j) * double(xs), y});
        if (n == N) bld.mark_frontier(v);
      }
    }
  for (int copy = 1; copy <= (doubled ? 2 : 1); ++copy)
    for (int n = 0; n <= N; ++n) {
      std::uint64_t s = params.group_size(n);
      for (std::uint64_t j = astart[n]; j < astart[n] + s; ++j) {
        std::vector<detail::gv> full =
            doubled ? rules.rotation(copy, n, j)
                    : rules.base_list(n, j);  // strip + diagonals only
        std::vector<int> rot;
        for (auto& e : full) {
          if (!doubled && e.copy == 2) continue;  // drop glue in single copy
          if (member(e)) rot.push_back(local(e));
        }
        bld.set_rotation(local({copy, n, j}), std::move(rot));
      }
    }
  return bld.build();
}

// ---------------------------------------------------------------------------
// Reference graphs.
// ---------------------------------------------------------------------------

// Rhombic patch of the triangular lattice, axial coordinates (i, j) for
// 0 <= i, j <= side; every border vertex is frontier.  The four sides come
// back as crossing targets.
struct crossing_patch {
  embedded_graph graph;
  std::vector<int> left, right, bottom, top;
};

inline crossing_patch triangular_lattice(int side,
                                         std::uint64_t cap = default_vertex_cap) {
  require(side >= 1, errc::bad_parameters, "side >= 1");
  std::uint64_t n = std::uint64_t(side) + 1;
  require(n * n <= cap, errc::size_overflow, "patch exceeds vertex cap");
  graph_builder b;
  auto id = [&](int i, int j) { return j * (side + 1) + i; };
  for (int j = 0; j <= side; ++j)
    for (int i = 0; i <= side; ++i) {
      int v = b.add_vertex({}, point{i + 0.5 * j, j * 0.8660254037844386});
      if (i == 0 || j == 0 || i == side || j == side) b.mark_frontier(v);
    }
  // counterclockwise neighbor directions
  const int dirs[6][2] = {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};
  for (int j = 0; j <= side; ++j)
    for (int i = 0; i <= side; ++i) {
      std::vector<int> rot;
      for (auto& d : dirs) {
        int a = i + d[0], c = j + d[1];
        if (a >= 0 && a <= side && c >= 0 && c <= side) rot.push_back(id(a, c));
      }
      b.set_rotation(id(i, j), std::move(rot));
    }
  crossing_patch out{b.build(), {}, {}, {}, {}};
  for (int j = 0; j <= side; ++j) {
    out.left.push_back(id(0, j));
    out.right.push_back(id(side, j));
  }
  for (int i = 0; i <= side; ++i) {
    out.bottom.push_back(id(i, 0));
    out.top.push_back(id(i, side));
  }
  return out;
}

// 7-ary tree (root degree 7, inner degree 8) plus an apex adjacent to every
// tree vertex.  The apex models a vertex of unbounded degree, so it is
// frontier along with the deepest tree level.
inline embedded_graph cone_tree(int depth, std::uint64_t cap = default_vertex_cap) {
  require(depth >= 1, errc::bad_parameters, "depth >= 1");
  embedded_graph tree = bary_tree(7, depth, cap);
  int n = tree.vertex_count();
  require(std::uint64_t(n) + 1 <= cap, errc::size_overflow, "cone exceeds vertex cap");

  std::vector<std::vector<int>> rot(n + 1);
  for (int v = 0; v < n; ++v) {
    auto nb = tree.neighbors(v);
    rot[v].assign(nb.begin(), nb.end());
  }
  int apex = n;

  // Walk the single face of the tree; hook the apex into the first visit of
  // each vertex.  Wedge (out, in) of the visit means: insert the apex edge
  // after `out` in the rotation.
  std::vector<char> seen(n, 0);
  int a = 0, bv = rot[0][0];
  std::vector<std::pair<int, int>> hook(n, {-1, -1});  // (vertex, out-anchor)
  std::size_t steps = 0, total = 2 * std::size_t(tree.edge_count());
  std::vector<int> order;
  for (; steps < total; ++steps) {
    // incoming edge a->bv; the walk leaves bv toward the predecessor of a
    auto& rb = rot[bv];
    auto it = std::find(rb.begin(), rb.end(), a);
    int w = rb[(it - rb.begin() + rb.size() - 1) % rb.size()];
    if (!seen[a]) {
      seen[a] = 1;
      order.push_back(a);
      hook[a] = {a, bv};  // out-edge of this visit
    }
    a = bv;
    bv = w;
  }
  for (int v : order) rot[apex].push_back(v);
  for (int v : order) {
    auto it = std::find(rot[v].begin(), rot[v].end(), hook[v].second);
    rot[v].insert(it + 1, apex);
  }

  graph_builder b;
  for (int v = 0; v < n; ++v) {
    int id = b.add_vertex(tree.label(v), tree.coord(v));
    if (tree.is_frontier(v)) b.mark_frontier(id);
  }
  {
    point pa{-1.0, 1.0};
    int id = b.add_vertex({}, pa);
    b.mark_frontier(id);
  }
  for (int v = 0; v <= n; ++v) b.set_rotation(v, std::move(rot[v]));
  return b.build();
}

}  // namespace perc
