#pragma once

#include <algorithm>
#include <cstdint>
#include <tuple>
#include <deque>
#include <optional>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "perc/errors.hpp"

namespace perc {

// Vertex labels tie generated graphs back to their construction coordinates:
// copy is 1 or 2 after doubling (0 = unlabeled), depth is the level, index the
// 1-based position within the level.  depth < 0 means "no label".
struct vertex_label {
  int copy = 0;
  int depth = -1;
  std::uint64_t index = 0;

  bool present() const { return depth >= 0 && index >= 1; }
  bool operator==(const vertex_label&) const = default;
};

inline std::uint64_t pack_label(const vertex_label& l) {
  // 2 bits copy, 10 bits depth, 52 bits index.
  return (std::uint64_t(l.copy) << 62) | (std::uint64_t(l.depth) << 52) | l.index;
}

struct point {
  double x = 0, y = 0;
  bool operator==(const point&) const = default;
};

// A finite truncation of a planar graph: vertices 0..n-1, a counterclockwise
// rotation (cyclic neighbor order) per vertex, and a frontier set marking the
// vertices whose neighborhoods the truncation cut off.
class embedded_graph {
 public:
  int vertex_count() const { return int(offsets_.size()) - 1; }
  std::int64_t edge_count() const { return std::int64_t(adj_.size()) / 2; }

  std::span<const int> neighbors(int v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }
  int degree(int v) const { return offsets_[v + 1] - offsets_[v]; }

  bool adjacent(int u, int v) const {
    auto nb = neighbors(u);
    return std::find(nb.begin(), nb.end(), v) != nb.end();
  }

  bool is_frontier(int v) const { return frontier_flag_[v] != 0; }
  const std::vector<int>& frontier() const { return frontier_; }

  bool has_coords() const { return !coords_.empty(); }
  const point& coord(int v) const { return coords_[v]; }

  const vertex_label& label(int v) const { return labels_[v]; }
  bool has_labels() const { return has_labels_; }

  // -1 when no vertex carries that label.
  int find_label(int copy, int depth, std::uint64_t index) const {
    auto it = label_index_.find(pack_label({copy, depth, index}));
    return it == label_index_.end() ? -1 : it->second;
  }

  void check_vertex(int v) const {
    require(v >= 0 && v < vertex_count(), errc::unknown_vertex,
            "vertex id " + std::to_string(v));
  }

  // --- faces -------------------------------------------------------------

  struct face {
    std::vector<int> walk;  // vertex sequence; directed edges walk[i]->walk[i+1], cyclic
    bool finite = true;     // false when the walk visits a frontier vertex
  };

  // Decomposes the directed edges into facial walks of the combinatorial map:
  // the successor of directed edge (u,v) is (v,w) with w the predecessor of u
  // in the rotation at v.  Interior faces of a drawing with counterclockwise
  // rotations come out in counterclockwise vertex order.
  std::vector<face> faces() const {
    std::vector<face> out;
    int n = vertex_count();
    // position of u within rotation(v), keyed by directed edge
    std::unordered_map<std::uint64_t, int> pos;
    pos.reserve(adj_.size() * 2);
    for (int v = 0; v < n; ++v) {
      auto nb = neighbors(v);
      for (int i = 0; i < int(nb.size()); ++i)
        pos[edge_key(v, nb[i])] = i;
    }
    std::vector<char> used(adj_.size(), 0);  // per directed-edge slot
    for (int v = 0; v < n; ++v) {
      auto nb = neighbors(v);
      for (int i = 0; i < int(nb.size()); ++i) {
        if (used[offsets_[v] + i]) continue;
        face f;
        int a = v, b = nb[i];
        while (true) {
          int slot = offsets_[a] + pos.at(edge_key(a, b));
          if (used[slot]) break;
          used[slot] = 1;
          f.walk.push_back(a);
          if (frontier_flag_[a]) f.finite = false;
          int j = pos.at(edge_key(b, a));
          auto nb2 = neighbors(b);
          int w = nb2[(j + int(nb2.size()) - 1) % int(nb2.size())];
          a = b;
          b = w;
        }
        out.push_back(std::move(f));
      }
    }
    return out;
  }

  // --- connectivity helpers ----------------------------------------------

  struct end_approximation {
    std::vector<int> component;   // -1 for removed vertices
    int count = 0;
    std::vector<char> infinite_proxy;  // per component: touches the frontier
  };

  // Components of G minus K; frontier-touching components stand in for the
  // directions toward infinity that survive the removal.
  end_approximation components_after_removal(const std::vector<int>& K) const {
    int n = vertex_count();
    std::vector<char> removed(n, 0);
    for (int v : K) {
      check_vertex(v);
      removed[v] = 1;
    }
    end_approximation r;
    r.component.assign(n, -1);
    std::vector<int> queue;
    for (int s = 0; s < n; ++s) {
      if (removed[s] || r.component[s] >= 0) continue;
      int c = r.count++;
      bool inf = false;
      queue.assign(1, s);
      r.component[s] = c;
      while (!queue.empty()) {
        int v = queue.back();
        queue.pop_back();
        if (frontier_flag_[v]) inf = true;
        for (int w : neighbors(v))
          if (!removed[w] && r.component[w] < 0) {
            r.component[w] = c;
            queue.push_back(w);
          }
      }
      r.infinite_proxy.push_back(inf ? 1 : 0);
    }
    return r;
  }

  // BFS distance; -1 when unreachable.  `region`, when given, restricts the
  // path (endpoints included) to vertices flagged true.
  int bfs_distance(int u, int v, const std::vector<char>* region = nullptr) const {
    check_vertex(u);
    check_vertex(v);
    if (region && (!(*region)[u] || !(*region)[v])) return -1;
    if (u == v) return 0;
    std::vector<int> dist(vertex_count(), -1);
    dist[u] = 0;
    std::deque<int> q{u};
    while (!q.empty()) {
      int a = q.front();
      q.pop_front();
      for (int b : neighbors(a)) {
        if (dist[b] >= 0 || (region && !(*region)[b])) continue;
        dist[b] = dist[a] + 1;
        if (b == v) return dist[b];
        q.push_back(b);
      }
    }
    return -1;
  }

  // Interior of S: members whose whole neighborhood lies in S.  Frontier
  // vertices never qualify; their true neighborhood is unknown.
  std::vector<int> interior(const std::vector<int>& S) const {
    std::vector<char> in(vertex_count(), 0);
    for (int v : S) {
      check_vertex(v);
      in[v] = 1;
    }
    std::vector<int> out;
    for (int v : S) {
      if (frontier_flag_[v]) continue;
      bool all = true;
      for (int w : neighbors(v))
        if (!in[w]) {
          all = false;
          break;
        }
      if (all) out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  static std::uint64_t edge_key(int u, int v) {
    return (std::uint64_t(std::uint32_t(u)) << 32) | std::uint32_t(v);
  }

 private:
  friend class graph_builder;
  friend embedded_graph induce(const embedded_graph&, const std::vector<int>&);

  std::vector<int> offsets_;  // CSR into adj_, size n+1
  std::vector<int> adj_;      // rotations, counterclockwise
  std::vector<char> frontier_flag_;
  std::vector<int> frontier_;
  std::vector<point> coords_;
  std::vector<vertex_label> labels_;
  bool has_labels_ = false;
  std::unordered_map<std::uint64_t, int> label_index_;
};

// Builder that validates the rotation system: symmetry (each directed edge's
// reverse exists), simplicity (no loops, no repeated neighbors), known ids,
// bijective labels, distinct coordinates.
class graph_builder {
 public:
  int add_vertex(vertex_label label = {}, std::optional<point> coord = std::nullopt) {
    labels_.push_back(label);
    coords_.push_back(coord);
    rotations_.emplace_back();
    frontier_.push_back(0);
    return int(rotations_.size()) - 1;
  }

  void set_rotation(int v, std::vector<int> ccw_neighbors) {
    check(v);
    rotations_[v] = std::move(ccw_neighbors);
  }

  void mark_frontier(int v) {
    check(v);
    frontier_[v] = 1;
  }

  int vertex_count() const { return int(rotations_.size()); }

  embedded_graph build() const {
    int n = vertex_count();
    for (int v = 0; v < n; ++v) {
      std::unordered_set<int> seen;
      for (int w : rotations_[v]) {
        require(w >= 0 && w < n, errc::unknown_vertex,
                "rotation of " + std::to_string(v) + " references " + std::to_string(w));
        require(w != v, errc::self_loop, "vertex " + std::to_string(v));
        require(seen.insert(w).second, errc::duplicate_neighbor,
                std::to_string(v) + " -> " + std::to_string(w));
      }
    }
    for (int v = 0; v < n; ++v)
      for (int w : rotations_[v]) {
        auto& rw = rotations_[w];
        require(std::find(rw.begin(), rw.end(), v) != rw.end(), errc::asymmetric_rotation,
                std::to_string(v) + " -> " + std::to_string(w) + " has no reverse");
      }

    embedded_graph g;
    g.offsets_.assign(1, 0);
    for (int v = 0; v < n; ++v) {
      g.adj_.insert(g.adj_.end(), rotations_[v].begin(), rotations_[v].end());
      g.offsets_.push_back(int(g.adj_.size()));
    }
    g.frontier_flag_ = frontier_;
    for (int v = 0; v < n; ++v)
      if (frontier_[v]) g.frontier_.push_back(v);

    bool any_coord = false, all_coord = true;
    for (auto& c : coords_) (c ? any_coord : all_coord) = c.has_value();
    if (any_coord) {
      require(all_coord, errc::missing_coordinates, "some vertices lack coordinates");
      g.coords_.resize(n);
      std::vector<std::tuple<double, double, int>> spots(n);
      for (int v = 0; v < n; ++v) {
        g.coords_[v] = *coords_[v];
        spots[v] = {g.coords_[v].x, g.coords_[v].y, v};
      }
      std::sort(spots.begin(), spots.end());
      for (int v = 0; v + 1 < n; ++v)
        require(std::get<0>(spots[v]) != std::get<0>(spots[v + 1]) ||
                    std::get<1>(spots[v]) != std::get<1>(spots[v + 1]),
                errc::precondition_violated,
                "duplicate coordinates at vertex " +
                    std::to_string(std::get<2>(spots[v + 1])));
    }

    g.labels_ = labels_;
    for (int v = 0; v < n; ++v) {
      if (!labels_[v].present()) continue;
      g.has_labels_ = true;
      require(g.label_index_.emplace(pack_label(labels_[v]), v).second, errc::label_mismatch,
              "duplicate label at vertex " + std::to_string(v));
    }
    return g;
  }

 private:
  void check(int v) const {
    require(v >= 0 && v < vertex_count(), errc::unknown_vertex, std::to_string(v));
  }

  std::vector<std::vector<int>> rotations_;
  std::vector<vertex_label> labels_;
  std::vector<std::optional<point>> coords_;
  std::vector<char> frontier_;
};

// Induced subgraph on `keep` (ascending ids assigned in the order given).
// Rotations are the originals filtered to surviving neighbors; labels, coords
// and frontier flags carry over.
inline embedded_graph induce(const embedded_graph& g, const std::vector<int>& keep) {
  std::unordered_map<int, int> remap;
  remap.reserve(keep.size());
  for (int v : keep) {
    g.check_vertex(v);
    require(remap.emplace(v, int(remap.size())).second, errc::duplicate_neighbor,
            "vertex listed twice: " + std::to_string(v));
  }
  graph_builder b;
  for (int v : keep) {
    std::optional<point> c;
    if (g.has_coords()) c = g.coord(v);
    int id = b.add_vertex(g.label(v), c);
    if (g.is_frontier(v)) b.mark_frontier(id);
  }
  for (int v : keep) {
    std::vector<int> rot;
    for (int w : g.neighbors(v)) {
      auto it = remap.find(w);
      if (it != remap.end()) rot.push_back(it->second);
    }
    b.set_rotation(remap[v], std::move(rot));
  }
  return b.build();
}

}  // namespace perc
