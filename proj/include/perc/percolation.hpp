#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <unordered_map>
#include <vector>

#include "perc/embedded_graph.hpp"
#include "perc/errors.hpp"
#include "perc/util.hpp"

namespace perc {

// ---------------------------------------------------------------------------
// Standard coupling.  One uniform per vertex, a pure function of (master
// seed, vertex id); the open set at level p is {v : U(v) <= p} for every p
// simultaneously, so raising p only ever adds open vertices.
// ---------------------------------------------------------------------------

struct percolation_sample {
  std::uint64_t seed = 0;
  int n = 0;

  double u(int v) const { return uniform_at(seed, std::uint64_t(v)); }
};

inline percolation_sample sample_uniforms(const embedded_graph& g, std::uint64_t seed) {
  return {seed, g.vertex_count()};
}

enum class vertex_state : int { closed = 0, open = 1 };

struct configuration {
  double p = 0;
  std::uint64_t seed = 0;
  std::vector<char> open;  // 1 = open

  bool is_open(int v) const { return open[v] != 0; }
  bool matches(int v, vertex_state s) const {
    return (open[v] != 0) == (s == vertex_state::open);
  }
  std::int64_t open_count() const {
    return std::count(open.begin(), open.end(), char(1));
  }
};

inline configuration configuration_at(const percolation_sample& s, double p) {
  require(p >= 0.0 && p <= 1.0, errc::bad_probability, "p = " + std::to_string(p));
  configuration c;
  c.p = p;
  c.seed = s.seed;
  c.open.resize(s.n);
  for (int v = 0; v < s.n; ++v) c.open[v] = s.u(v) <= p ? 1 : 0;
  return c;
}

// ---------------------------------------------------------------------------
// Clusters of one state, computed by union-find.  Cluster ids are dense and
// ordered by smallest member, so partitions of equal configurations compare
// equal field by field.
// ---------------------------------------------------------------------------

struct cluster_partition {
  vertex_state state = vertex_state::open;
  std::vector<int> cluster;             // per vertex: dense id, or -1 for the other state
  std::vector<std::int64_t> sizes;      // per cluster
  std::vector<char> frontier_touching;  // per cluster

  int count() const { return int(sizes.size()); }
  int frontier_count() const {
    return int(std::count(frontier_touching.begin(), frontier_touching.end(), char(1)));
  }
};

inline cluster_partition clusters(const embedded_graph& g, const configuration& c,
                                  vertex_state state) {
  int n = g.vertex_count();
  require(int(c.open.size()) == n, errc::bad_parameters,
          "configuration size does not match the graph");
  union_find uf(n);
  for (int v = 0; v < n; ++v) {
    if (!c.matches(v, state)) continue;
    for (int w : g.neighbors(v))
      if (w > v && c.matches(w, state)) uf.unite(v, w);
  }
  cluster_partition part;
  part.state = state;
  part.cluster.assign(n, -1);
  std::vector<int> dense(n, -1);
  for (int v = 0; v < n; ++v) {
    if (!c.matches(v, state)) continue;
    int r = uf.find(v);
    if (dense[r] < 0) {
      dense[r] = int(part.sizes.size());
      part.sizes.push_back(0);
      part.frontier_touching.push_back(0);
    }
    int id = dense[r];
    part.cluster[v] = id;
    ++part.sizes[id];
    if (g.is_frontier(v)) part.frontier_touching[id] = 1;
  }
  return part;
}

inline int frontier_cluster_count(const embedded_graph& g, const configuration& c,
                                  vertex_state state) {
  return clusters(g, c, state).frontier_count();
}

// ---------------------------------------------------------------------------
// Exploration of the closed cluster of a start vertex.  If the start is open
// the process stops immediately with two empty sets.  Otherwise the least
// unexamined neighbor of the current cluster (in a fixed total order) is
// revealed one at a time: closed vertices join C, open ones join the
// boundary.  On a finite truncation this always terminates.
// ---------------------------------------------------------------------------

struct exploration_step {
  int index = 0;
  int vertex = -1;
  int state = 0;  // 0 closed, 1 open
};

struct exploration_trace {
  int start = -1;
  double p1 = 0;
  std::vector<int> visited;         // examination order, start vertex first
  std::vector<int> closed_cluster;  // C, ascending
  std::vector<int> open_boundary;   // its open vertex boundary, ascending
  std::vector<exploration_step> steps;
};

inline exploration_trace explore_zero_cluster(const embedded_graph& g,
                                              const percolation_sample& s, double p1, int v0,
                                              const std::vector<int>* vertex_order = nullptr) {
  g.check_vertex(v0);
  require(p1 >= 0.0 && p1 <= 1.0, errc::bad_probability, "p1 = " + std::to_string(p1));
  int n = g.vertex_count();
  std::vector<int> rank(n);
  if (vertex_order) {
    require(int(vertex_order->size()) == n, errc::bad_parameters,
            "vertex order must list every vertex once");
    std::vector<char> seen(n, 0);
    for (int i = 0; i < n; ++i) {
      int v = (*vertex_order)[i];
      g.check_vertex(v);
      require(!seen[v], errc::bad_parameters, "vertex order repeats " + std::to_string(v));
      seen[v] = 1;
      rank[v] = i;
    }
  } else {
    std::iota(rank.begin(), rank.end(), 0);
  }

  auto is_open = [&](int v) { return s.u(v) <= p1; };
  exploration_trace tr;
  tr.start = v0;
  tr.p1 = p1;
  auto examine = [&](int v, bool open) {
    tr.steps.push_back({int(tr.visited.size()), v, open ? 1 : 0});
    tr.visited.push_back(v);
  };

  if (is_open(v0)) {
    examine(v0, true);
    return tr;
  }
  examine(v0, false);
  tr.closed_cluster.push_back(v0);

  std::vector<char> queued(n, 0);
  queued[v0] = 1;
  using cand = std::pair<int, int>;  // (rank, vertex)
  std::priority_queue<cand, std::vector<cand>, std::greater<>> pq;
  auto enqueue_neighbors = [&](int v) {
    for (int w : g.neighbors(v))
      if (!queued[w]) {
        queued[w] = 1;
        pq.push({rank[w], w});
      }
  };
  enqueue_neighbors(v0);
  while (!pq.empty()) {
    int v = pq.top().second;
    pq.pop();
    bool open = is_open(v);
    examine(v, open);
    if (open) {
      tr.open_boundary.push_back(v);
    } else {
      tr.closed_cluster.push_back(v);
      enqueue_neighbors(v);
    }
  }
  std::sort(tr.closed_cluster.begin(), tr.closed_cluster.end());
  std::sort(tr.open_boundary.begin(), tr.open_boundary.end());
  return tr;
}

// ---------------------------------------------------------------------------
// OR-projection of a doubled graph.  Vertices labeled (1,n,j) and (2,n,j)
// collapse to one class that is open when either copy is; the projected
// states are i.i.d. Bernoulli(2p-p^2).  The quotient adjacency keeps every
// surviving edge (it need not be planar), so any open path upstairs projects
// to an open walk downstairs.
// ---------------------------------------------------------------------------

struct quotient_projection {
  std::vector<int> rep;               // doubled vertex -> class id
  std::vector<int> copy1, copy2;      // class id -> doubled vertex of each copy
  std::vector<std::vector<int>> adj;  // quotient adjacency, sorted, no duplicates
  std::vector<char> frontier;         // class touches the frontier in either copy
  configuration proj;                 // open = pointwise max; p = 2p - p^2
};

inline quotient_projection or_projection(const embedded_graph& g, const configuration& c) {
  int n = g.vertex_count();
  require(int(c.open.size()) == n, errc::bad_parameters,
          "configuration size does not match the graph");
  require(g.has_labels(), errc::unpaired_vertex, "graph carries no copy labels");
  quotient_projection q;
  q.rep.assign(n, -1);
  for (int v = 0; v < n; ++v) {
    const vertex_label& l = g.label(v);
    require(l.present() && (l.copy == 1 || l.copy == 2), errc::unpaired_vertex,
            "vertex " + std::to_string(v) + " has no copy label");
    if (l.copy != 1) continue;
    int twin = g.find_label(2, l.depth, l.index);
    require(twin >= 0, errc::unpaired_vertex,
            "vertex " + std::to_string(v) + " has no second-copy twin");
    int id = int(q.copy1.size());
    q.copy1.push_back(v);
    q.copy2.push_back(twin);
    q.rep[v] = id;
    q.rep[twin] = id;
  }
  int m = int(q.copy1.size());
  require(2 * m == n, errc::unpaired_vertex, "copies are not in bijection");

  q.frontier.assign(m, 0);
  q.proj.p = 2 * c.p - c.p * c.p;
  q.proj.seed = c.seed;
  q.proj.open.resize(m);
  for (int x = 0; x < m; ++x) {
    int a = q.copy1[x], b = q.copy2[x];
    q.proj.open[x] = (c.open[a] || c.open[b]) ? 1 : 0;
    q.frontier[x] = (g.is_frontier(a) || g.is_frontier(b)) ? 1 : 0;
  }
  q.adj.resize(m);
  for (int v = 0; v < n; ++v)
    for (int w : g.neighbors(v)) {
      int a = q.rep[v], b = q.rep[w];
      if (a != b) q.adj[a].push_back(b);
    }
  for (auto& row : q.adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return q;
}

// ---------------------------------------------------------------------------
// Connection probability of source -> targets through open vertices of a
// region (every path vertex open, endpoints included).  Exact mode sums over
// all 2^|region| configurations and is capped at |region| <= 20; Monte Carlo
// covers the rest.
// ---------------------------------------------------------------------------

struct connectivity_estimate {
  double value = 0;
  double se = 0;            // standard error; 0 in exact mode
  std::int64_t trials = 0;  // 0 in exact mode
  bool exact = false;
};

namespace detail {

struct region_view {
  std::vector<int> verts;                // region vertices, input order
  std::unordered_map<int, int> local;    // vertex -> index in verts
  std::vector<std::vector<int>> nbrs;    // adjacency restricted to the region
  int source = -1;                       // local index
  std::vector<char> target;              // per local index
  bool any_target = false;
};

inline region_view make_region_view(const embedded_graph& g, int source,
                                    const std::vector<int>& targets,
                                    const std::vector<int>& region) {
  g.check_vertex(source);
  for (int t : targets) g.check_vertex(t);
  region_view rv;
  rv.verts = region;
  for (int i = 0; i < int(region.size()); ++i) {
    g.check_vertex(region[i]);
    require(rv.local.emplace(region[i], i).second, errc::bad_parameters,
            "region lists vertex " + std::to_string(region[i]) + " twice");
  }
  auto sit = rv.local.find(source);
  require(sit != rv.local.end(), errc::bad_parameters, "source lies outside the region");
  rv.source = sit->second;
  rv.target.assign(region.size(), 0);
  for (int t : targets) {
    auto it = rv.local.find(t);
    if (it != rv.local.end()) {
      rv.target[it->second] = 1;
      rv.any_target = true;
    }
  }
  rv.nbrs.resize(region.size());
  for (int i = 0; i < int(region.size()); ++i)
    for (int w : g.neighbors(region[i])) {
      auto it = rv.local.find(w);
      if (it != rv.local.end()) rv.nbrs[i].push_back(it->second);
    }
  return rv;
}

}  // namespace detail

inline connectivity_estimate connectivity_probability_exact(const embedded_graph& g, int source,
                                                            const std::vector<int>& targets,
                                                            double p,
                                                            const std::vector<int>& region) {
  require(p >= 0.0 && p <= 1.0, errc::bad_probability, "p = " + std::to_string(p));
  require(region.size() <= 20, errc::region_too_large_for_exact,
          "region has " + std::to_string(region.size()) + " vertices");
  detail::region_view rv = detail::make_region_view(g, source, targets, region);
  connectivity_estimate est;
  est.exact = true;
  if (!rv.any_target) return est;

  int k = int(region.size());
  std::vector<std::uint32_t> nbmask(k, 0);
  std::uint32_t tmask = 0;
  for (int i = 0; i < k; ++i) {
    for (int j : rv.nbrs[i]) nbmask[i] |= std::uint32_t(1) << j;
    if (rv.target[i]) tmask |= std::uint32_t(1) << i;
  }
  std::vector<double> wt(k + 1);  // p^open (1-p)^closed by open count
  for (int o = 0; o <= k; ++o)
    wt[o] = std::pow(p, o) * std::pow(1 - p, k - o);

  std::uint32_t sbit = std::uint32_t(1) << rv.source;
  double total = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << k); ++mask) {
    std::uint32_t open = std::uint32_t(mask);
    if (!(open & sbit)) continue;
    std::uint32_t reach = sbit, prev = 0;
    while (reach != prev && !(reach & tmask)) {
      prev = reach;
      std::uint32_t scan = reach;
      while (scan) {
        int i = std::countr_zero(scan);
        scan &= scan - 1;
        reach |= nbmask[i] & open;
      }
    }
    if (reach & tmask) total += wt[std::popcount(open)];
  }
  est.value = total;
  return est;
}

inline connectivity_estimate connectivity_probability(const embedded_graph& g, int source,
                                                      const std::vector<int>& targets, double p,
                                                      const std::vector<int>& region,
                                                      std::int64_t trials, std::uint64_t seed,
                                                      unsigned threads = 1) {
  require(p >= 0.0 && p <= 1.0, errc::bad_probability, "p = " + std::to_string(p));
  require(trials >= 1, errc::bad_parameters, "trials must be positive");
  detail::region_view rv = detail::make_region_view(g, source, targets, region);
  connectivity_estimate est;
  est.trials = trials;
  if (!rv.any_target) return est;

  std::vector<char> hit(trials, 0);
  for_each_trial(std::uint64_t(trials), threads, [&](std::uint64_t t) {
    std::uint64_t ts = trial_seed(seed, t);
    auto open = [&](int i) { return uniform_at(ts, std::uint64_t(rv.verts[i])) <= p; };
    if (!open(rv.source)) return;
    std::vector<char> seen(rv.verts.size(), 0);
    std::vector<int> stack{rv.source};
    seen[rv.source] = 1;
    while (!stack.empty()) {
      int i = stack.back();
      stack.pop_back();
      if (rv.target[i]) {
        hit[t] = 1;
        return;
      }
      for (int j : rv.nbrs[i])
        if (!seen[j] && open(j)) {
          seen[j] = 1;
          stack.push_back(j);
        }
    }
  });
  double wins = double(std::count(hit.begin(), hit.end(), char(1)));
  est.value = wins / double(trials);
  est.se = std::sqrt(est.value * (1 - est.value) / double(trials));
  return est;
}

// ---------------------------------------------------------------------------
// Survival thresholds.  Under the coupling, "root reaches the frontier
// through open vertices at level p" is monotone in p, so each trial has a
// sharp threshold: the min over root-frontier paths of the max U on the
// path.  A best-first search finds it without fixing p, and survival curves
// derived from thresholds are exactly nondecreasing in p.
// ---------------------------------------------------------------------------

inline std::vector<double> survival_thresholds(const embedded_graph& g, int root,
                                               std::int64_t trials, std::uint64_t seed,
                                               unsigned threads = 1) {
  g.check_vertex(root);
  require(trials >= 1, errc::bad_parameters, "trials must be positive");
  std::vector<double> out(trials, std::numeric_limits<double>::infinity());
  int n = g.vertex_count();
  for_each_trial(std::uint64_t(trials), threads, [&](std::uint64_t t) {
    std::uint64_t ts = trial_seed(seed, t);
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    using node = std::pair<double, int>;
    std::priority_queue<node, std::vector<node>, std::greater<>> pq;
    best[root] = uniform_at(ts, std::uint64_t(root));
    pq.push({best[root], root});
    while (!pq.empty()) {
      auto [key, v] = pq.top();
      pq.pop();
      if (key > best[v]) continue;
      if (g.is_frontier(v)) {
        out[t] = key;
        return;
      }
      for (int w : g.neighbors(v)) {
        double nk = std::max(key, uniform_at(ts, std::uint64_t(w)));
        if (nk < best[w]) {
          best[w] = nk;
          pq.push({nk, w});
        }
      }
    }
  });
  return out;
}

// Same thresholds on the infinite B-ary tree (root degree B, every other
// vertex B children), one per requested depth, without materializing the
// tree.  Vertices are explored lazily in heap numbering — the same ids a
// materialized level-order tree uses, so the two estimators couple exactly.
// Depths must be strictly increasing; rows are [trial][depth index].
inline std::vector<std::vector<double>> tree_survival_thresholds(
    int branching, const std::vector<int>& depths, std::int64_t trials, std::uint64_t seed,
    unsigned threads = 1) {
  require(branching >= 2, errc::bad_parameters, "branching must be at least 2");
  require(!depths.empty(), errc::bad_parameters, "no depths requested");
  for (std::size_t i = 0; i < depths.size(); ++i)
    require(depths[i] >= 0 && (i == 0 || depths[i] > depths[i - 1]), errc::bad_parameters,
            "depths must be strictly increasing and nonnegative");
  require(trials >= 1, errc::bad_parameters, "trials must be positive");
  std::uint64_t ids;  // ids stay below B^(max depth + 1)
  require(checked_pow(std::uint64_t(branching), unsigned(depths.back()) + 1, ids),
          errc::size_overflow, "vertex ids exceed 64 bits at the deepest level");

  int max_depth = depths.back();
  std::uint64_t B = std::uint64_t(branching);
  std::vector<std::vector<double>> out(trials, std::vector<double>(depths.size()));
  for_each_trial(std::uint64_t(trials), threads, [&](std::uint64_t t) {
    std::uint64_t ts = trial_seed(seed, t);
    struct node {
      double key;
      int depth;
      std::uint64_t id;
    };
    struct later {
      bool operator()(const node& a, const node& b) const {
        if (a.key != b.key) return a.key > b.key;
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.id > b.id;
      }
    };
    std::priority_queue<node, std::vector<node>, later> pq;
    pq.push({uniform_at(ts, 0), 0, 0});
    std::size_t want = 0;
    while (want < depths.size()) {
      node v = pq.top();  // the tree is infinite, so the queue never drains
      pq.pop();
      if (v.depth == depths[want]) {
        out[t][want] = v.key;
        ++want;  // deeper targets are reached no earlier than shallower ones
      }
      if (v.depth < max_depth)
        for (std::uint64_t c = 1; c <= B; ++c) {
          std::uint64_t id = v.id * B + c;
          pq.push({std::max(v.key, uniform_at(ts, id)), v.depth + 1, id});
        }
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Threshold crossing.  Raw survival curves of a coupled family never cross
// (deeper is harder pointwise), so the estimate rescales each curve by its
// depth: below the critical point survival decays exponentially in depth and
// depth * survival drops with depth, above it survival stabilizes and the
// rescaled curves order the other way.  The crossing of adjacent-depth
// rescaled curves, linearly interpolated on the grid, estimates the critical
// point; adjacent-pair estimates are averaged.
// ---------------------------------------------------------------------------

struct survival_point {
  int depth = 0;
  double p = 0;
  std::int64_t trials = 0;
  double survival = 0;
  double se = 0;
};

struct pc_report {
  std::uint64_t seed = 0;
  double resolution = 0;  // grid spacing
  double estimate = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> pair_crossings;  // per adjacent depth pair; NaN when absent
  std::vector<survival_point> table;   // depth-major, grid order
};

namespace detail {

inline pc_report crossing_report(const std::vector<int>& depths,
                                 const std::vector<std::vector<double>>& thresholds_by_depth,
                                 const std::vector<double>& grid, std::uint64_t seed) {
  require(!grid.empty(), errc::empty_grid, "p grid is empty");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    require(grid[i] < grid[i + 1], errc::bad_parameters, "p grid must increase");
  require(depths.size() >= 2, errc::bad_parameters, "need at least two depths");
  require(thresholds_by_depth.size() == depths.size(), errc::bad_parameters,
          "one threshold set per depth");

  pc_report rep;
  rep.seed = seed;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    rep.resolution = std::max(rep.resolution, grid[i + 1] - grid[i]);

  // survival[d][k] = fraction of trials whose threshold is <= grid[k]
  std::vector<std::vector<double>> survival(depths.size());
  for (std::size_t d = 0; d < depths.size(); ++d) {
    std::vector<double> thr = thresholds_by_depth[d];
    require(!thr.empty(), errc::bad_parameters, "empty threshold set");
    std::sort(thr.begin(), thr.end());
    std::int64_t trials = std::int64_t(thr.size());
    survival[d].resize(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
      auto le = std::upper_bound(thr.begin(), thr.end(), grid[k]) - thr.begin();
      double s = double(le) / double(trials);
      survival[d][k] = s;
      rep.table.push_back(
          {depths[d], grid[k], trials, s, std::sqrt(s * (1 - s) / double(trials))});
    }
  }

  double sum = 0;
  int found = 0;
  for (std::size_t d = 0; d + 1 < depths.size(); ++d) {
    // rescaled gap between the deeper and the shallower curve
    std::vector<double> gap(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
      gap[k] = depths[d + 1] * survival[d + 1][k] - depths[d] * survival[d][k];
    double cross = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
      bool rises = (gap[k] < 0 && gap[k + 1] >= 0) || (gap[k] <= 0 && gap[k + 1] > 0);
      if (!rises) continue;
      double t = gap[k] / (gap[k] - gap[k + 1]);  // denominator nonzero: strict rise
      cross = grid[k] + t * (grid[k + 1] - grid[k]);
    }
    rep.pair_crossings.push_back(cross);
    if (!std::isnan(cross)) {
      sum += cross;
      ++found;
    }
  }
  if (found > 0) rep.estimate = sum / found;
  return rep;
}

}  // namespace detail

// Survival curves and crossing estimate for a materialized depth family.
// The family maps a depth to a truncation whose vertex 0 is the root; every
// depth reuses the same per-trial seeds, so curves stay coupled.
inline pc_report estimate_pc(const std::function<embedded_graph(int)>& family,
                             const std::vector<int>& depths, const std::vector<double>& grid,
                             std::int64_t trials, std::uint64_t seed, unsigned threads = 1) {
  require(!grid.empty(), errc::empty_grid, "p grid is empty");
  require(depths.size() >= 2, errc::bad_parameters, "need at least two depths");
  std::vector<std::vector<double>> thr;
  for (int d : depths) {
    embedded_graph g = family(d);
    thr.push_back(survival_thresholds(g, 0, trials, seed, threads));
  }
  return detail::crossing_report(depths, thr, grid, seed);
}

// Same estimate on the B-ary tree via the lazy explorer; each trial shares
// one sample across all depths.
inline pc_report estimate_pc_tree(int branching, const std::vector<int>& depths,
                                  const std::vector<double>& grid, std::int64_t trials,
                                  std::uint64_t seed, unsigned threads = 1) {
  require(!grid.empty(), errc::empty_grid, "p grid is empty");
  require(depths.size() >= 2, errc::bad_parameters, "need at least two depths");
  auto rows = tree_survival_thresholds(branching, depths, trials, seed, threads);
  std::vector<std::vector<double>> thr(depths.size(), std::vector<double>(rows.size()));
  for (std::size_t t = 0; t < rows.size(); ++t)
    for (std::size_t d = 0; d < depths.size(); ++d) thr[d][t] = rows[t][d];
  return detail::crossing_report(depths, thr, grid, seed);
}

}  // namespace perc
