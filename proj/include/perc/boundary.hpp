#pragma once

// Boundary cycles of a finite patch facing the frontier.  f_boundary finds
// the region of the complement that holds a chosen set of frontier targets,
// walks around it, lists the region-side neighbors corner by corner, and
// prunes repeated entries by fencing off pockets until the listing is a
// cycle of distinct vertices.  Arm events then ask each arc of that cycle to
// reach the targets through open and through closed vertices, and
// separation_count turns the closed connections into a per-sample lower
// bound on the number of distinct frontier-touching open clusters.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "embedded_graph.hpp"
#include "errors.hpp"
#include "percolation.hpp"
#include "util.hpp"

namespace perc {

// Region-side neighbors of one walk position, in rotation order between the
// two walk edges.  `raw` lists everything inside the region; `kept` is the
// subset that also touches the patch and sees the frontier through the deep
// interior of the region.  The boundary cycle is built from the kept lists.
struct wedge_list {
  int vertex = -1;
  std::vector<int> raw;
  std::vector<int> kept;
};

// One pruning round: the repeated entry u was fenced off by drawing the
// edges (v_x, u) and (v_y, u) across the region; `removed` counts the region
// vertices that ended up on the far side of the fence.
struct prune_event {
  int u = -1;
  int v_x = -1;
  int v_y = -1;
  std::int64_t removed = 0;
};

struct boundary_cycle {
  std::vector<int> s;              // the patch, sorted
  std::vector<int> f_direction;    // frontier targets, sorted
  std::vector<int> walk;           // closed walk around the final region
  std::vector<wedge_list> wedges;  // one per walk position, final round
  std::vector<int> pruned;         // the boundary cycle; entries pairwise distinct
  std::vector<prune_event> prune_log;
};

namespace detail {

// The fence drawn on the surface: the patch with its induced edges, plus the
// cut edges added while pruning.  Faces of this plane subgraph are the
// candidate regions of the complement.
struct fence {
  std::vector<char> in_s;
  std::vector<char> member;              // patch plus cut vertices
  std::vector<std::uint64_t> cut_keys;   // cut edges, both directions, sorted

  bool edge(int v, int w) const {
    if (in_s[v] && in_s[w]) return true;
    return std::binary_search(cut_keys.begin(), cut_keys.end(),
                              embedded_graph::edge_key(v, w));
  }

  void add_cut(int v, int u) {
    member[u] = 1;
    for (std::uint64_t k :
         {embedded_graph::edge_key(v, u), embedded_graph::edge_key(u, v)}) {
      auto it = std::lower_bound(cut_keys.begin(), cut_keys.end(), k);
      if (it == cut_keys.end() || *it != k) cut_keys.insert(it, k);
    }
  }
};

// Everything one pruning round computes: the walk around the face of the
// fence that holds the targets, the wedge lists along it, and their
// concatenation with duplicates at block joints dropped.
struct round_state {
  std::vector<int> walk;
  std::vector<wedge_list> wedges;
  std::vector<int> seq;        // concatenated kept entries
  std::vector<int> seq_owner;  // walk position of each entry
  std::int64_t region_size = 0;
};

// Rotates a cyclic sequence so the smallest vertex leads; ties between equal
// leading vertices break toward the lexicographically smallest reading.
inline void rotate_to_canonical(std::vector<int>& cyc) {
  int n = int(cyc.size());
  if (n <= 1) return;
  int best = 0;
  for (int s = 1; s < n; ++s) {
    if (cyc[s] != cyc[best] && cyc[s] > cyc[best]) continue;
    for (int t = 0; t < n; ++t) {
      int a = cyc[(s + t) % n], b = cyc[(best + t) % n];
      if (a != b) {
        if (a < b) best = s;
        break;
      }
    }
  }
  std::rotate(cyc.begin(), cyc.begin() + best, cyc.end());
}

inline round_state trace_round(const embedded_graph& g, const fence& f,
                               const std::vector<int>& targets) {
  int n = g.vertex_count();

  // Components of the graph minus the fence.  The targets must sit in one of
  // them; everything sharing that component's face forms the region.
  std::vector<int> comp(n, -1);
  int comp_count = 0;
  {
    std::vector<int> stack;
    for (int s0 = 0; s0 < n; ++s0) {
      if (f.member[s0] || comp[s0] >= 0) continue;
      comp[s0] = comp_count;
      stack.assign(1, s0);
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : g.neighbors(v))
          if (!f.member[w] && comp[w] < 0) {
            comp[w] = comp_count;
            stack.push_back(w);
          }
      }
      ++comp_count;
    }
  }
  int target_comp = -1;
  for (int t : targets) {
    require(!f.member[t], errc::frontier_not_in_one_component,
            "target " + std::to_string(t) + " lies on the patch or a cut");
    if (target_comp < 0) target_comp = comp[t];
    require(comp[t] == target_comp, errc::frontier_not_in_one_component,
            "targets split across components");
  }

  // Directed fence edges, addressed by (vertex, rotation slot).
  std::vector<int> base(n + 1, 0);
  for (int v = 0; v < n; ++v) base[v + 1] = base[v] + g.degree(v);
  std::vector<int> orbit_of(base[n], -1);
  std::vector<std::vector<int>> orbit_walks;
  int fence_edges = 0;
  for (int v = 0; v < n; ++v) {
    if (!f.member[v]) continue;
    auto nb = g.neighbors(v);
    int d = int(nb.size());
    for (int i = 0; i < d; ++i) {
      if (!f.edge(v, nb[i])) continue;
      ++fence_edges;
      if (orbit_of[base[v] + i] >= 0) continue;
      int id = int(orbit_walks.size());
      orbit_walks.emplace_back();
      // Facial walk: after the directed edge a->b, leave b toward the
      // predecessor of a among the fence edges at b.
      int a = v, ia = i;
      while (orbit_of[base[a] + ia] < 0) {
        orbit_of[base[a] + ia] = id;
        orbit_walks[id].push_back(a);
        auto nba = g.neighbors(a);
        int b = nba[ia];
        auto nbb = g.neighbors(b);
        int db = int(nbb.size());
        int j = 0;
        while (nbb[j] != a) ++j;
        do j = (j + db - 1) % db;
        while (!f.edge(b, nbb[j]));
        a = b;
        ia = j;
      }
    }
  }

  round_state r;
  std::vector<char> rv(n, 0);

  if (fence_edges == 0) {
    // A one-vertex patch removes a single point, so the complement is one
    // region holding every component; the walk degenerates to that vertex.
    int s0 = -1;
    for (int v = 0; v < n && s0 < 0; ++v)
      if (f.member[v]) s0 = v;
    for (int v = 0; v < n; ++v) rv[v] = comp[v] >= 0;
    r.walk.assign(1, s0);
  } else {
    // Pin each component to the face its fence corners open into: from an
    // edge (v, q) leaving the fence, scan clockwise to the first fence edge
    // at v; that directed edge's orbit owns the corner.
    std::vector<int> comp_orbit(comp_count, -1);
    for (int v = 0; v < n; ++v) {
      if (!f.member[v]) continue;
      auto nb = g.neighbors(v);
      int d = int(nb.size());
      for (int i = 0; i < d; ++i) {
        int q = nb[i];
        if (f.member[q] || comp_orbit[comp[q]] >= 0) continue;
        int k = i;
        do k = (k + d - 1) % d;
        while (!f.edge(v, nb[k]));
        comp_orbit[comp[q]] = orbit_of[base[v] + k];
      }
    }
    require(target_comp >= 0 && comp_orbit[target_comp] >= 0,
            errc::frontier_not_in_one_component,
            "targets out of reach of the patch");
    int face = comp_orbit[target_comp];
    for (int v = 0; v < n; ++v)
      rv[v] = comp[v] >= 0 && comp_orbit[comp[v]] == face;

    // The orbit runs counterclockwise around its face; the boundary listing
    // reads clockwise, so flip it before choosing the canonical start.
    r.walk = orbit_walks[face];
    std::reverse(r.walk.begin(), r.walk.end());
    rotate_to_canonical(r.walk);
  }

  for (int v = 0; v < n; ++v)
    if (rv[v]) ++r.region_size;

  // Deep interior of the region: vertices all of whose neighbors stay in the
  // region.  Their components are the corridors an unbounded path can use,
  // so a corridor counts only when it reaches the frontier.
  std::vector<char> deep(n, 0);
  for (int v = 0; v < n; ++v) {
    if (!rv[v] || g.is_frontier(v)) continue;
    bool all = true;
    for (int w : g.neighbors(v))
      if (!rv[w]) {
        all = false;
        break;
      }
    deep[v] = all;
  }
  union_find corridors(n);
  for (int v = 0; v < n; ++v) {
    if (!deep[v]) continue;
    for (int w : g.neighbors(v))
      if (deep[w] && w > v) corridors.unite(v, w);
  }
  std::vector<char> escapes(n, 0);
  for (int v = 0; v < n; ++v) {
    if (!deep[v]) continue;
    for (int w : g.neighbors(v))
      if (g.is_frontier(w)) {
        escapes[corridors.find(v)] = 1;
        break;
      }
  }
  auto kept_member = [&](int u) {
    if (!rv[u]) return false;
    bool touches_patch = false, sees_out = false;
    for (int w : g.neighbors(u)) {
      if (f.in_s[w]) touches_patch = true;
      if (deep[w] && escapes[corridors.find(w)]) sees_out = true;
    }
    return touches_patch && sees_out;
  };

  // Wedge lists: at walk position j the region-side corner spans the
  // rotation counterclockwise from the edge back to walk[j-1] up to the edge
  // on to walk[j+1]; the degenerate one-vertex walk owns its full rotation.
  int dd = int(r.walk.size());
  r.wedges.resize(dd);
  for (int j = 0; j < dd; ++j) {
    int v = r.walk[j];
    auto nb = g.neighbors(v);
    int d = int(nb.size());
    wedge_list& wl = r.wedges[j];
    wl.vertex = v;
    auto record = [&](int q) {
      if (!rv[q]) return;
      wl.raw.push_back(q);
      if (kept_member(q)) wl.kept.push_back(q);
    };
    if (dd == 1) {
      for (int k = 0; k < d; ++k) record(nb[k]);
      continue;
    }
    int prev = r.walk[(j + dd - 1) % dd], next = r.walk[(j + 1) % dd];
    int ip = 0, inx = 0;
    while (nb[ip] != prev) ++ip;
    while (nb[inx] != next) ++inx;
    for (int k = (ip + 1) % d; k != inx; k = (k + 1) % d) record(nb[k]);
  }

  // A neighbor shared by consecutive walk corners shows up as the last entry
  // of one kept list and the first of the next; drop the second copy.
  std::vector<std::vector<int>> lists(dd);
  for (int j = 0; j < dd; ++j) lists[j] = r.wedges[j].kept;
  if (dd >= 2)
    for (int j = 0; j < dd; ++j) {
      auto& a = lists[j];
      auto& b = lists[(j + 1) % dd];
      if (!a.empty() && !b.empty() && a.back() == b.front())
        b.erase(b.begin());
    }
  for (int j = 0; j < dd; ++j)
    for (int u : lists[j]) {
      r.seq.push_back(u);
      r.seq_owner.push_back(j);
    }
  return r;
}

}  // namespace detail

// Walks around the complement region holding the frontier targets and
// returns the cycle of region-side neighbors, pruning any vertex listed
// twice by fencing the pocket between its two occurrences off the region.
inline boundary_cycle f_boundary(const embedded_graph& g, std::vector<int> s,
                                 std::vector<int> f_direction) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  require(!s.empty(), errc::disconnected_s, "empty patch");
  for (int v : s) {
    g.check_vertex(v);
    require(!g.is_frontier(v), errc::precondition_violated,
            "patch vertex " + std::to_string(v) +
                " is frontier; its rotation is incomplete");
  }
  std::sort(f_direction.begin(), f_direction.end());
  f_direction.erase(std::unique(f_direction.begin(), f_direction.end()),
                    f_direction.end());
  require(!f_direction.empty(), errc::bad_parameters, "no frontier targets");
  for (int v : f_direction) {
    g.check_vertex(v);
    require(g.is_frontier(v), errc::bad_parameters,
            "target " + std::to_string(v) + " is not a frontier vertex");
  }

  detail::fence fen;
  fen.in_s.assign(g.vertex_count(), 0);
  for (int v : s) fen.in_s[v] = 1;
  fen.member = fen.in_s;

  {
    union_find uf(g.vertex_count());
    for (int v : s)
      for (int w : g.neighbors(v))
        if (fen.in_s[w]) uf.unite(v, w);
    for (int v : s)
      require(uf.find(v) == uf.find(s.front()), errc::disconnected_s,
              "patch is not connected");
  }

  boundary_cycle out;
  out.s = s;
  out.f_direction = f_direction;

  detail::round_state st = detail::trace_round(g, fen, f_direction);
  while (true) {
    // First vertex, reading the listing linearly, that occurs twice.
    std::vector<int> count(g.vertex_count(), 0);
    for (int u : st.seq) ++count[u];
    int p1 = -1;
    for (int i = 0; i < int(st.seq.size()) && p1 < 0; ++i)
      if (count[st.seq[i]] >= 2) p1 = i;
    if (p1 < 0) break;
    int u = st.seq[p1];
    int p2 = p1 + 1;
    while (st.seq[p2] != u) ++p2;

    int vx = st.walk[st.seq_owner[p1]];
    int vy = st.walk[st.seq_owner[p2]];
    fen.add_cut(vx, u);
    fen.add_cut(vy, u);

    detail::round_state next = detail::trace_round(g, fen, f_direction);
    require(next.seq.size() < st.seq.size(), errc::precondition_violated,
            "cutting at " + std::to_string(u) +
                " did not shrink the listing; the rotation system is not a "
                "planar embedding here");
    out.prune_log.push_back(
        {u, vx, vy, st.region_size - next.region_size - 1});
    st = std::move(next);
  }

  out.walk = std::move(st.walk);
  out.wedges = std::move(st.wedges);
  out.pruned = std::move(st.seq);
  return out;
}

// Arc cut points along a boundary cycle: positions i_1 < ... < i_{2k} into
// the pruned sequence.  Arc j covers the entries after cut j-1 up to and
// including cut j, with arc 1 wrapping around from after the last cut.
struct arm_spec {
  std::vector<int> cuts;
};

inline std::vector<std::vector<int>> arcs_of(const boundary_cycle& b,
                                             const arm_spec& spec) {
  int h = int(b.pruned.size());
  int m = int(spec.cuts.size());
  require(m >= 2 && m % 2 == 0, errc::arm_spec_mismatch,
          "need a positive even number of cuts");
  for (int i = 0; i < m; ++i) {
    require(spec.cuts[i] >= 0 && spec.cuts[i] < h, errc::arm_spec_mismatch,
            "cut position " + std::to_string(spec.cuts[i]) + " out of range");
    require(i == 0 || spec.cuts[i - 1] < spec.cuts[i], errc::arm_spec_mismatch,
            "cut positions must increase");
  }
  std::vector<std::vector<int>> arcs(m);
  for (int j = 0; j < m; ++j) {
    int t = (spec.cuts[(j + m - 1) % m] + 1) % h;
    while (true) {
      arcs[j].push_back(b.pruned[t]);
      if (t == spec.cuts[j]) break;
      t = (t + 1) % h;
    }
  }
  return arcs;
}

// 2k arcs of as even a length as the cycle allows.
inline arm_spec equal_arm_spec(const boundary_cycle& b, int k) {
  require(k >= 1, errc::bad_parameters, "k must be positive");
  int h = int(b.pruned.size());
  require(h >= 2 * k, errc::arm_spec_mismatch,
          "boundary cycle of length " + std::to_string(h) + " cannot carry " +
              std::to_string(2 * k) + " arcs");
  arm_spec spec;
  for (int j = 1; j <= 2 * k; ++j)
    spec.cuts.push_back(int(std::int64_t(j) * h / (2 * k)) - 1);
  return spec;
}

struct arm_witness {
  std::vector<int> open_path;    // arc vertex .. frontier target, open throughout
  std::vector<int> closed_path;  // likewise through closed vertices
};

struct arm_event_report {
  bool occurs = false;
  int failed_arc = -1;  // first arc missing a connection; -1 when none
  std::vector<arm_witness> arms;
};

namespace detail {

// Shortest path from any source to any target through vertices of one state,
// avoiding the patch.  Endpoints count: the source and the reached target
// must carry the state themselves.  Empty when there is no such path.
inline std::vector<int> state_path(const embedded_graph& g,
                                   const configuration& c,
                                   const std::vector<char>& in_s,
                                   vertex_state state,
                                   const std::vector<int>& sources,
                                   const std::vector<char>& is_target) {
  std::vector<int> parent(g.vertex_count(), -2);
  std::deque<int> q;
  auto finish = [&](int v) {
    std::vector<int> path;
    for (int t = v; t >= 0; t = parent[t]) path.push_back(t);
    std::reverse(path.begin(), path.end());
    return path;
  };
  for (int v : sources) {
    if (in_s[v] || !c.matches(v, state) || parent[v] != -2) continue;
    parent[v] = -1;
    if (is_target[v]) return finish(v);
    q.push_back(v);
  }
  while (!q.empty()) {
    int a = q.front();
    q.pop_front();
    for (int b : g.neighbors(a)) {
      if (parent[b] != -2 || in_s[b] || !c.matches(b, state)) continue;
      parent[b] = a;
      if (is_target[b]) return finish(b);
      q.push_back(b);
    }
  }
  return {};
}

}  // namespace detail

// True when every arc reaches the frontier targets outside the patch both
// through open vertices and through closed ones.  Witness paths come back
// for every arc that has them, so failures are inspectable.
inline arm_event_report arm_event_occurs(const embedded_graph& g,
                                         const configuration& c,
                                         const boundary_cycle& b,
                                         const arm_spec& spec) {
  require(int(c.open.size()) == g.vertex_count(), errc::bad_parameters,
          "configuration drawn on a different graph");
  auto arcs = arcs_of(b, spec);
  for (auto& arc : arcs)
    for (int v : arc) g.check_vertex(v);
  std::vector<char> in_s(g.vertex_count(), 0);
  for (int v : b.s) in_s[v] = 1;
  std::vector<char> is_target(g.vertex_count(), 0);
  for (int v : b.f_direction) is_target[v] = 1;

  arm_event_report rep;
  rep.arms.resize(arcs.size());
  rep.occurs = true;
  for (int j = 0; j < int(arcs.size()); ++j) {
    rep.arms[j].open_path = detail::state_path(g, c, in_s, vertex_state::open,
                                               arcs[j], is_target);
    rep.arms[j].closed_path = detail::state_path(
        g, c, in_s, vertex_state::closed, arcs[j], is_target);
    if (rep.arms[j].open_path.empty() || rep.arms[j].closed_path.empty()) {
      rep.occurs = false;
      if (rep.failed_arc < 0) rep.failed_arc = j;
    }
  }
  return rep;
}

// Counts the open clusters that survive deleting the patch and the closed
// arms of the even arcs, touch the frontier, and meet an odd arc.  With the
// arm event in force each odd arc owns such a cluster and the closed arms
// keep them apart, so the count is at least half the number of arcs.
inline int separation_count(const embedded_graph& g, const configuration& c,
                            const boundary_cycle& b, const arm_spec& spec) {
  arm_event_report rep = arm_event_occurs(g, c, b, spec);
  require(rep.occurs, errc::event_absent,
          "arc " + std::to_string(rep.failed_arc) + " lacks a connection");
  auto arcs = arcs_of(b, spec);

  int n = g.vertex_count();
  std::vector<char> gone(n, 0);
  for (int v : b.s) gone[v] = 1;
  for (int j = 1; j < int(arcs.size()); j += 2)
    for (int v : rep.arms[j].closed_path) gone[v] = 1;

  auto alive = [&](int v) { return !gone[v] && c.is_open(v); };
  union_find uf(n);
  for (int v = 0; v < n; ++v) {
    if (!alive(v)) continue;
    for (int w : g.neighbors(v))
      if (w > v && alive(w)) uf.unite(v, w);
  }
  std::vector<char> sees_frontier(n, 0), meets_odd_arc(n, 0);
  for (int v : g.frontier())
    if (alive(v)) sees_frontier[uf.find(v)] = 1;
  for (int j = 0; j < int(arcs.size()); j += 2)
    for (int v : arcs[j])
      if (alive(v)) meets_odd_arc[uf.find(v)] = 1;

  int count = 0;
  for (int v = 0; v < n; ++v)
    if (alive(v) && uf.find(v) == v && sees_frontier[v] && meets_odd_arc[v])
      ++count;
  return count;
}

}  // namespace perc
