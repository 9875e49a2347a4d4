#pragma once

// Reference implementation of the boundary-connection functional, used only
// by tests.  Everything here is deliberately naive: states are assigned by
// recursion, clusters grow by repeated set scans, interiority is re-derived
// from scratch.  The library implementation must match it bit for bit, so
// both sides reduce to the same integer counts-by-open-count table and
// evaluate it with the same ascending-k sum.

#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <vector>

#include "perc/embedded_graph.hpp"

namespace perc::testing {

struct phi_counts {
  int interior_size = 0;
  std::vector<std::uint64_t> by_open_count;  // size interior_size + 1
};

inline double eval_phi_counts(const phi_counts& t, double p) {
  double total = 0;
  for (int k = 0; k <= t.interior_size; ++k)
    total += double(t.by_open_count[k]) * std::pow(p, k) * std::pow(1 - p, t.interior_size - k);
  return total;
}

// Counts, for every subset of open interior vertices, how many boundary
// vertices of S have a neighbor in the open cluster of v.
inline phi_counts phi_reference_counts(const embedded_graph& g, int v,
                                       const std::vector<int>& S_in) {
  std::set<int> S(S_in.begin(), S_in.end());

  // a vertex is interior when it is not on the frontier and every neighbor
  // stays inside S
  auto interior = [&](int y) {
    if (g.is_frontier(y)) return false;
    for (int w : g.neighbors(y))
      if (!S.count(w)) return false;
    return true;
  };
  std::vector<int> inner, boundary;
  for (int y : S) (interior(y) ? inner : boundary).push_back(y);

  phi_counts t;
  t.interior_size = int(inner.size());
  t.by_open_count.assign(inner.size() + 1, 0);

  std::set<int> open;
  auto count_connected = [&]() {
    std::set<int> cluster;
    if (open.count(v)) {
      cluster.insert(v);
      bool grew = true;
      while (grew) {
        grew = false;
        for (int a : std::set<int>(cluster))
          for (int w : g.neighbors(a))
            if (open.count(w) && !cluster.count(w)) {
              cluster.insert(w);
              grew = true;
            }
      }
    }
    std::uint64_t hits = 0;
    for (int y : boundary)
      for (int w : g.neighbors(y))
        if (cluster.count(w)) {
          ++hits;
          break;
        }
    return hits;
  };

  // recursion over the state of each interior vertex
  std::function<void(std::size_t)> assign = [&](std::size_t i) {
    if (i == inner.size()) {
      t.by_open_count[open.size()] += count_connected();
      return;
    }
    assign(i + 1);
    open.insert(inner[i]);
    assign(i + 1);
    open.erase(inner[i]);
  };
  assign(0);
  return t;
}

// phi by brute force: 1 on the boundary of S, the evaluated table inside.
inline double phi_reference(const embedded_graph& g, double p, int v,
                            const std::vector<int>& S) {
  std::set<int> members(S.begin(), S.end());
  bool v_interior = !g.is_frontier(v);
  if (v_interior)
    for (int w : g.neighbors(v))
      if (!members.count(w)) {
        v_interior = false;
        break;
      }
  if (!v_interior) return 1.0;
  return eval_phi_counts(phi_reference_counts(g, v, S), p);
}

}  // namespace perc::testing
