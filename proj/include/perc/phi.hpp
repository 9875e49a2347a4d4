#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "perc/embedded_graph.hpp"
#include "perc/errors.hpp"
#include "perc/percolation.hpp"
#include "perc/util.hpp"

namespace perc {

using rational = boost::multiprecision::cpp_rational;

enum class estimate_method { exact, monte_carlo };

// ---------------------------------------------------------------------------
// The boundary-connection functional.  For a finite S containing v,
//
//   phi_p(v, S) = sum over y in S with a neighbor outside S of
//                 P_p(v joins the neighborhood of y through open vertices,
//                     all of them interior to S)
//
// and 1 when v itself sits on the boundary of S.  Openness convention: every
// path vertex must be open, including v and the terminal neighbor of y; a
// length-0 path (v adjacent to y) requires v open.  On truncations, frontier
// vertices never count as interior: their unseen neighbors lie outside S.
//
// Exact mode enumerates interior configurations into an integer table
// indexed by open-vertex count and evaluates
//
//   sum_k count[k] * p^k * (1-p)^(m-k)
//
// in ascending k.  The table and this evaluation order are the exactness
// contract shared with the reference implementation in the test suite.
// ---------------------------------------------------------------------------

struct phi_estimate {
  double value = 0;
  estimate_method method = estimate_method::exact;
  double se = 0;             // 0 for exact
  double p = 0;
  int v = -1;
  std::uint64_t s_digest = 0;  // order-insensitive digest of the id set
};

namespace detail {

struct s_split {
  std::vector<int> members;   // sorted, deduplicated
  std::vector<int> interior;  // of the members
  std::vector<int> boundary;  // members with a neighbor outside S (or frontier)
};

inline s_split split_s(const embedded_graph& g, const std::vector<int>& S) {
  s_split sp;
  sp.members = S;
  std::sort(sp.members.begin(), sp.members.end());
  sp.members.erase(std::unique(sp.members.begin(), sp.members.end()), sp.members.end());
  for (int y : sp.members) g.check_vertex(y);
  sp.interior = g.interior(sp.members);
  std::vector<char> in_interior(g.vertex_count(), 0);
  for (int y : sp.interior) in_interior[y] = 1;
  for (int y : sp.members)
    if (!in_interior[y]) sp.boundary.push_back(y);
  return sp;
}

inline std::uint64_t id_set_digest(const std::vector<int>& sorted_ids) {
  std::uint64_t h = 0x5bf03635e3c4ff26ull;
  for (int v : sorted_ids) h = mix64(h ^ (std::uint64_t(v) + kGolden));
  return h;
}

// Adjacency of `verts` restricted to itself, as bitmasks.
inline std::vector<std::uint32_t> local_masks(const embedded_graph& g,
                                              const std::vector<int>& verts) {
  std::vector<int> local(g.vertex_count(), -1);
  for (int i = 0; i < int(verts.size()); ++i) local[verts[i]] = i;
  std::vector<std::uint32_t> mask(verts.size(), 0);
  for (int i = 0; i < int(verts.size()); ++i)
    for (int w : g.neighbors(verts[i]))
      if (local[w] >= 0) mask[i] |= std::uint32_t(1) << local[w];
  return mask;
}

inline std::uint32_t flood_bits(std::uint32_t start, std::uint32_t open,
                                const std::vector<std::uint32_t>& nb) {
  std::uint32_t reach = start & open, prev = 0;
  while (reach != prev) {
    prev = reach;
    std::uint32_t scan = reach;
    while (scan) {
      int i = std::countr_zero(scan);
      scan &= scan - 1;
      reach |= nb[i] & open;
    }
  }
  return reach;
}

// The shared evaluation order: ascending k, one fused term per count.
inline double eval_counts(const std::vector<std::uint64_t>& counts, int m, double p) {
  double total = 0;
  for (int k = 0; k <= m; ++k)
    total += double(counts[k]) * std::pow(p, k) * std::pow(1 - p, m - k);
  return total;
}

inline rational pow_rational(const rational& x, int e) {
  rational r = 1;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

inline rational eval_counts_rational(const std::vector<std::uint64_t>& counts, int m,
                                     const rational& p) {
  rational total = 0, q = 1 - p;
  for (int k = 0; k <= m; ++k)
    total += rational(counts[k]) * pow_rational(p, k) * pow_rational(q, m - k);
  return total;
}

}  // namespace detail

inline phi_estimate phi_value(const embedded_graph& g, double p, int v,
                              const std::vector<int>& S,
                              estimate_method mode = estimate_method::exact,
                              std::int64_t trials = 0, std::uint64_t seed = 0,
                              unsigned threads = 1) {
  require(p >= 0.0 && p <= 1.0, errc::bad_probability, "p = " + std::to_string(p));
  g.check_vertex(v);
  detail::s_split sp = detail::split_s(g, S);
  require(std::binary_search(sp.members.begin(), sp.members.end(), v), errc::vertex_not_in_s,
          "vertex " + std::to_string(v) + " is not in S");

  phi_estimate est;
  est.method = mode;
  est.p = p;
  est.v = v;
  est.s_digest = detail::id_set_digest(sp.members);

  if (!std::binary_search(sp.interior.begin(), sp.interior.end(), v)) {
    est.value = 1.0;  // boundary vertices short-circuit at every p
    est.method = estimate_method::exact;
    return est;
  }

  int m = int(sp.interior.size());
  std::vector<std::uint32_t> nb = detail::local_masks(g, sp.interior);
  std::vector<int> local(g.vertex_count(), -1);
  for (int i = 0; i < m; ++i) local[sp.interior[i]] = i;
  std::uint32_t vbit = std::uint32_t(1) << local[v];

  // per boundary vertex: the interior part of its neighborhood
  std::vector<std::uint32_t> target;
  for (int y : sp.boundary) {
    std::uint32_t t = 0;
    for (int w : g.neighbors(y))
      if (local[w] >= 0) t |= std::uint32_t(1) << local[w];
    if (t) target.push_back(t);  // empty neighborhoods contribute 0 always
  }

  if (mode == estimate_method::exact) {
    require(m <= 20, errc::interior_too_large_for_exact,
            "interior has " + std::to_string(m) + " vertices");
    std::vector<std::uint64_t> counts(m + 1, 0);
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << m); ++mask) {
      std::uint32_t open = std::uint32_t(mask);
      if (!(open & vbit)) continue;
      std::uint32_t reach = detail::flood_bits(vbit, open, nb);
      std::uint64_t hits = 0;
      for (std::uint32_t t : target)
        if (reach & t) ++hits;
      counts[std::popcount(open)] += hits;
    }
    est.value = detail::eval_counts(counts, m, p);
    return est;
  }

  require(trials >= 1, errc::bad_parameters, "trials must be positive");
  std::vector<std::vector<char>> hit(target.size(), std::vector<char>(trials, 0));
  for_each_trial(std::uint64_t(trials), threads, [&](std::uint64_t t) {
    std::uint64_t ts = trial_seed(seed, t);
    std::uint32_t open = 0;
    for (int i = 0; i < m; ++i)
      if (uniform_at(ts, std::uint64_t(sp.interior[i])) <= p) open |= std::uint32_t(1) << i;
    if (!(open & vbit)) return;
    std::uint32_t reach = detail::flood_bits(vbit, open, nb);
    for (std::size_t j = 0; j < target.size(); ++j)
      if (reach & target[j]) hit[j][t] = 1;
  });
  double var = 0;
  for (std::size_t j = 0; j < target.size(); ++j) {
    double mean = double(std::count(hit[j].begin(), hit[j].end(), char(1))) / double(trials);
    est.value += mean;
    var += mean * (1 - mean) / double(trials);
  }
  est.se = std::sqrt(var);
  return est;
}

// ---------------------------------------------------------------------------
// Factorization inequality: for u in S, S inside A, B disjoint from S,
//
//   P_p(u <-> B within A) <= sum over boundary y of S of
//       P_p(u <-> neighborhood of y via interior of S) * P_p(y <-> B within A)
//
// with the first factor replaced by 1_{y=u} when u is itself on the boundary
// of S.  Exact mode compares the two sides as exact rationals (p converts
// exactly: every double is dyadic), so "holds" carries no tolerance at all.
// ---------------------------------------------------------------------------

struct cutset_report {
  double lhs = 0, rhs = 0;
  double lhs_se = 0, rhs_se = 0;  // 0 in exact mode
  bool holds = false;
  bool exact = false;
};

namespace detail {

// Per-source integer tables for "source <-> targets within open region":
// counts[k] = number of k-open-vertex configurations of `region` connecting
// the source to a target.  One enumeration serves many sources by flooding
// from the target side.
inline std::vector<std::vector<std::uint64_t>> connection_tables(
    const embedded_graph& g, const std::vector<int>& region, const std::vector<int>& targets,
    const std::vector<int>& sources) {
  int m = int(region.size());
  std::vector<int> local(g.vertex_count(), -1);
  for (int i = 0; i < m; ++i) local[region[i]] = i;
  std::vector<std::uint32_t> nb = local_masks(g, region);
  std::uint32_t tmask = 0;
  for (int t : targets)
    if (local[t] >= 0) tmask |= std::uint32_t(1) << local[t];
  std::vector<std::uint32_t> sbit(sources.size(), 0);
  for (std::size_t j = 0; j < sources.size(); ++j)
    if (local[sources[j]] >= 0) sbit[j] = std::uint32_t(1) << local[sources[j]];

  std::vector<std::vector<std::uint64_t>> counts(
      sources.size(), std::vector<std::uint64_t>(m + 1, 0));
  if (!tmask) return counts;
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << m); ++mask) {
    std::uint32_t open = std::uint32_t(mask);
    if (!(open & tmask)) continue;
    std::uint32_t reach = flood_bits(tmask, open, nb);
    int k = std::popcount(open);
    for (std::size_t j = 0; j < sources.size(); ++j)
      if (reach & sbit[j]) ++counts[j][k];
  }
  return counts;
}

}  // namespace detail

inline cutset_report cutset_inequality_check(const embedded_graph& g, double p, int u,
                                             const std::vector<int>& S,
                                             const std::vector<int>& A,
                                             const std::vector<int>& B,
                                             estimate_method mode = estimate_method::exact,
                                             std::int64_t trials = 0, std::uint64_t seed = 0,
                                             unsigned threads = 1) {
  require(p >= 0.0 && p <= 1.0, errc::bad_probability, "p = " + std::to_string(p));
  detail::s_split sp = detail::split_s(g, S);
  std::vector<int> a_sorted = A, b_sorted = B;
  std::sort(a_sorted.begin(), a_sorted.end());
  a_sorted.erase(std::unique(a_sorted.begin(), a_sorted.end()), a_sorted.end());
  std::sort(b_sorted.begin(), b_sorted.end());
  for (int x : a_sorted) g.check_vertex(x);
  for (int x : b_sorted) g.check_vertex(x);
  require(std::binary_search(sp.members.begin(), sp.members.end(), u),
          errc::precondition_violated, "u must lie in S");
  require(std::includes(a_sorted.begin(), a_sorted.end(), sp.members.begin(), sp.members.end()),
          errc::precondition_violated, "S must lie inside A");
  for (int x : b_sorted)
    require(!std::binary_search(sp.members.begin(), sp.members.end(), x),
            errc::precondition_violated, "B must avoid S");

  bool u_interior = std::binary_search(sp.interior.begin(), sp.interior.end(), u);
  cutset_report rep;

  if (mode == estimate_method::exact) {
    require(a_sorted.size() <= 14, errc::region_too_large_for_exact,
            "A has " + std::to_string(a_sorted.size()) + " vertices");
    rational rp(p);

    // crossing factors P(x <-> B within A), for x = u and every boundary y
    std::vector<int> sources = sp.boundary;
    sources.push_back(u);
    auto cross = detail::connection_tables(g, a_sorted, b_sorted, sources);
    int ma = int(a_sorted.size());
    rational lhs = detail::eval_counts_rational(cross.back(), ma, rp);

    rational rhs = 0;
    if (u_interior) {
      // local factors P(u <-> neighborhood of y via interior of S)
      int mi = int(sp.interior.size());
      std::vector<int> local(g.vertex_count(), -1);
      for (int i = 0; i < mi; ++i) local[sp.interior[i]] = i;
      std::vector<std::uint32_t> nb = detail::local_masks(g, sp.interior);
      std::uint32_t ubit = std::uint32_t(1) << local[u];
      std::vector<std::vector<std::uint64_t>> phi_counts(
          sp.boundary.size(), std::vector<std::uint64_t>(mi + 1, 0));
      std::vector<std::uint32_t> target(sp.boundary.size(), 0);
      for (std::size_t j = 0; j < sp.boundary.size(); ++j)
        for (int w : g.neighbors(sp.boundary[j]))
          if (local[w] >= 0) target[j] |= std::uint32_t(1) << local[w];
      for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << mi); ++mask) {
        std::uint32_t open = std::uint32_t(mask);
        if (!(open & ubit)) continue;
        std::uint32_t reach = detail::flood_bits(ubit, open, nb);
        int k = std::popcount(open);
        for (std::size_t j = 0; j < sp.boundary.size(); ++j)
          if (reach & target[j]) ++phi_counts[j][k];
      }
      for (std::size_t j = 0; j < sp.boundary.size(); ++j)
        rhs += detail::eval_counts_rational(phi_counts[j], mi, rp) *
               detail::eval_counts_rational(cross[j], ma, rp);
    } else {
      for (std::size_t j = 0; j < sp.boundary.size(); ++j)
        if (sp.boundary[j] == u) rhs = detail::eval_counts_rational(cross[j], ma, rp);
    }

    rep.lhs = lhs.convert_to<double>();
    rep.rhs = rhs.convert_to<double>();
    rep.holds = lhs <= rhs;
    rep.exact = true;
    return rep;
  }

  require(trials >= 1, errc::bad_parameters, "trials must be positive");
  connectivity_estimate lhs = connectivity_probability(g, u, b_sorted, p, a_sorted, trials,
                                                       mix64(seed ^ 0x1157ull), threads);
  rep.lhs = lhs.value;
  rep.lhs_se = lhs.se;
  double var = 0;
  for (std::size_t j = 0; j < sp.boundary.size(); ++j) {
    int y = sp.boundary[j];
    double a, sa, b, sb;
    if (u_interior) {
      connectivity_estimate loc = connectivity_probability(
          g, u, std::vector<int>(g.neighbors(y).begin(), g.neighbors(y).end()), p, sp.interior,
          trials, mix64(seed ^ (0x3000ull + j)), threads);
      a = loc.value;
      sa = loc.se;
    } else {
      a = (y == u) ? 1.0 : 0.0;
      sa = 0;
    }
    if (a == 0.0 && sa == 0.0) continue;
    connectivity_estimate yb = connectivity_probability(g, y, b_sorted, p, a_sorted, trials,
                                                        mix64(seed ^ (0x4000ull + j)), threads);
    b = yb.value;
    sb = yb.se;
    rep.rhs += a * b;
    var += a * a * sb * sb + b * b * sa * sa;
  }
  rep.rhs_se = std::sqrt(var);
  double tol = 3 * std::sqrt(rep.lhs_se * rep.lhs_se + rep.rhs_se * rep.rhs_se);
  rep.holds = rep.lhs <= rep.rhs + tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Threshold scan.  For a nested family of sets around v, reports phi per
// (set, p) and the largest grid p at which some family member keeps phi at
// or below 1 - eps: the finite-scale stand-in for the functional's critical
// threshold.
// ---------------------------------------------------------------------------

struct phi_scan_row {
  int family_index = 0;
  double p = 0;
  double value = 0;
  double se = 0;
};

struct phi_scan_report {
  std::vector<phi_scan_row> rows;  // family-major, grid order
  double threshold_proxy = std::numeric_limits<double>::quiet_NaN();
  std::vector<char> monotone;  // per family member: value nondecreasing in p
};

inline phi_scan_report phi_threshold_scan(const embedded_graph& g, int v,
                                          const std::vector<std::vector<int>>& s_family,
                                          const std::vector<double>& p_grid, double eps,
                                          estimate_method mode = estimate_method::exact,
                                          std::int64_t trials = 0, std::uint64_t seed = 0,
                                          unsigned threads = 1) {
  require(!s_family.empty(), errc::empty_family, "no sets to scan");
  require(!p_grid.empty(), errc::empty_grid, "p grid is empty");
  for (std::size_t i = 0; i + 1 < p_grid.size(); ++i)
    require(p_grid[i] < p_grid[i + 1], errc::bad_parameters, "p grid must increase");
  require(eps > 0 && eps < 1, errc::bad_parameters, "eps must lie in (0,1)");

  phi_scan_report rep;
  std::vector<std::vector<double>> values(s_family.size());
  for (std::size_t s = 0; s < s_family.size(); ++s) {
    bool mono = true;
    for (std::size_t k = 0; k < p_grid.size(); ++k) {
      phi_estimate e = phi_value(g, p_grid[k], v, s_family[s], mode, trials,
                                 mix64(seed ^ (s * 1315423911ull + k)), threads);
      values[s].push_back(e.value);
      rep.rows.push_back({int(s), p_grid[k], e.value, e.se});
      if (k > 0 && values[s][k] < values[s][k - 1] - 1e-9) mono = false;
    }
    rep.monotone.push_back(mono ? 1 : 0);
    if (mode == estimate_method::exact)
      require(mono, errc::precondition_violated,
              "exact phi decreased in p; this indicates a defect");
  }
  for (std::size_t k = 0; k < p_grid.size(); ++k) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < s_family.size(); ++s) best = std::min(best, values[s][k]);
    if (best <= 1 - eps) rep.threshold_proxy = p_grid[k];
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Closed-form bounds.
// ---------------------------------------------------------------------------

// Lower bound on a point's chance to join the unbounded cluster once the
// functional certifies supercriticality at p1: 1 - ((1-p)/(1-p1))^(1-eps).
inline double supercritical_lower_bound(double p, double p1, double eps) {
  require(p1 > 0 && p1 <= p && p < 1, errc::bad_parameters, "need 0 < p1 <= p < 1");
  require(eps > 0 && eps < 1, errc::bad_parameters, "eps must lie in (0,1)");
  return 1 - std::pow((1 - p) / (1 - p1), 1 - eps);
}

// Decay bound for block-to-block connection across n levels of a corridor at
// the slightly supercritical level: base (4 + 9 eps)/M raised to the n-th
// power.  The base exceeds 1 for small M, making the bound vacuous; theta
// tracks the companion convergence condition M * theta^2 < 1.
struct decay_bound {
  double value = 0;
  double base = 0;
  double theta = 0;
  bool vacuous = false;
  bool theta_converges = false;
};

inline decay_bound le85_bound(int M, double eps, int n) {
  require(M >= 2, errc::bad_parameters, "M must be at least 2");
  require(eps > 0, errc::bad_parameters, "eps must be positive");
  require(n >= 1, errc::bad_parameters, "n must be at least 1");
  decay_bound b;
  b.base = (4.0 + 9.0 * eps) / double(M);
  b.theta = 4.0 / double(M) + eps;
  b.value = std::pow(b.base, n);
  b.vacuous = b.base >= 1.0;
  b.theta_converges = double(M) * b.theta * b.theta < 1.0;
  return b;
}

}  // namespace perc
