#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "perc/adic.hpp"
#include "perc/embedded_graph.hpp"
#include "perc/errors.hpp"
#include "perc/generators.hpp"
#include "perc/percolation.hpp"
#include "perc/util.hpp"

namespace perc {

// Recorded in every artifact header so a data file names the code that made it.
inline constexpr const char* version_string = "0.1.0";

// ---------------------------------------------------------------------------
// Plain BFS distances from one vertex, ignoring states; -1 marks vertices in
// other components.
// ---------------------------------------------------------------------------

inline std::vector<int> graph_distances(const embedded_graph& g, int source) {
  g.check_vertex(source);
  std::vector<int> dist(g.vertex_count(), -1);
  std::vector<int> cur{source}, nxt;
  dist[source] = 0;
  for (int r = 1; !cur.empty(); ++r) {
    nxt.clear();
    for (int v : cur)
      for (int w : g.neighbors(v))
        if (dist[w] < 0) {
          dist[w] = r;
          nxt.push_back(w);
        }
    cur.swap(nxt);
  }
  return dist;
}

// ---------------------------------------------------------------------------
// Distance audit of the triangulated strip.
//
// The audited property: for two group corners at depths t1 and t2, the graph
// distance is at least (t1 + t2) / 2 whenever the pair is a left corner
// against a right corner, or two same-side corners whose digit words already
// disagree within the first min(t1, t2) digits.  The audit enumerates every
// such pair up to a depth bound and measures distances by BFS on the strip
// truncated with a safety margin; deeper truncation can only add vertices, so
// the companion run with margin + 2 reports whether any measurement moved.
// ---------------------------------------------------------------------------

struct distance_audit {
  std::uint64_t pairs_checked = 0;  // enumerated pairs, the coincident root pair included
  std::uint64_t violations = 0;     // measured distance fell below (t1 + t2) / 2
  std::uint64_t unresolved = 0;     // beyond the search radius; bound certified, slack >= 1
  double min_slack = std::numeric_limits<double>::infinity();  // over measured pairs
  bool stable = false;  // margin + 2 reproduced every measurement
};

namespace detail {

// A left or right corner of the depth-t group addressed by `word`.
struct group_corner {
  int t;
  std::uint64_t column;  // one-based position within level t
  std::vector<int> word;
};

inline std::vector<group_corner> corner_list(const adic_params& params, int maxdepth,
                                             lr_side side) {
  std::vector<group_corner> out;
  out.push_back({0, 1, {}});
  for (int t = 1; t <= maxdepth; ++t) {
    std::vector<int> w(t, 0);
    for (;;) {
      out.push_back({t, lr_boundary(params, w, t, side).second, w});
      int k = t - 1;
      while (k >= 0 && ++w[k] == params.M) w[k--] = 0;
      if (k < 0) break;
    }
  }
  return out;
}

// The same-side pair condition: the words disagree somewhere in the shared
// prefix.  Empty shared prefixes cannot disagree, so depth-0 corners never
// pair with their own side.
inline bool words_separated(const group_corner& a, const group_corner& b) {
  int m = std::min(a.t, b.t);
  for (int k = 0; k < m; ++k)
    if (a.word[k] != b.word[k]) return true;
  return false;
}

// Indices into the combined corner list; the BFS runs from src.
struct corner_pair {
  int src, dst;
  int tsum;  // the claimed distance bound is tsum / 2
};

inline constexpr std::uint32_t far_away = ~std::uint32_t(0);

// Exact distance per pair, or far_away when it exceeds the search radius.
// The radius from a source is 1 + max over its pairs of (tsum - 1) / 2: every
// distance below a pair's bound lies within (tsum - 1) / 2, so a far_away
// pair satisfies its bound with slack at least 1.
inline std::vector<std::uint32_t> measure_pairs(const adic_params& params, int depth_cap,
                                                const std::vector<group_corner>& corners,
                                                const std::vector<corner_pair>& pairs) {
  implicit_strip strip(params, depth_cap);
  std::vector<std::uint64_t> id_base(depth_cap + 1);  // key(n, i) = id_base[n] + i, never 0
  std::uint64_t off = 1;
  for (int n = 0; n <= depth_cap; ++n) {
    id_base[n] = off - 1;
    std::uint64_t sz = strip.level_size(n);
    require(off + sz > off, errc::size_overflow, "strip ids exceed 64 bits");
    off += sz;
  }

  std::vector<std::vector<int>> by_src(corners.size());
  for (int k = 0; k < int(pairs.size()); ++k) by_src[pairs[k].src].push_back(k);

  std::vector<std::uint32_t> measured(pairs.size(), far_away);
  std::vector<std::pair<int, std::uint64_t>> cur, nxt;
  for (int s = 0; s < int(corners.size()); ++s) {
    if (by_src[s].empty()) continue;
    int radius = 0;
    for (int k : by_src[s]) radius = std::max(radius, (pairs[k].tsum - 1) / 2 + 1);

    flat_map64 dist(std::size_t(1) << 12);
    bool ins;
    cur.assign(1, {corners[s].t, corners[s].column});
    dist.find_or_insert(id_base[corners[s].t] + corners[s].column, 0, ins);
    for (int r = 1; r <= radius && !cur.empty(); ++r) {
      nxt.clear();
      for (auto [n, i] : cur)
        strip.for_each_neighbor(n, i, [&](int nn, std::uint64_t ni) {
          bool inserted;
          dist.find_or_insert(id_base[nn] + ni, std::uint32_t(r), inserted);
          if (inserted) nxt.push_back({nn, ni});
        });
      cur.swap(nxt);
    }
    for (int k : by_src[s]) {
      const group_corner& c = corners[pairs[k].dst];
      if (const std::uint32_t* d = dist.find(id_base[c.t] + c.column)) measured[k] = *d;
    }
  }
  return measured;
}

}  // namespace detail

inline distance_audit verify_distance_bounds(int M, int d, int maxdepth, int margin) {
  adic_params params{M, d, std::max(maxdepth, 1)};
  params.validate();
  require(maxdepth >= 1, errc::bad_parameters, "maxdepth must be at least 1");
  require(margin >= 0, errc::bad_parameters, "margin must be nonnegative");

  auto lefts = detail::corner_list(params, maxdepth, lr_side::left);
  auto rights = detail::corner_list(params, maxdepth, lr_side::right);
  int L = int(lefts.size());
  require(std::uint64_t(L) + rights.size() <= (std::uint64_t(1) << 12), errc::size_overflow,
          "corner enumeration too large; lower maxdepth");
  std::vector<detail::group_corner> corners = lefts;
  corners.insert(corners.end(), rights.begin(), rights.end());

  // Left-right pairs need no word condition; the lone coincident pair (both
  // depth-0 corners are the root) is counted but carries no slack
  // information about distinct vertices.  Each pair's BFS runs from its
  // shallower corner, where the required radius is smallest.
  std::vector<detail::corner_pair> pairs;
  std::uint64_t coincident = 0;
  for (int a = 0; a < L; ++a)
    for (int b = 0; b < int(rights.size()); ++b) {
      if (lefts[a].t == 0 && rights[b].t == 0) {
        ++coincident;
        continue;
      }
      int tsum = lefts[a].t + rights[b].t;
      if (lefts[a].t <= rights[b].t)
        pairs.push_back({a, L + b, tsum});
      else
        pairs.push_back({L + b, a, tsum});
    }
  for (int side = 0; side < 2; ++side) {
    const auto& cs = side ? rights : lefts;
    int off = side ? L : 0;
    for (int a = 0; a < int(cs.size()); ++a)
      for (int b = a + 1; b < int(cs.size()); ++b)
        if (detail::words_separated(cs[a], cs[b]))
          pairs.push_back({off + a, off + b, cs[a].t + cs[b].t});
  }

  auto at_margin = detail::measure_pairs(params, maxdepth + margin, corners, pairs);
  auto deeper = detail::measure_pairs(params, maxdepth + margin + 2, corners, pairs);

  distance_audit rep;
  rep.pairs_checked = pairs.size() + coincident;
  rep.stable = at_margin == deeper;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    if (at_margin[k] == detail::far_away) {
      ++rep.unresolved;
      continue;
    }
    double slack = double(at_margin[k]) - double(pairs[k].tsum) / 2;
    if (slack < 0) ++rep.violations;
    rep.min_slack = std::min(rep.min_slack, slack);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Least squares and connectivity-decay fits.
// ---------------------------------------------------------------------------

struct line_fit_result {
  double slope = 0;
  double intercept = 0;
  double r2 = 1;  // 1 when the residuals vanish, in particular for constant y
};

inline line_fit_result line_fit(std::span<const std::pair<double, double>> pts) {
  require(pts.size() >= 2, errc::bad_parameters, "need at least two points");
  double n = double(pts.size()), sx = 0, sy = 0;
  for (auto& [x, y] : pts) {
    sx += x;
    sy += y;
  }
  double mx = sx / n, my = sy / n, sxx = 0, sxy = 0;
  for (auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  require(sxx > 0, errc::bad_parameters, "points share one x; no line is determined");
  line_fit_result f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0, sst = 0;
  for (auto& [x, y] : pts) {
    double e = y - (f.intercept + f.slope * x);
    ssr += e * e;
    sst += (y - my) * (y - my);
  }
  f.r2 = sst > 0 ? std::clamp(1 - ssr / sst, 0.0, 1.0) : 1.0;
  return f;
}

struct decay_point {
  double distance = 0;  // graph distance between the endpoints
  double neglogp = 0;   // -log of the estimated connection probability
  std::uint64_t hits = 0;
  std::uint64_t trials = 0;
};

struct decay_fit {
  double slope = 0;
  double intercept = 0;
  double r2 = 1;
  std::vector<decay_point> points;  // pairs with a nonzero estimate, input order
  std::uint64_t censored = 0;       // pairs dropped for a zero estimate
};

// Fits -log of the two-point open-connection estimate at level q against
// graph distance.  Zero estimates have no finite -log; those pairs are
// censored rather than clamped, and the count is reported.  The fit needs
// two surviving pairs at distinct distances.
inline decay_fit fit_decay(const embedded_graph& g, double q,
                           std::span<const std::pair<int, int>> pairs, std::uint64_t trials,
                           std::uint64_t seed, unsigned threads = 1) {
  require(q > 0 && q <= 1, errc::bad_probability, "q must lie in (0, 1]");
  require(!pairs.empty(), errc::bad_parameters, "no pairs to estimate");
  require(trials >= 1 && trials <= std::uint64_t(std::numeric_limits<std::int64_t>::max()),
          errc::bad_parameters, "trials out of range");

  std::vector<int> region(g.vertex_count());
  std::iota(region.begin(), region.end(), 0);
  decay_fit fit;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    auto [u, v] = pairs[k];
    g.check_vertex(v);
    std::vector<int> dist = graph_distances(g, u);
    require(dist[v] >= 0, errc::bad_parameters,
            "pair " + std::to_string(u) + "-" + std::to_string(v) + " spans two components");
    connectivity_estimate est = connectivity_probability(
        g, u, {v}, q, region, std::int64_t(trials), mix64(seed + (k + 1) * kGolden), threads);
    if (est.value <= 0) {
      ++fit.censored;
      continue;
    }
    decay_point pt{double(dist[v]), -std::log(est.value),
                   std::uint64_t(std::llround(est.value * double(trials))), trials};
    fit.points.push_back(pt);
    pts.push_back({pt.distance, pt.neglogp});
  }
  require(!fit.points.empty(), errc::all_censored,
          "every pair came back disconnected at this level");
  line_fit_result lf = line_fit(pts);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.r2 = lf.r2;
  return fit;
}

// ---------------------------------------------------------------------------
// Structural audit of a doubled, labeled truncation.  Measures the shape
// facts the construction advertises: every finite face is a triangle, no
// vertex sees more than two neighbors one level up, interior (non-frontier)
// vertices keep a healthy degree, and swapping the two copies is an
// adjacency- and frontier-preserving involution.
// ---------------------------------------------------------------------------

struct structure_report {
  std::int64_t vertices = 0;
  std::int64_t edges = 0;
  std::int64_t finite_faces = 0;
  std::int64_t nontriangle_faces = 0;  // finite faces with more than three sides
  int max_up_neighbors = 0;            // over vertices below the root level
  int min_interior_degree = 0;         // over non-frontier vertices
  bool copy_swap = false;              // copy swap is an automorphism
  bool ok = false;                     // all four checks in one flag
};

inline structure_report structure_audit(const embedded_graph& g) {
  require(g.has_labels(), errc::label_mismatch, "structure audit needs construction labels");
  int n = g.vertex_count();
  structure_report rep;
  rep.vertices = n;
  rep.edges = g.edge_count();

  for (const embedded_graph::face& f : g.faces()) {
    if (!f.finite) continue;
    ++rep.finite_faces;
    if (f.walk.size() != 3) ++rep.nontriangle_faces;
  }

  rep.copy_swap = true;
  bool any_interior = false;
  rep.min_interior_degree = std::numeric_limits<int>::max();
  std::vector<int> partner(std::size_t(n), -1);
  for (int v = 0; v < n; ++v) {
    const vertex_label& l = g.label(v);
    require(l.present(), errc::label_mismatch,
            "vertex " + std::to_string(v) + " carries no label");
    if (l.depth >= 1) {
      int up = 0;
      for (int w : g.neighbors(v))
        if (g.label(w).depth == l.depth - 1) ++up;
      rep.max_up_neighbors = std::max(rep.max_up_neighbors, up);
    }
    if (!g.is_frontier(v)) {
      any_interior = true;
      rep.min_interior_degree = std::min(rep.min_interior_degree, g.degree(v));
    }
    partner[std::size_t(v)] = g.find_label(l.copy == 1 ? 2 : 1, l.depth, l.index);
    if (partner[std::size_t(v)] < 0) rep.copy_swap = false;
  }
  if (!any_interior) rep.min_interior_degree = 0;

  for (int v = 0; v < n && rep.copy_swap; ++v) {
    int u = partner[std::size_t(v)];
    if (partner[std::size_t(u)] != v || g.is_frontier(u) != g.is_frontier(v)) {
      rep.copy_swap = false;
      break;
    }
    std::vector<int> mapped;
    for (int w : g.neighbors(v)) mapped.push_back(partner[std::size_t(w)]);
    auto nb = g.neighbors(u);
    std::vector<int> want(nb.begin(), nb.end());
    std::sort(mapped.begin(), mapped.end());
    std::sort(want.begin(), want.end());
    if (mapped != want) rep.copy_swap = false;
  }

  rep.ok = rep.nontriangle_faces == 0 && rep.max_up_neighbors <= 2 &&
           (!any_interior || rep.min_interior_degree >= 8) && rep.copy_swap;
  return rep;
}

// The staged audit for the doubled construction.  The final fan pass fans
// every seam-straddling face from its uppermost vertex, which always lies in
// the first copy, so the finished graph is never swap symmetric; the mirror
// symmetry belongs to the glued stage, and that is where it gets checked.
// Faces, up-neighbor counts and interior degrees are read off the finished
// graph.
inline structure_report structure_audit(const adic_params& params) {
  embedded_graph glued = double_and_glue(fan_triangulate(strip_graph(params)), params);
  structure_report rep = structure_audit(fan_triangulate(glued));
  rep.copy_swap = structure_audit(glued).copy_swap;
  rep.ok = rep.nontriangle_faces == 0 && rep.max_up_neighbors <= 2 &&
           rep.min_interior_degree >= 8 && rep.copy_swap;
  return rep;
}

// ---------------------------------------------------------------------------
// Config-driven experiment runner.  A config names one experiment kind and
// its parameters; the runner produces an artifact whose '#' header lines
// record version, kind, parameters and seed, followed by one data row per
// result in the chosen format.  Everything downstream of the seed is
// deterministic and independent of the worker count.
// ---------------------------------------------------------------------------

struct experiment_config {
  std::string kind;             // sweep | decay | distances | structure
  std::string family = "tree";  // sweep: tree | counterexample
  int M = 2;
  int d = 3;
  int branching = 0;       // tree arity for sweeps; 0 means M^d
  int depth = 0;           // corridor truncation for decay runs
  std::vector<int> depths;  // truncation ladder for sweeps
  std::vector<double> grid;  // p grid for sweeps
  double q = 0;              // openness level for decay runs
  bool doubled = true;       // decay corridor: both glued copies, or one
  std::vector<int> word;     // corridor digits; empty means all zeros
  int maxdepth = 0;          // distance audit window
  int margin = 4;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out;             // output path; empty keeps the artifact in memory
  std::string format = "csv";  // csv | jsonl
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

template <typename T>
T parse_config_num(const std::string& val, const std::string& where) {
  T x{};
  auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), x);
  require(ec == std::errc() && p == val.data() + val.size(), errc::config_parse,
          where + ": cannot parse '" + val + "'");
  return x;
}

inline std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    std::size_t end = s.find(sep, start);
    if (end == std::string::npos) end = s.size();
    out.push_back(trim(s.substr(start, end - start)));
    start = end + 1;
  }
  return out;
}

// Either a comma list of values or lo:hi:step, endpoints included.
inline std::vector<double> parse_config_grid(const std::string& val, const std::string& where) {
  std::vector<double> grid;
  if (val.find(':') != std::string::npos) {
    auto parts = split_list(val, ':');
    require(parts.size() == 3, errc::config_parse, where + ": grid ranges are lo:hi:step");
    double lo = parse_config_num<double>(parts[0], where);
    double hi = parse_config_num<double>(parts[1], where);
    double step = parse_config_num<double>(parts[2], where);
    require(step > 0 && hi >= lo, errc::config_parse, where + ": need lo <= hi and step > 0");
    int count = int((hi - lo) / step + 1e-9) + 1;
    for (int i = 0; i < count; ++i) grid.push_back(lo + i * step);
  } else {
    for (const std::string& tok : split_list(val, ','))
      grid.push_back(parse_config_num<double>(tok, where));
  }
  return grid;
}

inline bool parse_config_bool(const std::string& val, const std::string& where) {
  if (val == "1" || val == "true") return true;
  if (val == "0" || val == "false") return false;
  fail(errc::config_parse, where + ": expected a boolean, got '" + val + "'");
}

// Shortest round-trip decimal form; valid JSON for finite values.
inline std::string num(double x) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

inline std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

inline bool is_number_token(const std::string& s) {
  if (s.empty()) return false;
  double x = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  return ec == std::errc() && p == s.data() + s.size();
}

// Header lines, then the rows.  Cells render verbatim in csv; in jsonl a
// cell that reads as a number stays raw and anything else is quoted, so
// numeric columns come out as JSON numbers.
inline std::string render_artifact(
    const std::vector<std::pair<std::string, std::string>>& head,
    const std::vector<std::string>& cols,
    const std::vector<std::vector<std::string>>& rows, const std::string& format) {
  require(format == "csv" || format == "jsonl", errc::config_parse,
          "unknown format '" + format + "'");
  std::string text;
  for (auto& [k, v] : head) text += "# " + k + " " + v + "\n";
  if (format == "csv") {
    text += join(cols, ',') + "\n";
    for (const auto& row : rows) text += join(row, ',') + "\n";
  } else {
    for (const auto& row : rows) {
      text += "{";
      for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) text += ",";
        text += "\"" + cols[i] + "\":";
        text += is_number_token(row[i]) ? row[i] : "\"" + row[i] + "\"";
      }
      text += "}\n";
    }
  }
  return text;
}

inline void write_artifact(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  require(f.good(), errc::config_parse, "cannot open output file '" + path + "'");
  f << text;
  require(f.good(), errc::config_parse, "cannot write output file '" + path + "'");
}

}  // namespace detail

inline experiment_config parse_experiment_config(std::istream& in) {
  experiment_config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string where = "line " + std::to_string(lineno);
    std::string s = detail::trim(line.substr(0, line.find('#')));
    if (s.empty()) continue;
    std::size_t eq = s.find('=');
    require(eq != std::string::npos, errc::config_parse, where + ": expected key=value");
    std::string key = detail::trim(s.substr(0, eq));
    std::string val = detail::trim(s.substr(eq + 1));
    require(!key.empty() && !val.empty(), errc::config_parse,
            where + ": empty key or value");

    if (key == "kind") {
      cfg.kind = val;
    } else if (key == "family") {
      cfg.family = val;
    } else if (key == "M") {
      cfg.M = detail::parse_config_num<int>(val, where);
    } else if (key == "d") {
      cfg.d = detail::parse_config_num<int>(val, where);
    } else if (key == "branching") {
      cfg.branching = detail::parse_config_num<int>(val, where);
    } else if (key == "depth") {
      cfg.depth = detail::parse_config_num<int>(val, where);
    } else if (key == "depths") {
      cfg.depths.clear();
      for (const std::string& tok : detail::split_list(val, ','))
        cfg.depths.push_back(detail::parse_config_num<int>(tok, where));
    } else if (key == "grid") {
      cfg.grid = detail::parse_config_grid(val, where);
    } else if (key == "q") {
      cfg.q = detail::parse_config_num<double>(val, where);
    } else if (key == "doubled") {
      cfg.doubled = detail::parse_config_bool(val, where);
    } else if (key == "word") {
      cfg.word.clear();
      for (char c : val) {
        require(c >= '0' && c <= '9', errc::config_parse,
                where + ": word digits must be 0-9");
        cfg.word.push_back(c - '0');
      }
    } else if (key == "maxdepth") {
      cfg.maxdepth = detail::parse_config_num<int>(val, where);
    } else if (key == "margin") {
      cfg.margin = detail::parse_config_num<int>(val, where);
    } else if (key == "trials") {
      cfg.trials = detail::parse_config_num<std::uint64_t>(val, where);
    } else if (key == "seed") {
      cfg.seed = detail::parse_config_num<std::uint64_t>(val, where);
    } else if (key == "threads") {
      cfg.threads = detail::parse_config_num<unsigned>(val, where);
      require(cfg.threads >= 1, errc::config_parse, where + ": threads must be positive");
    } else if (key == "out") {
      cfg.out = val;
    } else if (key == "format") {
      cfg.format = val;
    } else {
      fail(errc::config_parse, where + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

inline experiment_config parse_experiment_config(const std::string& text) {
  std::istringstream in(text);
  return parse_experiment_config(in);
}

struct experiment_result {
  std::string text;            // the artifact: header lines, then data rows
  pc_report sweep;             // filled by sweep runs
  decay_fit decay;             // filled by decay runs
  distance_audit audit;        // filled by distances runs
  structure_report structure;  // filled by structure runs
};

inline experiment_result run_experiment(const experiment_config& cfg) {
  require(cfg.format == "csv" || cfg.format == "jsonl", errc::config_parse,
          "unknown format '" + cfg.format + "'");
  require(cfg.threads >= 1, errc::config_parse, "threads must be positive");

  experiment_result res;
  std::vector<std::pair<std::string, std::string>> head{{"perc", version_string},
                                                        {"kind", cfg.kind}};
  std::vector<std::string> cols;
  std::vector<std::vector<std::string>> rows;

  if (cfg.kind == "sweep") {
    require(!cfg.grid.empty(), errc::config_parse, "sweep needs a p grid");
    require(cfg.depths.size() >= 2, errc::config_parse, "sweep needs at least two depths");
    for (std::size_t i = 0; i + 1 < cfg.depths.size(); ++i)
      require(cfg.depths[i] < cfg.depths[i + 1], errc::config_parse,
              "depths must increase");
    require(cfg.trials >= 1 &&
                cfg.trials <= std::uint64_t(std::numeric_limits<std::int64_t>::max()),
            errc::config_parse, "trials out of range");

    if (cfg.family == "tree") {
      std::uint64_t arity = cfg.branching > 0 ? std::uint64_t(cfg.branching)
                                              : adic_params{cfg.M, cfg.d, 1}.B();
      require(arity >= 2 && arity <= 1024, errc::config_parse, "branching out of range");
      res.sweep = estimate_pc_tree(int(arity), cfg.depths, cfg.grid,
                                   std::int64_t(cfg.trials), cfg.seed, cfg.threads);
      head.push_back({"family", "tree"});
      head.push_back({"branching", std::to_string(arity)});
    } else if (cfg.family == "counterexample") {
      adic_params base{cfg.M, cfg.d, 1};
      base.validate();
      auto fam = [&](int N) { return counterexample_graph({cfg.M, cfg.d, N}); };
      res.sweep = estimate_pc(fam, cfg.depths, cfg.grid, std::int64_t(cfg.trials), cfg.seed,
                              cfg.threads);
      head.push_back({"family", "counterexample"});
      head.push_back({"M", std::to_string(cfg.M)});
      head.push_back({"d", std::to_string(cfg.d)});
    } else {
      fail(errc::config_parse, "unknown sweep family '" + cfg.family + "'");
    }
    std::vector<std::string> ds;
    for (int dd : cfg.depths) ds.push_back(std::to_string(dd));
    head.push_back({"depths", detail::join(ds, ',')});
    head.push_back({"trials", std::to_string(cfg.trials)});
    head.push_back({"seed", std::to_string(cfg.seed)});
    head.push_back({"estimate", detail::num(res.sweep.estimate)});

    cols = {"depth", "p", "trials", "survival", "stderr"};
    for (const survival_point& pt : res.sweep.table)
      rows.push_back({std::to_string(pt.depth), detail::num(pt.p), std::to_string(pt.trials),
                      detail::num(pt.survival), detail::num(pt.se)});
  } else if (cfg.kind == "decay") {
    require(cfg.q > 0 && cfg.q <= 1, errc::config_parse, "decay needs q in (0, 1]");
    require(cfg.depth >= 1, errc::config_parse, "decay needs depth >= 1");
    adic_params params{cfg.M, cfg.d, cfg.depth};
    params.validate();
    std::vector<int> word = cfg.word.empty() ? std::vector<int>(cfg.depth, 0) : cfg.word;
    require(int(word.size()) == cfg.depth, errc::config_parse,
            "word length must equal depth");
    embedded_graph g = corridor_graph(params, word, cfg.doubled);

    // One pair per level: the left against the right corner of that level's
    // group, the pair the audited separation bound speaks about.
    std::vector<std::pair<int, int>> prs;
    for (int n = 1; n <= cfg.depth; ++n) {
      auto [tl, il] = lr_boundary(params, word, n, lr_side::left);
      auto [tr, ir] = lr_boundary(params, word, n, lr_side::right);
      int u = g.find_label(1, tl, il), v = g.find_label(1, tr, ir);
      require(u >= 0 && v >= 0, errc::label_mismatch, "corridor corner label missing");
      prs.push_back({u, v});
    }
    res.decay = fit_decay(g, cfg.q, prs, cfg.trials, cfg.seed, cfg.threads);

    std::string wtxt;
    for (int dg : word) wtxt += char('0' + dg);
    head.push_back({"family", "corridor"});
    head.push_back({"M", std::to_string(cfg.M)});
    head.push_back({"d", std::to_string(cfg.d)});
    head.push_back({"depth", std::to_string(cfg.depth)});
    head.push_back({"word", wtxt});
    head.push_back({"doubled", cfg.doubled ? "1" : "0"});
    head.push_back({"q", detail::num(cfg.q)});
    head.push_back({"trials", std::to_string(cfg.trials)});
    head.push_back({"seed", std::to_string(cfg.seed)});
    head.push_back({"slope", detail::num(res.decay.slope)});
    head.push_back({"intercept", detail::num(res.decay.intercept)});
    head.push_back({"r2", detail::num(res.decay.r2)});
    head.push_back({"censored", std::to_string(res.decay.censored)});

    cols = {"distance", "neglogp", "hits", "trials"};
    for (const decay_point& pt : res.decay.points)
      rows.push_back({detail::num(pt.distance), detail::num(pt.neglogp),
                      std::to_string(pt.hits), std::to_string(pt.trials)});
  } else if (cfg.kind == "distances") {
    require(cfg.maxdepth >= 1, errc::config_parse, "distance audit needs maxdepth >= 1");
    require(cfg.margin >= 0, errc::config_parse, "margin must be nonnegative");
    res.audit = verify_distance_bounds(cfg.M, cfg.d, cfg.maxdepth, cfg.margin);

    head.push_back({"M", std::to_string(cfg.M)});
    head.push_back({"d", std::to_string(cfg.d)});
    head.push_back({"maxdepth", std::to_string(cfg.maxdepth)});
    head.push_back({"margin", std::to_string(cfg.margin)});
    head.push_back({"seed", std::to_string(cfg.seed)});

    cols = {"pairs", "violations", "unresolved", "min_slack", "stable"};
    rows.push_back({std::to_string(res.audit.pairs_checked),
                    std::to_string(res.audit.violations),
                    std::to_string(res.audit.unresolved), detail::num(res.audit.min_slack),
                    res.audit.stable ? "1" : "0"});
  } else if (cfg.kind == "structure") {
    require(cfg.depth >= 1, errc::config_parse, "structure audit needs depth >= 1");
    adic_params params{cfg.M, cfg.d, cfg.depth};
    params.validate();
    res.structure = structure_audit(params);

    head.push_back({"M", std::to_string(cfg.M)});
    head.push_back({"d", std::to_string(cfg.d)});
    head.push_back({"depth", std::to_string(cfg.depth)});
    head.push_back({"seed", std::to_string(cfg.seed)});

    cols = {"vertices", "edges", "finite_faces", "nontriangle_faces",
            "max_up",   "min_interior_degree", "copy_swap", "ok"};
    rows.push_back({std::to_string(res.structure.vertices),
                    std::to_string(res.structure.edges),
                    std::to_string(res.structure.finite_faces),
                    std::to_string(res.structure.nontriangle_faces),
                    std::to_string(res.structure.max_up_neighbors),
                    std::to_string(res.structure.min_interior_degree),
                    res.structure.copy_swap ? "1" : "0", res.structure.ok ? "1" : "0"});
  } else {
    fail(errc::config_parse, "unknown experiment kind '" + cfg.kind + "'");
  }

  res.text = detail::render_artifact(head, cols, rows, cfg.format);
  if (!cfg.out.empty()) detail::write_artifact(cfg.out, res.text);
  return res;
}

}  // namespace perc
