#pragma once

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "perc/embedded_graph.hpp"
#include "perc/errors.hpp"

namespace perc {

// Plain-text graph format, one record per line:
//
//   pg 1
//   # comment
//   v <id> [copy=<c> depth=<d> index=<i>] [x=<x> y=<y>]
//   r <id> <neighbor> <neighbor> ...     counterclockwise
//   f <id>                               frontier vertex
//
// Vertex ids must appear in order 0,1,2,...; every vertex gets exactly one
// v line and one r line (possibly empty).  Either every vertex has x/y or
// none does, and copy/depth/index travel together.  The emitter writes a
// canonical form (shortest round-trippable doubles), so parse(emit(g))
// reproduces g exactly.

inline void emit_graph(const embedded_graph& g, std::ostream& os) {
  os << "pg 1\n";
  char buf[64];
  for (int v = 0; v < g.vertex_count(); ++v) {
    os << "v " << v;
    if (g.label(v).present()) {
      os << " copy=" << g.label(v).copy << " depth=" << g.label(v).depth
         << " index=" << g.label(v).index;
    }
    if (g.has_coords()) {
      std::snprintf(buf, sizeof buf, "%.17g", g.coord(v).x);
      os << " x=" << buf;
      std::snprintf(buf, sizeof buf, "%.17g", g.coord(v).y);
      os << " y=" << buf;
    }
    os << '\n';
  }
  for (int v = 0; v < g.vertex_count(); ++v) {
    os << "r " << v;
    for (int w : g.neighbors(v)) os << ' ' << w;
    os << '\n';
  }
  for (int v : g.frontier()) os << "f " << v << '\n';
}

inline std::string emit_graph(const embedded_graph& g) {
  std::ostringstream os;
  emit_graph(g, os);
  return os.str();
}

namespace detail {

inline long long parse_int(const std::string& tok, int line) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(tok, &used);
  } catch (const std::exception&) {
    fail(errc::graph_parse, "line " + std::to_string(line) + ": bad integer '" + tok + "'");
  }
  require(used == tok.size(), errc::graph_parse,
          "line " + std::to_string(line) + ": bad integer '" + tok + "'");
  return v;
}

inline double parse_double(const std::string& tok, int line) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    fail(errc::graph_parse, "line " + std::to_string(line) + ": bad number '" + tok + "'");
  }
  require(used == tok.size(), errc::graph_parse,
          "line " + std::to_string(line) + ": bad number '" + tok + "'");
  return v;
}

}  // namespace detail

inline embedded_graph parse_graph(std::istream& is) {
  std::string line;
  int lineno = 0;
  bool saw_header = false;

  struct vrec {
    vertex_label label;
    std::optional<point> coord;
  };
  std::vector<vrec> verts;
  std::vector<std::optional<std::vector<int>>> rots;
  std::vector<int> frontier;

  while (std::getline(is, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (!saw_header) {
      int ver = 0;
      require(tag == "pg" && (ls >> ver) && ver == 1, errc::graph_parse,
              "line " + std::to_string(lineno) + ": expected header 'pg 1'");
      std::string extra;
      require(!(ls >> extra), errc::graph_parse,
              "line " + std::to_string(lineno) + ": trailing tokens after header");
      saw_header = true;
      continue;
    }
    if (tag == "v") {
      std::string tok;
      require(bool(ls >> tok), errc::graph_parse,
              "line " + std::to_string(lineno) + ": v needs an id");
      long long id = detail::parse_int(tok, lineno);
      require(id == (long long)verts.size(), errc::graph_parse,
              "line " + std::to_string(lineno) + ": vertex ids must be consecutive from 0");
      vrec rec;
      bool have_x = false, have_y = false;
      double x = 0, y = 0;
      while (ls >> tok) {
        auto eq = tok.find('=');
        require(eq != std::string::npos, errc::graph_parse,
                "line " + std::to_string(lineno) + ": expected key=value, got '" + tok + "'");
        std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "copy")
          rec.label.copy = int(detail::parse_int(val, lineno));
        else if (key == "depth")
          rec.label.depth = int(detail::parse_int(val, lineno));
        else if (key == "index")
          rec.label.index = std::uint64_t(detail::parse_int(val, lineno));
        else if (key == "x")
          x = detail::parse_double(val, lineno), have_x = true;
        else if (key == "y")
          y = detail::parse_double(val, lineno), have_y = true;
        else
          fail(errc::graph_parse, "line " + std::to_string(lineno) + ": unknown key '" + key + "'");
      }
      require(have_x == have_y, errc::graph_parse,
              "line " + std::to_string(lineno) + ": x and y must appear together");
      bool label_partial = (rec.label.copy != 0 || rec.label.depth >= 0 || rec.label.index != 0);
      require(!label_partial || rec.label.present(), errc::graph_parse,
              "line " + std::to_string(lineno) + ": copy/depth/index must appear together");
      if (have_x) rec.coord = point{x, y};
      verts.push_back(rec);
      rots.emplace_back();
    } else if (tag == "r") {
      std::string tok;
      require(bool(ls >> tok), errc::graph_parse,
              "line " + std::to_string(lineno) + ": r needs an id");
      long long id = detail::parse_int(tok, lineno);
      require(id >= 0 && id < (long long)verts.size(), errc::graph_parse,
              "line " + std::to_string(lineno) + ": r before matching v line");
      require(!rots[id], errc::graph_parse,
              "line " + std::to_string(lineno) + ": duplicate r line for " + std::to_string(id));
      std::vector<int> rot;
      while (ls >> tok) rot.push_back(int(detail::parse_int(tok, lineno)));
      rots[id] = std::move(rot);
    } else if (tag == "f") {
      std::string tok;
      require(bool(ls >> tok), errc::graph_parse,
              "line " + std::to_string(lineno) + ": f needs an id");
      frontier.push_back(int(detail::parse_int(tok, lineno)));
      require(!(ls >> tok), errc::graph_parse,
              "line " + std::to_string(lineno) + ": one id per f line");
    } else {
      fail(errc::graph_parse, "line " + std::to_string(lineno) + ": unknown record '" + tag + "'");
    }
  }
  require(saw_header, errc::graph_parse, "missing 'pg 1' header");

  graph_builder b;
  for (auto& rec : verts) b.add_vertex(rec.label, rec.coord);
  for (int v = 0; v < int(verts.size()); ++v) {
    require(bool(rots[v]), errc::graph_parse, "missing r line for vertex " + std::to_string(v));
    b.set_rotation(v, std::move(*rots[v]));
  }
  for (int v : frontier) {
    require(v >= 0 && v < int(verts.size()), errc::graph_parse,
            "f line references unknown vertex " + std::to_string(v));
    b.mark_frontier(v);
  }
  return b.build();
}

inline embedded_graph parse_graph(const std::string& text) {
  std::istringstream is(text);
  return parse_graph(is);
}

}  // namespace perc
