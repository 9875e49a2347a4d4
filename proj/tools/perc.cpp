// perc: command-line front end for the percolation laboratory.
//
// Two groups of subcommands.  sweep, decay, distances and audit-structure
// forward to the experiment runner and accept the same key=value config
// files, with explicit flags overriding file values.  gen, sample, phi,
// arms and cone-law work on a single graph and emit artifacts of the same
// header-plus-rows shape.  Exit codes: 0 success, 2 config or input parse
// failure, 3 size overflow, 4 violated precondition.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "perc/boundary.hpp"
#include "perc/experiment.hpp"
#include "perc/generators.hpp"
#include "perc/graph_io.hpp"
#include "perc/percolation.hpp"
#include "perc/phi.hpp"

namespace {

using perc::embedded_graph;
using perc::errc;
using perc::experiment_config;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  perc::require(in.good(), errc::config_parse, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

embedded_graph load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  perc::require(in.good(), errc::graph_parse,
                "cannot open graph file '" + path + "'");
  return perc::parse_graph(in);
}

// One vertex id per line, '#' comments, blank lines ignored.
std::vector<int> load_ids(const std::string& path) {
  std::istringstream in(slurp(path));
  std::vector<int> ids;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string tok = perc::detail::trim(line.substr(0, line.find('#')));
    if (tok.empty()) continue;
    ids.push_back(perc::detail::parse_config_num<int>(
        tok, path + ":" + std::to_string(lineno)));
  }
  perc::require(!ids.empty(), errc::config_parse, "no ids in '" + path + "'");
  return ids;
}

std::vector<int> parse_word(const std::string& text) {
  std::vector<int> word;
  for (char c : text) {
    perc::require(c >= '0' && c <= '9', errc::config_parse,
                  "word digits must be 0-9");
    word.push_back(c - '0');
  }
  return word;
}

void deliver(const std::string& text, const std::string& out) {
  if (out.empty())
    std::cout << text;
  else
    perc::detail::write_artifact(out, text);
}

std::int64_t checked_trials(std::uint64_t trials) {
  perc::require(trials >= 1 && trials <= std::uint64_t(std::numeric_limits<std::int64_t>::max()),
                errc::config_parse, "trials out of range");
  return std::int64_t(trials);
}

// The global flags live on the parent app so they read the same in front of
// or after the subcommand name.  Option handles record whether a flag was
// given explicitly, which is what lets flags override config-file values.
struct global_flags {
  std::uint64_t seed = 1;
  std::uint64_t trials = 1000;
  std::string out;
  std::string format = "csv";
  unsigned threads = 1;
  CLI::Option *o_seed = nullptr, *o_trials = nullptr, *o_out = nullptr,
              *o_format = nullptr, *o_threads = nullptr;
};

struct runner_flags {
  std::string config_path, family, depths, grid, word;
  int M = 2, d = 3, branching = 0, depth = 0, maxdepth = 0, margin = 4;
  double q = 0;
  bool doubled = true;
  CLI::Option *o_config = nullptr, *o_family = nullptr, *o_M = nullptr,
              *o_d = nullptr, *o_branching = nullptr, *o_depth = nullptr,
              *o_depths = nullptr, *o_grid = nullptr, *o_q = nullptr,
              *o_word = nullptr, *o_doubled = nullptr, *o_maxdepth = nullptr,
              *o_margin = nullptr;
};

// Every runner subcommand takes the full flag set; the runner itself checks
// the fields its kind needs, mirroring how config files share one key set.
void attach_runner_flags(CLI::App* sub, runner_flags& rf) {
  rf.o_config = sub->add_option("--config", rf.config_path, "key=value settings file");
  rf.o_family = sub->add_option("--family", rf.family, "graph family");
  rf.o_M = sub->add_option("--M", rf.M, "base of the block construction");
  rf.o_d = sub->add_option("--d", rf.d, "dimension parameter");
  rf.o_branching = sub->add_option("--branching", rf.branching, "tree arity");
  rf.o_depth = sub->add_option("--depth", rf.depth, "truncation depth");
  rf.o_depths = sub->add_option("--depths", rf.depths, "comma-separated depth ladder");
  rf.o_grid = sub->add_option("--grid", rf.grid, "p grid, list or lo:hi:step");
  rf.o_q = sub->add_option("--q", rf.q, "openness level for decay fits");
  rf.o_word = sub->add_option("--word", rf.word, "corridor address digits");
  rf.o_doubled = sub->add_option("--doubled", rf.doubled, "use the doubled corridor");
  rf.o_maxdepth = sub->add_option("--maxdepth", rf.maxdepth, "corner depth bound");
  rf.o_margin = sub->add_option("--margin", rf.margin, "extra truncation levels");
}

experiment_config resolve_config(const runner_flags& rf, const global_flags& gf,
                                 const std::string& kind) {
  experiment_config cfg;
  if (rf.o_config->count())
    cfg = perc::parse_experiment_config(slurp(rf.config_path));
  perc::require(cfg.kind.empty() || cfg.kind == kind, errc::config_parse,
                "config kind '" + cfg.kind + "' does not match subcommand '" +
                    kind + "'");
  cfg.kind = kind;
  if (rf.o_family->count()) cfg.family = rf.family;
  if (rf.o_M->count()) cfg.M = rf.M;
  if (rf.o_d->count()) cfg.d = rf.d;
  if (rf.o_branching->count()) cfg.branching = rf.branching;
  if (rf.o_depth->count()) cfg.depth = rf.depth;
  if (rf.o_depths->count()) {
    cfg.depths.clear();
    for (const std::string& tok : perc::detail::split_list(rf.depths, ','))
      cfg.depths.push_back(perc::detail::parse_config_num<int>(tok, "--depths"));
  }
  if (rf.o_grid->count()) cfg.grid = perc::detail::parse_config_grid(rf.grid, "--grid");
  if (rf.o_q->count()) cfg.q = rf.q;
  if (rf.o_word->count()) cfg.word = parse_word(rf.word);
  if (rf.o_doubled->count()) cfg.doubled = rf.doubled;
  if (rf.o_maxdepth->count()) cfg.maxdepth = rf.maxdepth;
  if (rf.o_margin->count()) cfg.margin = rf.margin;
  if (gf.o_seed->count()) cfg.seed = gf.seed;
  if (gf.o_trials->count()) cfg.trials = gf.trials;
  if (gf.o_out->count()) cfg.out = gf.out;
  if (gf.o_format->count()) cfg.format = gf.format;
  if (gf.o_threads->count()) cfg.threads = gf.threads;
  return cfg;
}

void run_runner(const runner_flags& rf, const global_flags& gf,
                const std::string& kind) {
  experiment_config cfg = resolve_config(rf, gf, kind);
  perc::experiment_result res = perc::run_experiment(cfg);
  if (cfg.out.empty()) std::cout << res.text;
}

struct gen_flags {
  std::string family, word;
  int M = 2, d = 3, N = 3, branching = 8, depth = 3, side = 8;
  bool doubled = true;
};

void run_gen(const gen_flags& gn, const global_flags& gf) {
  embedded_graph g = [&]() -> embedded_graph {
    if (gn.family == "tree") return perc::bary_tree(gn.branching, gn.depth);
    if (gn.family == "cone") return perc::cone_tree(gn.depth);
    if (gn.family == "triangular") return perc::triangular_lattice(gn.side).graph;
    if (gn.family == "strip") return perc::strip_graph({gn.M, gn.d, gn.N});
    if (gn.family == "triangulated")
      return perc::fan_triangulate(perc::strip_graph({gn.M, gn.d, gn.N}));
    if (gn.family == "counterexample")
      return perc::counterexample_graph({gn.M, gn.d, gn.N});
    std::vector<int> word =
        gn.word.empty() ? std::vector<int>(gn.N, 0) : parse_word(gn.word);
    return perc::corridor_graph({gn.M, gn.d, gn.N}, word, gn.doubled);
  }();
  deliver(perc::emit_graph(g), gf.out);
}

struct sample_flags {
  std::string graph;
  double p = 0.5;
};

void run_sample(const sample_flags& sf, const global_flags& gf) {
  embedded_graph g = load_graph(sf.graph);
  std::uint64_t trials = std::uint64_t(checked_trials(gf.trials));
  std::vector<std::vector<std::string>> rows(trials);
  perc::for_each_trial(trials, gf.threads, [&](std::uint64_t t) {
    perc::configuration c = perc::configuration_at(
        perc::sample_uniforms(g, perc::trial_seed(gf.seed, t)), sf.p);
    perc::cluster_partition part = perc::clusters(g, c, perc::vertex_state::open);
    std::int64_t largest = 0;
    for (std::int64_t s : part.sizes) largest = std::max(largest, s);
    rows[t] = {std::to_string(t), std::to_string(c.open_count()),
               std::to_string(part.count()), std::to_string(part.frontier_count()),
               std::to_string(largest)};
  });
  std::vector<std::pair<std::string, std::string>> head{
      {"perc", perc::version_string},
      {"kind", "sample"},
      {"graph", sf.graph},
      {"vertices", std::to_string(g.vertex_count())},
      {"p", perc::detail::num(sf.p)},
      {"trials", std::to_string(trials)},
      {"seed", std::to_string(gf.seed)}};
  deliver(perc::detail::render_artifact(
              head, {"trial", "open", "open_clusters", "frontier_open_clusters", "largest"},
              rows, gf.format),
          gf.out);
}

struct phi_flags {
  std::string graph, set, p = "0.5", mode = "exact";
  int vertex = 0;
};

void run_phi(const phi_flags& pf, const global_flags& gf) {
  embedded_graph g = load_graph(pf.graph);
  std::vector<int> s = load_ids(pf.set);
  std::vector<double> grid = perc::detail::parse_config_grid(pf.p, "--p");
  perc::estimate_method mode = pf.mode == "mc" ? perc::estimate_method::monte_carlo
                                               : perc::estimate_method::exact;
  std::int64_t trials = mode == perc::estimate_method::monte_carlo
                            ? checked_trials(gf.trials)
                            : 0;
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    // Independent seeds per grid point, as in the decay fit.
    std::uint64_t si = perc::mix64(gf.seed + (i + 1) * perc::kGolden);
    perc::phi_estimate est = perc::phi_value(g, grid[i], pf.vertex, s, mode,
                                             trials, si, gf.threads);
    rows.push_back({perc::detail::num(est.p), perc::detail::num(est.value),
                    perc::detail::num(est.se), pf.mode});
  }
  std::vector<std::pair<std::string, std::string>> head{
      {"perc", perc::version_string},
      {"kind", "phi"},
      {"graph", pf.graph},
      {"vertex", std::to_string(pf.vertex)},
      {"set", std::to_string(s.size())},
      {"mode", pf.mode},
      {"trials", std::to_string(trials)},
      {"seed", std::to_string(gf.seed)}};
  deliver(perc::detail::render_artifact(head, {"p", "value", "stderr", "method"},
                                        rows, gf.format),
          gf.out);
}

struct arms_flags {
  std::string graph, set, targets;
  int k = 1;
  double p = 0.5;
};

void run_arms(const arms_flags& af, const global_flags& gf) {
  embedded_graph g = load_graph(af.graph);
  std::vector<int> s = load_ids(af.set);
  std::vector<int> targets =
      af.targets.empty() ? g.frontier() : load_ids(af.targets);
  perc::boundary_cycle b = perc::f_boundary(g, s, targets);
  perc::arm_spec spec = perc::equal_arm_spec(b, af.k);

  std::uint64_t trials = std::uint64_t(checked_trials(gf.trials));
  std::vector<char> occurs(trials, 0);
  std::vector<int> separation(trials, -1);
  perc::for_each_trial(trials, gf.threads, [&](std::uint64_t t) {
    perc::configuration c = perc::configuration_at(
        perc::sample_uniforms(g, perc::trial_seed(gf.seed, t)), af.p);
    perc::arm_event_report rep = perc::arm_event_occurs(g, c, b, spec);
    occurs[t] = rep.occurs ? 1 : 0;
    if (rep.occurs) separation[t] = perc::separation_count(g, c, b, spec);
  });

  std::uint64_t hits = 0, violations = 0;
  std::vector<std::vector<std::string>> rows(trials);
  for (std::uint64_t t = 0; t < trials; ++t) {
    if (occurs[t]) ++hits;
    if (occurs[t] && separation[t] < af.k) ++violations;
    rows[t] = {std::to_string(t), occurs[t] ? "1" : "0",
               std::to_string(separation[t])};
  }
  std::vector<std::pair<std::string, std::string>> head{
      {"perc", perc::version_string},
      {"kind", "arms"},
      {"graph", af.graph},
      {"k", std::to_string(af.k)},
      {"cycle", std::to_string(b.pruned.size())},
      {"p", perc::detail::num(af.p)},
      {"trials", std::to_string(trials)},
      {"seed", std::to_string(gf.seed)},
      {"occurrences", std::to_string(hits)},
      {"violations", std::to_string(violations)}};
  deliver(perc::detail::render_artifact(head, {"trial", "occurs", "separation"},
                                        rows, gf.format),
          gf.out);
}

struct cone_flags {
  int depth = 3;
  double p = 0.5;
};

void run_cone_law(const cone_flags& cf, const global_flags& gf) {
  embedded_graph g = perc::cone_tree(cf.depth);
  int apex = g.vertex_count() - 1;
  std::uint64_t trials = std::uint64_t(checked_trials(gf.trials));
  std::vector<char> apex_open(trials, 0);
  std::vector<int> clusters(trials, 0);
  perc::for_each_trial(trials, gf.threads, [&](std::uint64_t t) {
    perc::configuration c = perc::configuration_at(
        perc::sample_uniforms(g, perc::trial_seed(gf.seed, t)), cf.p);
    apex_open[t] = c.is_open(apex) ? 1 : 0;
    clusters[t] = perc::frontier_cluster_count(g, c, perc::vertex_state::open);
  });

  std::uint64_t hits = 0, failures = 0;
  std::vector<std::vector<std::string>> rows(trials);
  for (std::uint64_t t = 0; t < trials; ++t) {
    if (apex_open[t]) ++hits;
    if (apex_open[t] && clusters[t] != 1) ++failures;
    rows[t] = {std::to_string(t), apex_open[t] ? "1" : "0",
               std::to_string(clusters[t])};
  }
  std::vector<std::pair<std::string, std::string>> head{
      {"perc", perc::version_string},
      {"kind", "cone-law"},
      {"depth", std::to_string(cf.depth)},
      {"vertices", std::to_string(g.vertex_count())},
      {"p", perc::detail::num(cf.p)},
      {"trials", std::to_string(trials)},
      {"seed", std::to_string(gf.seed)},
      {"apex_open_fraction", perc::detail::num(double(hits) / double(trials))},
      {"single_cluster_failures", std::to_string(failures)}};
  deliver(perc::detail::render_artifact(
              head, {"trial", "apex_open", "frontier_open_clusters"}, rows, gf.format),
          gf.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-graph percolation laboratory"};
  app.require_subcommand(1);

  global_flags gf;
  gf.o_seed = app.add_option("--seed", gf.seed, "master random seed");
  gf.o_trials = app.add_option("--trials", gf.trials, "Monte Carlo trial count");
  gf.o_out = app.add_option("--out", gf.out, "output path (default stdout)");
  gf.o_format = app.add_option("--format", gf.format, "artifact format")
                    ->check(CLI::IsMember({"csv", "jsonl"}));
  gf.o_threads = app.add_option("--threads", gf.threads, "worker count")
                     ->check(CLI::Range(1u, 4096u));

  gen_flags gn;
  CLI::App* c_gen = app.add_subcommand("gen", "write a graph in the text format");
  c_gen->fallthrough();
  c_gen->add_option("--family", gn.family, "graph family")
      ->required()
      ->check(CLI::IsMember({"tree", "cone", "triangular", "strip", "triangulated",
                             "counterexample", "corridor"}));
  c_gen->add_option("--M", gn.M, "base of the block construction");
  c_gen->add_option("--d", gn.d, "dimension parameter");
  c_gen->add_option("--N", gn.N, "truncation depth of the block construction");
  c_gen->add_option("--branching", gn.branching, "tree arity");
  c_gen->add_option("--depth", gn.depth, "tree or cone depth");
  c_gen->add_option("--side", gn.side, "triangular patch side length");
  c_gen->add_option("--word", gn.word, "corridor address digits");
  c_gen->add_option("--doubled", gn.doubled, "emit the doubled corridor");
  c_gen->callback([&] { run_gen(gn, gf); });

  sample_flags sf;
  CLI::App* c_sample = app.add_subcommand("sample", "per-trial cluster statistics");
  c_sample->fallthrough();
  c_sample->add_option("--graph", sf.graph, "graph file")->required();
  c_sample->add_option("--p", sf.p, "openness probability");
  c_sample->callback([&] { run_sample(sf, gf); });

  phi_flags pf;
  CLI::App* c_phi = app.add_subcommand("phi", "boundary-visit functional on a patch");
  c_phi->fallthrough();
  c_phi->add_option("--graph", pf.graph, "graph file")->required();
  c_phi->add_option("--vertex", pf.vertex, "start vertex")->required();
  c_phi->add_option("--set", pf.set, "patch id file")->required();
  c_phi->add_option("--p", pf.p, "p values, list or lo:hi:step");
  c_phi->add_option("--mode", pf.mode, "evaluation mode")
      ->check(CLI::IsMember({"exact", "mc"}));
  c_phi->callback([&] { run_phi(pf, gf); });

  arms_flags af;
  CLI::App* c_arms = app.add_subcommand("arms", "alternating arm events on a patch boundary");
  c_arms->fallthrough();
  c_arms->add_option("--graph", af.graph, "graph file")->required();
  c_arms->add_option("--set", af.set, "patch id file")->required();
  c_arms->add_option("--k", af.k, "open arms demanded")->check(CLI::Range(1, 1 << 20));
  c_arms->add_option("--p", af.p, "openness probability");
  c_arms->add_option("--targets", af.targets, "frontier target id file (default: all)");
  c_arms->callback([&] { run_arms(af, gf); });

  runner_flags rf_sweep, rf_decay, rf_dist, rf_struct;
  CLI::App* c_sweep = app.add_subcommand("sweep", "critical-point sweep over a depth ladder");
  c_sweep->fallthrough();
  attach_runner_flags(c_sweep, rf_sweep);
  c_sweep->callback([&] { run_runner(rf_sweep, gf, "sweep"); });

  CLI::App* c_decay = app.add_subcommand("decay", "two-point connectivity decay fit");
  c_decay->fallthrough();
  attach_runner_flags(c_decay, rf_decay);
  c_decay->callback([&] { run_runner(rf_decay, gf, "decay"); });

  CLI::App* c_dist = app.add_subcommand("distances", "corner distance bound audit");
  c_dist->fallthrough();
  attach_runner_flags(c_dist, rf_dist);
  c_dist->callback([&] { run_runner(rf_dist, gf, "distances"); });

  CLI::App* c_struct = app.add_subcommand("audit-structure", "structural shape audit");
  c_struct->fallthrough();
  attach_runner_flags(c_struct, rf_struct);
  c_struct->callback([&] { run_runner(rf_struct, gf, "structure"); });

  cone_flags cf;
  CLI::App* c_cone = app.add_subcommand("cone-law", "apex cluster law in a coned tree");
  c_cone->fallthrough();
  c_cone->add_option("--depth", cf.depth, "tree depth under the apex");
  c_cone->add_option("--p", cf.p, "openness probability");
  c_cone->callback([&] { run_cone_law(cf, gf); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int r = app.exit(e);
    return r == 0 ? 0 : 2;
  } catch (const perc::error& e) {
    std::cerr << "perc: " << e.what() << "\n";
    switch (e.code()) {
      case errc::config_parse:
      case errc::graph_parse:
        return 2;
      case errc::size_overflow:
        return 3;
      default:
        return 4;
    }
  } catch (const std::exception& e) {
    std::cerr << "perc: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
