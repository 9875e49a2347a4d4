#pragma once

#include <stdexcept>
#include <string>

namespace perc {

// Every failure the library raises carries one of these codes so callers
// (and the CLI exit-code mapping) can dispatch without string matching.
enum class errc {
  asymmetric_rotation,
  self_loop,
  duplicate_neighbor,
  unknown_vertex,
  size_overflow,
  missing_coordinates,
  label_mismatch,
  word_length_mismatch,
  depth_out_of_range,
  digit_out_of_range,
  bad_probability,
  bad_parameters,
  unpaired_vertex,
  region_too_large_for_exact,
  vertex_not_in_s,
  interior_too_large_for_exact,
  precondition_violated,
  empty_family,
  empty_grid,
  disconnected_s,
  frontier_not_in_one_component,
  arm_spec_mismatch,
  event_absent,
  all_censored,
  config_parse,
  graph_parse,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::asymmetric_rotation: return "asymmetric_rotation";
    case errc::self_loop: return "self_loop";
    case errc::duplicate_neighbor: return "duplicate_neighbor";
    case errc::unknown_vertex: return "unknown_vertex";
    case errc::size_overflow: return "size_overflow";
    case errc::missing_coordinates: return "missing_coordinates";
    case errc::label_mismatch: return "label_mismatch";
    case errc::word_length_mismatch: return "word_length_mismatch";
    case errc::depth_out_of_range: return "depth_out_of_range";
    case errc::digit_out_of_range: return "digit_out_of_range";
    case errc::bad_probability: return "bad_probability";
    case errc::bad_parameters: return "bad_parameters";
    case errc::unpaired_vertex: return "unpaired_vertex";
    case errc::region_too_large_for_exact: return "region_too_large_for_exact";
    case errc::vertex_not_in_s: return "vertex_not_in_s";
    case errc::interior_too_large_for_exact: return "interior_too_large_for_exact";
    case errc::precondition_violated: return "precondition_violated";
    case errc::empty_family: return "empty_family";
    case errc::empty_grid: return "empty_grid";
    case errc::disconnected_s: return "disconnected_s";
    case errc::frontier_not_in_one_component: return "frontier_not_in_one_component";
    case errc::arm_spec_mismatch: return "arm_spec_mismatch";
    case errc::event_absent: return "event_absent";
    case errc::all_censored: return "all_censored";
    case errc::config_parse: return "config_parse";
    case errc::graph_parse: return "graph_parse";
  }
  return "unknown";
}

class error : public std::runtime_error {
 public:
  error(errc c, const std::string& what)
      : std::runtime_error(std::string(errc_name(c)) + ": " + what), code_(c) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc c, const std::string& what) { throw error(c, what); }

inline void require(bool ok, errc c, const std::string& what) {
  if (!ok) fail(c, what);
}

}  // namespace perc
