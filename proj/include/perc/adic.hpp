#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "perc/errors.hpp"
#include "perc/util.hpp"

namespace perc {

// Default guard against the M^{dn} growth of the generated families: builders
// refuse to materialize more vertices than this instead of running out of
// memory.
inline constexpr std::uint64_t default_vertex_cap = std::uint64_t(1) << 26;

// Parameters of the M-adic strip family: levels n = 0..N, level n holding
// B^n = M^{dn} vertices split into M^n contiguous groups of s_n = M^{(d-1)n}.
struct adic_params {
  int M = 2;
  int d = 3;
  int N = 1;  // truncation depth

  void validate() const {
    require(M >= 2 && d >= 3 && N >= 1, errc::bad_parameters,
            "need M >= 2, d >= 3, N >= 1");
  }

  std::uint64_t B() const {
    std::uint64_t b;
    require(checked_pow(std::uint64_t(M), unsigned(d), b), errc::size_overflow, "M^d");
    return b;
  }

  // |L_n| = B^n
  std::uint64_t level_size(int n) const {
    std::uint64_t v;
    require(checked_pow(B(), unsigned(n), v), errc::size_overflow, "level size");
    return v;
  }

  // group width s_n = M^{(d-1)n}
  std::uint64_t group_size(int n) const {
    std::uint64_t v;
    require(checked_pow(std::uint64_t(M), unsigned((d - 1) * n), v), errc::size_overflow,
            "group size");
    return v;
  }

  // vertices strictly above level n: 1 + B + ... + B^{n-1}
  std::uint64_t level_offset(int n) const {
    std::uint64_t total = 0;
    for (int k = 0; k < n; ++k) {
      std::uint64_t sz = level_size(k);
      require(total + sz >= total, errc::size_overflow, "level offset");
      total += sz;
    }
    return total;
  }

  // level-order id of (n, i), i one-based within the level
  std::uint64_t vertex_id(int n, std::uint64_t i) const { return level_offset(n) + (i - 1); }
};

// Base-M address of a digit word: Σ_t b_t M^{n-t}.
inline std::uint64_t addr(int M, std::span<const int> word) {
  std::uint64_t a = 0;
  for (int digit : word) {
    require(digit >= 0 && digit < M, errc::digit_out_of_range,
            "digit " + std::to_string(digit) + " with M=" + std::to_string(M));
    require(a <= (~std::uint64_t(0) - std::uint64_t(digit)) / M, errc::size_overflow, "addr");
    a = a * M + std::uint64_t(digit);
  }
  return a;
}

// Address of the length-n prefix (A_0 = 0).
inline std::uint64_t prefix_address(int M, std::span<const int> word, int n) {
  require(n >= 0 && n <= int(word.size()), errc::depth_out_of_range,
          "prefix length " + std::to_string(n));
  return addr(M, word.subspan(0, std::size_t(n)));
}

enum class lr_side { left, right };

// The left/right boundary vertex of the depth-n group following the word:
// (n, A_n s_n + 1) on the left, (n, (A_n + 1) s_n) on the right.
inline std::pair<int, std::uint64_t> lr_boundary(const adic_params& params,
                                                 std::span<const int> word, int n, lr_side side) {
  params.validate();
  std::uint64_t a = prefix_address(params.M, word, n);
  std::uint64_t s = params.group_size(n);
  return {n, side == lr_side::left ? a * s + 1 : (a + 1) * s};
}

// Closed-form neighbor rules of the triangulated single-copy strip graph,
// truncated at depth_cap, without materializing it.  Vertices are (n, i) with
// 1 <= i <= B^n; edges are tree edges, in-group horizontals, and the fan
// diagonals (n,j)-(n+1,Bj+1) of the quadrilateral faces between consecutive
// levels (present when j,j+1 share a group and Bj,Bj+1 share a group).
class implicit_strip {
 public:
  implicit_strip(const adic_params& params, int depth_cap)
      : B_(params.B()), depth_cap_(depth_cap) {
    params.validate();
    require(depth_cap >= 0, errc::bad_parameters, "depth cap");
    level_.resize(depth_cap + 1);
    group_.resize(depth_cap + 1);
    for (int n = 0; n <= depth_cap; ++n) {
      level_[n] = params.level_size(n);
      group_[n] = params.group_size(n);
    }
  }

  int depth_cap() const { return depth_cap_; }
  std::uint64_t level_size(int n) const { return level_[n]; }

  // level-order id, consistent with the materialized builders
  std::uint64_t vertex_id(int n, std::uint64_t i) const {
    std::uint64_t off = 0;
    for (int k = 0; k < n; ++k) off += level_[k];
    return off + (i - 1);
  }

  template <typename Fn>  // fn(int n, uint64 i)
  void for_each_neighbor(int n, std::uint64_t i, Fn&& fn) const {
    if (n > 0) {
      fn(n - 1, (i + B_ - 1) / B_);  // parent
      // diagonal up: i = B j' + 1 receives the fan diagonal of the
      // quadrilateral at columns j', j'+1 one level up
      if ((i - 1) % B_ == 0 && i > 1) {
        std::uint64_t j = (i - 1) / B_;
        if (j % group_[n - 1] != 0 && (i - 1) % group_[n] != 0) fn(n - 1, j);
      }
    }
    if (i > 1 && (i - 1) % group_[n] != 0) fn(n, i - 1);
    if (i < level_[n] && i % group_[n] != 0) fn(n, i + 1);
    if (n < depth_cap_) {
      std::uint64_t first = B_ * (i - 1) + 1;
      for (std::uint64_t c = 0; c < B_; ++c) fn(n + 1, first + c);  // children
      // diagonal down to the next column's first child
      if (i % group_[n] != 0 && (B_ * i) % group_[n + 1] != 0) fn(n + 1, B_ * i + 1);
    }
  }

 private:
  std::uint64_t B_;
  int depth_cap_;
  std::vector<std::uint64_t> level_;
  std::vector<std::uint64_t> group_;
};

}  // namespace perc
