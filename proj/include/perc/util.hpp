#pragma once

#include <cstdint>
#include <functional>
#include <numeric>
#include <thread>
#include <vector>

namespace perc {

// ---------------------------------------------------------------------------
// Counter-based randomness.
//
// Every per-vertex uniform is a pure function of (seed, vertex id): the
// finalizer of splitmix64 applied to seed + (id+1) * golden ratio.  This makes
// samples replayable, order-independent and safe to evaluate from any thread.
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

// Uniform in [0,1) with the full 53-bit mantissa.
inline double unit_double(std::uint64_t h) { return double(h >> 11) * 0x1.0p-53; }

inline double uniform_at(std::uint64_t seed, std::uint64_t id) {
  return unit_double(mix64(seed + (id + 1) * kGolden));
}

// Independent stream per trial, derived from the master seed.  Aggregating
// per-trial results indexed by trial number keeps every estimator independent
// of the worker count.
inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
  return mix64(master ^ mix64((trial + 1) * 0xd1b54a32d192ed03ull));
}

// ---------------------------------------------------------------------------
// Union-find with union by size and path halving.
// ---------------------------------------------------------------------------

class union_find {
 public:
  explicit union_find(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

  std::int64_t size_of(int x) { return size_[find(x)]; }

 private:
  std::vector<int> parent_;
  std::vector<std::int64_t> size_;
};

// ---------------------------------------------------------------------------
// Deterministic trial parallelism: fn(t) must write only to slot t of some
// preallocated output, so the merge is the identity regardless of scheduling.
// ---------------------------------------------------------------------------

inline void for_each_trial(std::uint64_t trials, unsigned threads,
                           const std::function<void(std::uint64_t)>& fn) {
  if (threads <= 1 || trials < 2) {
    for (std::uint64_t t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::vector<std::thread> pool;
  std::uint64_t chunk = (trials + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    std::uint64_t lo = w * chunk, hi = std::min(trials, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::uint64_t t = lo; t < hi; ++t) fn(t);
    });
  }
  for (auto& th : pool) th.join();
}

// Overflow-checked integer power; returns false on u64 overflow.
inline bool checked_pow(std::uint64_t base, unsigned exp, std::uint64_t& out) {
  out = 1;
  for (unsigned i = 0; i < exp; ++i) {
    if (base != 0 && out > ~0ull / base) return false;
    out *= base;
  }
  return true;
}

// Open-addressing map from u64 keys to u32 values, for BFS over implicit
// graphs where unordered_map overhead dominates.  Key 0 is reserved.
class flat_map64 {
 public:
  explicit flat_map64(std::size_t expect = 1024) { rehash(round_up(expect * 2)); }

  // Returns existing value or inserts `val`; `inserted` reports which.
  std::uint32_t find_or_insert(std::uint64_t key, std::uint32_t val, bool& inserted) {
    if (count_ * 10 >= cap_ * 7) rehash(cap_ * 2);
    std::size_t i = probe(key);
    if (keys_[i] == key) {
      inserted = false;
      return vals_[i];
    }
    keys_[i] = key;
    vals_[i] = val;
    ++count_;
    inserted = true;
    return val;
  }

  // Returns pointer to value or nullptr.
  const std::uint32_t* find(std::uint64_t key) const {
    std::size_t i = probe(key);
    return keys_[i] == key ? &vals_[i] : nullptr;
  }

  std::size_t size() const { return count_; }

 private:
  static std::size_t round_up(std::size_t n) {
    std::size_t c = 64;
    while (c < n) c <<= 1;
    return c;
  }

  std::size_t probe(std::uint64_t key) const {
    std::size_t mask = cap_ - 1, i = mix64(key) & mask;
    while (keys_[i] != 0 && keys_[i] != key) i = (i + 1) & mask;
    return i;
  }

  void rehash(std::size_t ncap) {
    std::vector<std::uint64_t> ok = std::move(keys_);
    std::vector<std::uint32_t> ov = std::move(vals_);
    cap_ = round_up(ncap);
    keys_.assign(cap_, 0);
    vals_.assign(cap_, 0);
    count_ = 0;
    for (std::size_t i = 0; i < ok.size(); ++i)
      if (ok[i] != 0) {
        bool ins;
        find_or_insert(ok[i], ov[i], ins);
      }
  }

  std::size_t cap_ = 0, count_ = 0;
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint32_t> vals_;
};

}  // namespace perc
