#ifndef APSQ_EXTREMAL_HPP
#define APSQ_EXTREMAL_HPP

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "apsq/integer.hpp"
#include "apsq/parallel.hpp"
#include "apsq/squares.hpp"

namespace apsq {

// ---------------------------------------------------------------------------
// 4-term APs inside a finite set

/// Some (u, u+v, u+2v, u+3v) inside `set` with v >= 1, taking the smallest
/// (u, u+v) pair in lexicographic order. O(|S|^2 log |S|).
template <typename T>
std::optional<std::array<T, 4>> find_4ap_in_set(std::span<const T> set) {
  std::vector<T> s(set.begin(), set.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  auto contains = [&s](const T& x) { return std::binary_search(s.begin(), s.end(), x); };
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      const T v = s[j] - s[i];
      const T third = s[j] + v;
      if (s.back() < third) break;
      const T fourth = third + v;
      if (s.back() < fourth) break;
      if (contains(third) && contains(fourth)) return std::array<T, 4>{s[i], s[j], third, fourth};
    }
  }
  return std::nullopt;
}

template <typename T>
std::optional<std::array<T, 4>> find_4ap_in_set(const std::vector<T>& set) {
  return find_4ap_in_set(std::span<const T>(set));
}

// ---------------------------------------------------------------------------
// Exhaustive scan for square APs

/// a^2, b^2, c^2 in AP (roots a < b < c).
struct ThreeSquareAP {
  std::uint64_t a, b, c;
  [[nodiscard]] std::uint64_t difference() const { return b * b - a * a; }
  friend bool operator==(const ThreeSquareAP&, const ThreeSquareAP&) = default;
};

struct FourSquareAP {
  std::uint64_t a, b, c, e;
  std::uint64_t difference;
};

struct FermatScanResult {
  std::uint64_t bound = 0;
  std::optional<FourSquareAP> four_ap_found;
  std::vector<ThreeSquareAP> three_aps;  // ordered by (b, a)

  [[nodiscard]] std::size_t three_ap_census() const { return three_aps.size(); }
};

/// For every 1 <= a < b <= B, tests whether 2b^2 - a^2 and 3b^2 - 2a^2 are
/// squares, i.e. whether a^2, b^2 extend to a 3- or 4-term square AP.
inline FermatScanResult fermat_scan(std::uint64_t bound, unsigned threads = 0) {
  if (bound < 2) throw DomainError("fermat_scan: bound must be >= 2");
  if (bound > (std::uint64_t{1} << 31)) throw DomainError("fermat_scan: bound too large");
  const auto chunks = split_range(2, bound + 1, 256);
  std::vector<FermatScanResult> partial(chunks.size());
  parallel_for(chunks.size(), threads, [&](std::size_t ci) {
    FermatScanResult& out = partial[ci];
    for (std::uint64_t b = chunks[ci].begin; b < chunks[ci].end; ++b) {
      const std::uint64_t b2 = b * b;
      for (std::uint64_t a = 1; a < b; ++a) {
        const std::uint64_t third = 2 * b2 - a * a;
        if (!is_square(third)) continue;
        const std::uint64_t c = isqrt(third);
        out.three_aps.push_back({a, b, c});
        const std::uint64_t fourth = 3 * b2 - 2 * a * a;
        if (is_square(fourth) && !out.four_ap_found) {
          out.four_ap_found = FourSquareAP{a, b, c, isqrt(fourth), b2 - a * a};
        }
      }
    }
  });
  FermatScanResult out;
  out.bound = bound;
  for (auto& p : partial) {
    if (p.four_ap_found && !out.four_ap_found) out.four_ap_found = p.four_ap_found;
    out.three_aps.insert(out.three_aps.end(), p.three_aps.begin(), p.three_aps.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lower bounds for Q(N)

struct StepBest {
  std::uint64_t count = 0;
  std::uint64_t first = 0;  // AP first term achieving `count` (smallest)
};

struct QnWitness {
  std::uint64_t step = 0;
  std::uint64_t residue = 0;  // first mod step
  std::uint64_t first = 0;
  SquarePositions positions;
};

/// Best count of squares in a length-N AP over the box: step d <= d_max and
/// every term in [0, x_max^2]. A lower bound for Q(N), never a proof of it.
struct QnLowerResult {
  std::uint64_t n = 0;
  std::uint64_t d_max = 0;
  std::uint64_t x_max = 0;
  std::uint64_t best_count = 0;
  QnWitness witness;
  std::vector<StepBest> per_step;  // index d - 1
};

namespace detail {

inline StepBest best_for_step(std::uint64_t n, std::uint64_t d, std::uint64_t x_max) {
  StepBest best;
  const u128 span = static_cast<u128>(n - 1) * d;
  const u128 top = static_cast<u128>(x_max) * x_max;
  if (span > top) return best;
  const std::uint64_t upper_start = static_cast<std::uint64_t>(top - span);

  // Counting sort of roots by x^2 mod d keeps each class ascending.
  std::vector<std::uint64_t> offset(d + 1, 0);
  std::vector<std::uint64_t> residue(x_max + 1);
  for (std::uint64_t x = 0; x <= x_max; ++x) {
    residue[x] = static_cast<std::uint64_t>(static_cast<u128>(x) * x % d);
    ++offset[residue[x] + 1];
  }
  for (std::uint64_t r = 0; r < d; ++r) offset[r + 1] += offset[r];
  std::vector<std::uint64_t> sq(x_max + 1);
  {
    std::vector<std::uint64_t> fill(offset.begin(), offset.end() - 1);
    for (std::uint64_t x = 0; x <= x_max; ++x) sq[fill[residue[x]]++] = x * x;
  }
  const std::uint64_t span64 = static_cast<std::uint64_t>(span);
  for (std::uint64_t r = 0; r < d; ++r) {
    const std::uint64_t lo = offset[r], hi = offset[r + 1];
    std::uint64_t i = lo;
    for (std::uint64_t j = lo; j < hi; ++j) {
      const std::uint64_t floor_start = sq[j] > span64 ? sq[j] - span64 : 0;
      while (sq[i] < floor_start) ++i;
      // smallest start >= floor_start in this class
      const std::uint64_t start = floor_start + (sq[i] - floor_start) % d;
      if (start > upper_start) continue;
      const std::uint64_t count = j - i + 1;
      if (count > best.count || (count == best.count && start < best.first)) {
        best = {count, start};
      }
    }
  }
  return best;
}

}  // namespace detail

inline QnLowerResult qn_lower_search(std::uint64_t n, std::uint64_t d_max, std::uint64_t x_max,
                                     unsigned threads = 0) {
  if (n < 1) throw DomainError("qn_lower_search: N must be >= 1");
  if (d_max < 1) throw DomainError("qn_lower_search: d_max must be >= 1");
  if (x_max >= (std::uint64_t{1} << 32)) throw DomainError("qn_lower_search: x_max must be < 2^32");
  QnLowerResult out;
  out.n = n;
  out.d_max = d_max;
  out.x_max = x_max;
  out.per_step.resize(d_max);
  parallel_for(d_max, threads,
               [&](std::size_t i) { out.per_step[i] = detail::best_for_step(n, i + 1, x_max); });
  std::uint64_t best_d = 0;
  for (std::uint64_t d = 1; d <= d_max; ++d) {
    const auto& s = out.per_step[d - 1];
    if (s.count > out.best_count) {
      out.best_count = s.count;
      best_d = d;
    }
  }
  if (best_d == 0) return out;
  const auto& s = out.per_step[best_d - 1];
  out.witness.step = best_d;
  out.witness.first = s.first;
  out.witness.residue = s.first % best_d;
  out.witness.positions = square_positions_naive(AP(s.first, best_d, n));
  if (out.witness.positions.count() != out.best_count) {
    throw ContractViolation("qn_lower_search: witness does not re-verify");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Largest 4-AP-free subsets of [0, N)

struct No4APResult {
  std::uint64_t n = 0;
  std::uint64_t max_size = 0;
  std::vector<std::uint64_t> witness;
  bool optimal = false;
  std::uint64_t nodes = 0;
};

struct No4APOptions {
  /// Search nodes allowed across all lengths; 0 means unlimited.
  std::uint64_t node_budget = 2'000'000'000;
  unsigned threads = 0;
};

namespace detail {

class No4APSearch {
 public:
  No4APSearch(std::uint64_t len, const std::vector<std::uint64_t>& exact,
              std::atomic<std::uint64_t>& nodes, std::uint64_t budget)
      : len_(len), exact_(exact), nodes_(nodes), budget_(budget) {}

  // Extends a set containing {0, y} toward `target` elements.
  std::optional<std::uint64_t> run(std::uint64_t y, std::uint64_t target) {
    target_ = target;
    const std::uint64_t set = 1ull | (1ull << y);
    const std::uint64_t forbidden = forbid_after(1ull, 0, y);
    if (dfs(set, forbidden, y, 2)) return found_;
    return std::nullopt;
  }

 private:
  // Elements z > y made illegal by adding y: z = y + v with y - v, y - 2v in set.
  std::uint64_t forbid_after(std::uint64_t set, std::uint64_t forbidden, std::uint64_t y) const {
    for (std::uint64_t v = 1; 2 * v <= y; ++v) {
      if (y + v >= len_) break;
      if (((set >> (y - v)) & 1) && ((set >> (y - 2 * v)) & 1)) forbidden |= 1ull << (y + v);
    }
    return forbidden;
  }

  bool dfs(std::uint64_t set, std::uint64_t forbidden, std::uint64_t last, std::uint64_t size) {
    if (size >= target_) {
      found_ = set;
      return true;
    }
    if (budget_ != 0 && nodes_.fetch_add(1, std::memory_order_relaxed) >= budget_) {
      throw BudgetExceeded("no4ap_max: node budget exhausted");
    }
    const std::uint64_t all = len_ == 64 ? ~0ull : ((1ull << len_) - 1);
    std::uint64_t cand = all & ~forbidden & ~((2ull << last) - 1);
    if (size + static_cast<std::uint64_t>(std::popcount(cand)) < target_) return false;
    while (cand) {
      const std::uint64_t y = static_cast<std::uint64_t>(std::countr_zero(cand));
      cand &= cand - 1;
      // elements of [y, len) fit in a translate of [0, len - y)
      if (size + exact_[len_ - y] < target_) return false;
      const std::uint64_t next = set | (1ull << y);
      if (dfs(next, forbid_after(next, forbidden, y), y, size + 1)) return true;
    }
    return false;
  }

  std::uint64_t len_;
  const std::vector<std::uint64_t>& exact_;
  std::atomic<std::uint64_t>& nodes_;
  std::uint64_t budget_;
  std::uint64_t target_ = 0;
  std::uint64_t found_ = 0;
};

inline std::vector<std::uint64_t> mask_to_set(std::uint64_t mask) {
  std::vector<std::uint64_t> out;
  while (mask) {
    out.push_back(static_cast<std::uint64_t>(std::countr_zero(mask)));
    mask &= mask - 1;
  }
  return out;
}

}  // namespace detail

/// Exact maxima for every length 1..N by increasing length: a set for length
/// L + 1 can be translated to contain 0, and the maximum grows by at most one,
/// so each step only asks whether size exact[L] + 1 is reachable. Smaller
/// exact values bound the remaining tail during the search.
inline std::vector<No4APResult> no4ap_table(std::uint64_t n_max, const No4APOptions& opt = {}) {
  if (n_max < 1) throw DomainError("no4ap_max: N must be >= 1");
  if (n_max > 64) throw DomainError("no4ap_max: N must be <= 64");
  std::vector<No4APResult> out;
  std::vector<std::uint64_t> exact{0};  // exact[len]
  std::atomic<std::uint64_t> nodes{0};
  std::vector<std::uint64_t> best_set;
  bool optimal = true;
  for (std::uint64_t len = 1; len <= n_max; ++len) {
    const std::uint64_t prev = exact.back();
    std::uint64_t value = prev;
    if (optimal) {
      if (len <= 3) {
        value = len;
        best_set = detail::mask_to_set((1ull << len) - 1);
      } else {
        const std::uint64_t target = prev + 1;
        std::vector<std::optional<std::uint64_t>> found(len - 1);
        std::atomic<std::uint64_t> first_found{len};
        try {
          parallel_for(len - 1, opt.threads, [&](std::size_t i) {
            const std::uint64_t y = i + 1;
            if (first_found.load(std::memory_order_relaxed) < y) return;
            detail::No4APSearch search(len, exact, nodes, opt.node_budget);
            found[i] = search.run(y, target);
            if (found[i]) {
              std::uint64_t cur = first_found.load();
              while (y < cur && !first_found.compare_exchange_weak(cur, y)) {
              }
            }
          });
          for (const auto& f : found) {
            if (f) {
              value = target;
              best_set = detail::mask_to_set(*f);
              break;
            }
          }
        } catch (const BudgetExceeded&) {
          optimal = false;
        }
      }
    }
    exact.push_back(value);
    out.push_back({len, value, best_set, optimal, nodes.load()});
  }
  return out;
}

inline No4APResult no4ap_max(std::uint64_t n, const No4APOptions& opt = {}) {
  return no4ap_table(n, opt).back();
}

/// floor((3N + 3) / 4).
inline Integer fermat_upper_bound(const Integer& n) {
  if (n < 1) throw DomainError("fermat_upper_bound: N must be >= 1");
  return (3 * n + 3) / 4;
}

}  // namespace apsq

#endif  // APSQ_EXTREMAL_HPP
