#ifndef APSQ_SQUARES_HPP
#define APSQ_SQUARES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "apsq/congruence.hpp"
#include "apsq/factor.hpp"
#include "apsq/integer.hpp"

namespace apsq {

/// first, first + step, ..., first + (length-1)*step with step >= 1.
struct AP {
  Integer first;
  Integer step;
  std::uint64_t length = 0;

  AP() = default;
  AP(Integer first_term, Integer common_step, std::uint64_t count)
      : first(std::move(first_term)), step(std::move(common_step)), length(count) {
    if (step < 1) throw DomainError("AP: step must be >= 1, got " + step.str());
    if (length < 1) throw DomainError("AP: length must be >= 1");
  }

  [[nodiscard]] Integer term(std::uint64_t n) const { return first + step * n; }
  [[nodiscard]] Integer last() const { return term(length - 1); }

  friend bool operator==(const AP&, const AP&) = default;
};

/// Indices n in [0, length) whose term is a perfect square, ascending.
struct SquarePositions {
  AP ap;
  std::vector<std::uint64_t> positions;

  [[nodiscard]] std::size_t count() const { return positions.size(); }
  friend bool operator==(const SquarePositions&, const SquarePositions&) = default;
};

namespace detail {

// First index whose term is >= 0.
inline std::uint64_t first_nonnegative_index(const AP& ap) {
  if (ap.first >= 0) return 0;
  Integer n = (-ap.first + ap.step - 1) / ap.step;
  if (n >= ap.length) return ap.length;
  return n.convert_to<std::uint64_t>();
}

}  // namespace detail

/// Tests every term.
inline SquarePositions square_positions_naive(const AP& ap) {
  SquarePositions out{ap, {}};
  const std::uint64_t n0 = detail::first_nonnegative_index(ap);
  if (n0 >= ap.length) return out;
  const Integer start = ap.term(n0);
  const auto last = to_u64(ap.last());
  const auto step = to_u64(ap.step);
  if (last && step) {
    std::uint64_t t = start.convert_to<std::uint64_t>();
    for (std::uint64_t n = n0;; ++n) {
      if (is_square(t)) out.positions.push_back(n);
      if (n + 1 == ap.length) break;
      t += *step;  // bounded by last
    }
    return out;
  }
  Integer t = start;
  for (std::uint64_t n = n0; n < ap.length; ++n, t += ap.step) {
    if (is_square(t)) out.positions.push_back(n);
  }
  return out;
}

struct FastEngineOptions {
  FactorOptions factor{};
};

/// Enumerates only roots x in the admissible classes of x^2 = first (mod step).
/// Falls back to the naive engine for step 1 and when factoring the step
/// runs out of budget.
inline SquarePositions square_positions_fast(const AP& ap, const FastEngineOptions& opt = {}) {
  if (ap.step == 1) return square_positions_naive(ap);
  const Integer last = ap.last();
  SquarePositions out{ap, {}};
  if (last < 0) return out;

  ResidueClasses classes;
  try {
    classes = solve_square_congruence(ap.first, factorize(ap.step, opt.factor));
  } catch (const BudgetExceeded&) {
    return square_positions_naive(ap);
  }
  if (classes.roots.empty()) return out;

  const Integer x_min = ap.first > 0 ? isqrt_ceil(ap.first) : Integer(0);
  const Integer x_max = isqrt(last);
  if (x_min > x_max) return out;

  const auto step64 = to_u64(ap.step);
  const auto xmax64 = to_u64(x_max);
  const auto first64 = to_i64(ap.first);
  // x^2 - first fits in 128 bits when x fits in 63 bits and first in 64.
  if (step64 && xmax64 && first64 && *xmax64 < (std::uint64_t{1} << 63)) {
    const std::uint64_t lo = x_min.convert_to<std::uint64_t>();
    const std::uint64_t hi = *xmax64;
    const std::uint64_t s = *step64;
    for (const Integer& root : classes.roots) {
      const std::uint64_t r = root.convert_to<std::uint64_t>();
      std::uint64_t x = lo + (r + s - lo % s) % s;
      for (; x <= hi; x += s) {
        i128 diff = static_cast<i128>(static_cast<u128>(x) * x) - *first64;
        out.positions.push_back(static_cast<std::uint64_t>(static_cast<u128>(diff) / s));
        if (hi - x < s) break;
      }
    }
  } else {
    for (const Integer& r : classes.roots) {
      Integer x = x_min + detail::mod_floor(r - x_min, ap.step);
      for (; x <= x_max; x += ap.step) {
        out.positions.push_back(Integer((x * x - ap.first) / ap.step).convert_to<std::uint64_t>());
      }
    }
  }
  std::sort(out.positions.begin(), out.positions.end());
  return out;
}

// ---------------------------------------------------------------------------
// 24n + 1 census

/// count - 1 <= sqrt(8N/3) <= count + 1, decided over the integers as
/// 3(count-1)^2 <= 8N <= 3(count+1)^2 (the left side only when count >= 1).
inline bool within_one_of_root_8n_over_3(std::uint64_t count, std::uint64_t n) {
  const u128 eight_n = static_cast<u128>(n) * 8;
  const u128 hi = static_cast<u128>(count + 1) * (count + 1) * 3;
  if (eight_n > hi) return false;
  if (count == 0) return true;
  const u128 lo = static_cast<u128>(count - 1) * (count - 1) * 3;
  return lo <= eight_n;
}

struct CensusEntry {
  std::uint64_t n;
  std::uint64_t count;
  double deviation;  // count - sqrt(8n/3), for reporting only
};

struct ErdosRudinCensus {
  std::uint64_t n_max = 0;
  std::vector<CensusEntry> entries;  // n = 1..n_max
  double max_abs_deviation = 0;
  std::uint64_t argmax_n = 0;
  std::vector<std::uint64_t> violations;  // n where the exact predicate fails

  [[nodiscard]] bool all_within_one() const { return violations.empty(); }
};

/// Squares in {24n+1 : 0 <= n < N} for every N <= n_max.
inline ErdosRudinCensus erdos_rudin_census(std::uint64_t n_max) {
  if (n_max < 1) throw DomainError("erdos_rudin_census: n_max must be >= 1");
  ErdosRudinCensus out;
  out.n_max = n_max;
  out.entries.reserve(n_max);
  const SquarePositions pos = square_positions_fast(AP(1, 24, n_max));
  std::size_t next = 0;
  std::uint64_t count = 0;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    // position n-1 joins the progression of length n
    if (next < pos.positions.size() && pos.positions[next] == n - 1) {
      ++count;
      ++next;
    }
    const double dev = static_cast<double>(count) - std::sqrt(8.0 * static_cast<double>(n) / 3.0);
    out.entries.push_back({n, count, dev});
    if (std::abs(dev) > out.max_abs_deviation) {
      out.max_abs_deviation = std::abs(dev);
      out.argmax_n = n;
    }
    if (!within_one_of_root_8n_over_3(count, n)) out.violations.push_back(n);
  }
  return out;
}

}  // namespace apsq

#endif  // APSQ_SQUARES_HPP
