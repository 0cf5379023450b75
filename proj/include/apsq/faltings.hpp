#ifndef APSQ_FALTINGS_HPP
#define APSQ_FALTINGS_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "apsq/integer.hpp"
#include "apsq/parallel.hpp"
#include "apsq/squares.hpp"

namespace apsq {

using SixTuple = std::array<std::int64_t, 6>;

/// x = p/q in lowest terms with (x+b_1)...(x+b_6) a rational square.
struct FaltingsSolution {
  Integer p;
  Integer q;
  SixTuple b{};
  bool product_zero = false;

  friend bool operator==(const FaltingsSolution& l, const FaltingsSolution& r) {
    return l.p == r.p && l.q == r.q && l.b == r.b;
  }
  friend bool operator<(const FaltingsSolution& l, const FaltingsSolution& r) {
    if (l.q != r.q) return l.q < r.q;
    if (l.p != r.p) return l.p < r.p;
    return l.b < r.b;
  }
};

namespace detail {

inline void check_six_tuple(const SixTuple& b) {
  if (b[0] != 0) throw DomainError("six-tuple must start with 0");
  for (std::size_t i = 1; i < b.size(); ++i) {
    if (b[i] <= b[i - 1]) throw DomainError("six-tuple must be strictly increasing");
  }
}

inline std::string tuple_str(const SixTuple& b) {
  std::string s = "(";
  for (std::size_t i = 0; i < b.size(); ++i) s += (i ? "," : "") + std::to_string(b[i]);
  return s + ")";
}

}  // namespace detail

/// prod (p + b_i q) is a perfect square. Since q^6 is a square this is the
/// same as (x + b_1)...(x + b_6) being a rational square for x = p/q.
inline bool product_is_rational_square(const Integer& p, const Integer& q, const SixTuple& b) {
  if (q < 1) throw DomainError("product_is_rational_square: q must be >= 1");
  if (gcd(p, q) != 1) {
    throw DomainError("product_is_rational_square: " + p.str() + "/" + q.str() + " is not reduced");
  }
  detail::check_six_tuple(b);
  Integer prod = 1;
  for (std::int64_t bi : b) prod *= p + bi * q;
  return is_square(prod);
}

struct BCountResult {
  std::uint64_t m = 0;
  std::uint64_t h = 0;
  bool include_zero = true;
  std::vector<FaltingsSolution> solutions;  // ordered by (q, p, b)
  std::uint64_t zero_solutions = 0;

  /// B-hat(M, H): a census inside the height box, never B(M) itself.
  [[nodiscard]] std::uint64_t count() const { return solutions.size(); }
};

/// All 5-subsets of [1, m-1] prefixed by 0, in lexicographic order.
inline std::vector<SixTuple> six_tuples(std::uint64_t m) {
  std::vector<SixTuple> out;
  if (m < 6) return out;
  const auto top = static_cast<std::int64_t>(m) - 1;
  SixTuple t{0, 1, 2, 3, 4, 5};
  for (;;) {
    out.push_back(t);
    int i = 5;
    while (i >= 1 && t[i] == top - (5 - i)) --i;
    if (i < 1) break;
    ++t[i];
    for (int j = i + 1; j < 6; ++j) t[j] = t[j - 1] + 1;
  }
  return out;
}

/// Every reduced p/q with |p| <= H*M, 1 <= q <= H and every 6-tuple
/// 0 = b_1 < ... < b_6 <= M-1 whose product is a rational square. Parallel
/// over q with an ordered merge.
inline BCountResult b_count_search(std::uint64_t m, std::uint64_t h, bool include_zero,
                                   unsigned threads = 0) {
  if (m < 6) throw DomainError("b_count_search: M must be >= 6");
  if (h < 1) throw DomainError("b_count_search: H must be >= 1");
  if (m > (1u << 20) || h > (1u << 20)) throw DomainError("b_count_search: box too large");
  const auto tuples = six_tuples(m);
  const auto p_max = static_cast<std::int64_t>(h * m);
  // Every factor has |p + b q| <= 2HM; six of them fit in 126 bits below 2^21.
  const bool narrow = 2 * h * m < (1u << 21);

  std::vector<std::vector<FaltingsSolution>> per_q(h);
  parallel_for(h, threads, [&](std::size_t qi) {
    const auto q = static_cast<std::int64_t>(qi + 1);
    auto& out = per_q[qi];
    for (std::int64_t p = -p_max; p <= p_max; ++p) {
      if (std::gcd(p < 0 ? -p : p, q) != 1) continue;
      for (const SixTuple& b : tuples) {
        bool zero = false;
        bool square = false;
        if (narrow) {
          i128 prod = 1;
          for (std::int64_t bi : b) {
            const std::int64_t f = p + bi * q;
            zero = zero || f == 0;
            prod *= f;
          }
          square = prod >= 0 && is_square(static_cast<u128>(prod));
        } else {
          Integer prod = 1;
          for (std::int64_t bi : b) {
            const std::int64_t f = p + bi * q;
            zero = zero || f == 0;
            prod *= f;
          }
          square = is_square(prod);
        }
        if (!square || (zero && !include_zero)) continue;
        out.push_back({Integer(p), Integer(q), b, zero});
      }
    }
  });
  BCountResult res;
  res.m = m;
  res.h = h;
  res.include_zero = include_zero;
  for (auto& v : per_q) {
    for (auto& s : v) {
      res.zero_solutions += s.product_zero;
      res.solutions.push_back(std::move(s));
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Replay of the interval-counting bound on one AP

struct LedgerVerdicts {
  bool sizes_sum_to_total = false;      // sum_j |N_j| = |N|
  bool per_interval_r_bound = false;    // |N_j| <= 5 + C(|N_j|, 6) for all j
  bool total_le_5k_plus_binomials = false;  // |N| <= 5k + sum_J C(|N_j|, 6)
  bool binomials_equal_generated = false;   // sum_J C(|N_j|, 6) = #generated
  bool generated_distinct = false;
  bool products_are_squares = false;
  bool substitution_round_trip = false;     // d (x + b_i) = a + n_i d
  bool total_le_5k_plus_b = false;          // |N| <= 5k + B-hat
  bool k_le_n_over_m_plus_1 = false;

  [[nodiscard]] bool all() const {
    return sizes_sum_to_total && per_interval_r_bound && total_le_5k_plus_binomials &&
           binomials_equal_generated && generated_distinct && products_are_squares &&
           substitution_round_trip && total_le_5k_plus_b && k_le_n_over_m_plus_1;
  }
};

/// Whether the final chain would certify Q(N) < delta N for a given delta.
struct DeltaReport {
  double delta = 0;
  bool m_exceeds_six_over_delta = false;  // M delta > 6
  bool n_at_least_m_b_plus_5 = false;     // N >= M (B-hat + 5)
  bool implies_below_delta_n = false;
};

struct LedgerReport {
  Integer a;
  Integer d;
  std::uint64_t n = 0;
  std::uint64_t m = 0;
  std::uint64_t k = 0;
  std::vector<std::uint64_t> positions;
  std::vector<std::uint64_t> interval_sizes;
  std::vector<std::uint64_t> big_intervals;  // J: intervals with >= 6 elements
  Integer binomial_sum;
  std::vector<FaltingsSolution> solutions;
  std::uint64_t distinct_solutions = 0;
  Integer five_k;
  Integer b_used;
  Integer final_bound;  // 5k + B-hat
  LedgerVerdicts verdicts;
  std::optional<DeltaReport> delta;
};

struct LedgerOptions {
  std::optional<double> delta;
  /// Cap on 6-subsets enumerated; 0 means unlimited.
  std::uint64_t max_subsets = 50'000'000;
};

/// Partitions the square positions of a + n d (0 <= n < N) into blocks of M,
/// maps every 6-subset of a block to (x, b) with x = a/d + n_1 and
/// b_i = n_i - n_1, and re-checks each step of the counting chain. Any
/// failed step throws ContractViolation naming the offending data.
inline LedgerReport ledger_run(const Integer& a, const Integer& d, std::uint64_t n,
                               std::uint64_t m, const LedgerOptions& opt = {}) {
  if (m < 6) throw DomainError("ledger_run: M must be >= 6");
  if (n < 1) throw DomainError("ledger_run: N must be >= 1");
  LedgerReport rep;
  rep.a = a;
  rep.d = d;
  rep.n = n;
  rep.m = m;
  const AP ap(a, d, n);
  rep.positions = square_positions_fast(ap).positions;

  // kM is the smallest multiple of M greater than N.
  rep.k = n / m + 1;
  rep.interval_sizes.assign(rep.k, 0);
  for (std::uint64_t pos : rep.positions) ++rep.interval_sizes[pos / m];

  auto fail = [](const std::string& what) { throw ContractViolation("ledger_run: " + what); };

  std::uint64_t size_sum = 0;
  bool r_bound = true;
  rep.binomial_sum = 0;
  for (std::uint64_t j = 0; j < rep.k; ++j) {
    const std::uint64_t r = rep.interval_sizes[j];
    size_sum += r;
    const Integer c = binomial(r, 6);
    if (Integer(r) > 5 + c) {
      r_bound = false;
      fail("interval " + std::to_string(j) + " has " + std::to_string(r) + " > 5 + C(r,6)");
    }
    if (r >= 6) {
      rep.big_intervals.push_back(j);
      rep.binomial_sum += c;
    }
  }
  if (opt.max_subsets != 0 && rep.binomial_sum > opt.max_subsets) {
    throw BudgetExceeded("ledger_run: " + rep.binomial_sum.str() + " six-subsets exceed the budget");
  }

  bool products_ok = true;
  bool round_trip = true;
  std::set<std::tuple<Integer, Integer, SixTuple>> seen;
  bool distinct = true;
  std::size_t begin = 0;
  for (std::uint64_t j : rep.big_intervals) {
    while (rep.positions[begin] / m < j) ++begin;
    const std::size_t r = rep.interval_sizes[j];
    const std::uint64_t* block = rep.positions.data() + begin;
    std::array<std::size_t, 6> idx{0, 1, 2, 3, 4, 5};
    for (;;) {
      const std::uint64_t n1 = block[idx[0]];
      SixTuple b{};
      for (std::size_t i = 0; i < 6; ++i) b[i] = static_cast<std::int64_t>(block[idx[i]] - n1);
      const Integer num = a + d * n1;
      const Integer g = gcd(num, d);
      FaltingsSolution sol{num / g, d / g, b, false};
      for (std::size_t i = 0; i < 6; ++i) {
        const Integer term = a + d * block[idx[i]];
        sol.product_zero = sol.product_zero || term == 0;
        // d (p/q + b_i) = a + n_i d, cleared of the denominator
        if (d * (sol.p + b[i] * sol.q) != term * sol.q) {
          round_trip = false;
          fail("substitution mismatch for n_1=" + std::to_string(n1) + " b=" + detail::tuple_str(b));
        }
      }
      if (!product_is_rational_square(sol.p, sol.q, b)) {
        products_ok = false;
        fail("product not a square for n_1=" + std::to_string(n1) + " b=" + detail::tuple_str(b));
      }
      if (!seen.emplace(sol.p, sol.q, sol.b).second) {
        distinct = false;
        fail("duplicate solution x=" + sol.p.str() + "/" + sol.q.str() + " b=" + detail::tuple_str(b));
      }
      rep.solutions.push_back(std::move(sol));

      int i = 5;
      while (i >= 0 && idx[i] == r - 6 + static_cast<std::size_t>(i)) --i;
      if (i < 0) break;
      ++idx[i];
      for (int t = i + 1; t < 6; ++t) idx[t] = idx[t - 1] + 1;
    }
  }
  rep.distinct_solutions = seen.size();

  const Integer total = rep.positions.size();
  rep.five_k = Integer(5) * rep.k;
  rep.b_used = rep.distinct_solutions;
  rep.final_bound = rep.five_k + rep.b_used;

  auto& v = rep.verdicts;
  v.sizes_sum_to_total = size_sum == rep.positions.size();
  v.per_interval_r_bound = r_bound;
  v.total_le_5k_plus_binomials = total <= rep.five_k + rep.binomial_sum;
  v.binomials_equal_generated = rep.binomial_sum == rep.solutions.size();
  v.generated_distinct = distinct;
  v.products_are_squares = products_ok;
  v.substitution_round_trip = round_trip;
  v.total_le_5k_plus_b = total <= rep.final_bound;
  // k <= N/M + 1  <=>  kM <= N + M
  v.k_le_n_over_m_plus_1 = static_cast<u128>(rep.k) * m <= static_cast<u128>(n) + m;
  if (!v.all()) fail("counting chain failed for a=" + a.str() + " d=" + d.str());

  if (opt.delta) {
    DeltaReport dr;
    dr.delta = *opt.delta;
    dr.m_exceeds_six_over_delta = static_cast<double>(m) * dr.delta > 6.0;
    dr.n_at_least_m_b_plus_5 = Integer(n) >= Integer(m) * (rep.b_used + 5);
    dr.implies_below_delta_n = dr.m_exceeds_six_over_delta && dr.n_at_least_m_b_plus_5;
    rep.delta = dr;
  }
  return rep;
}

/// r <= 5 + C(r, 6) for every 1 <= r <= r_max.
inline bool r_binom_check(std::uint64_t r_max) {
  if (r_max < 1) throw DomainError("r_binom_check: r_max must be >= 1");
  for (std::uint64_t r = 1; r <= r_max; ++r) {
    if (Integer(r) > 5 + binomial(r, 6)) return false;
  }
  return true;
}

}  // namespace apsq

#endif  // APSQ_FALTINGS_HPP
