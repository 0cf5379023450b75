#include <random>

#include <gtest/gtest.h>

#include "apsq/extremal.hpp"

namespace apsq {
namespace {

using Set = std::vector<std::uint64_t>;

// Any four distinct elements forming an AP, by trying all 4-subsets.
bool brute_has_4ap(const Set& s) {
  const std::size_t n = s.size();
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c)
        for (std::size_t d = c + 1; d < n; ++d)
          if (s[b] - s[a] == s[c] - s[b] && s[c] - s[b] == s[d] - s[c]) return true;
  return false;
}

bool mask_has_4ap(std::uint64_t mask, unsigned n) {
  for (unsigned u = 0; u < n; ++u) {
    if (!((mask >> u) & 1)) continue;
    for (unsigned v = 1; u + 3 * v < n; ++v) {
      if (((mask >> (u + v)) & 1) && ((mask >> (u + 2 * v)) & 1) && ((mask >> (u + 3 * v)) & 1)) return true;
    }
  }
  return false;
}

// Exhaustive subset oracle for the largest 4-AP-free subset of [0, n).
std::uint64_t brute_no4ap(unsigned n) {
  std::uint64_t best = 0;
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    const auto size = static_cast<std::uint64_t>(std::popcount(mask));
    if (size > best && !mask_has_4ap(mask, n)) best = size;
  }
  return best;
}

TEST(Find4APInSet, Examples) {
  const auto hit = find_4ap_in_set(Set{0, 2, 4, 6});
  ASSERT_TRUE(hit);
  EXPECT_EQ(*hit, (std::array<std::uint64_t, 4>{0, 2, 4, 6}));
  EXPECT_FALSE(find_4ap_in_set(Set{0, 1, 2, 4}));
  EXPECT_FALSE(find_4ap_in_set(Set{}));
  const std::vector<Integer> big{Integer(1) << 80, (Integer(1) << 80) + 7, (Integer(1) << 80) + 14,
                                 (Integer(1) << 80) + 21};
  EXPECT_TRUE(find_4ap_in_set(big));
}

TEST(Find4APInSet, AgreesWithSubsetOracle) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 3000; ++i) {
    Set s;
    const std::size_t size = rng() % 12;
    for (std::size_t j = 0; j < size; ++j) s.push_back(rng() % 40);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    const auto hit = find_4ap_in_set(s);
    ASSERT_EQ(hit.has_value(), brute_has_4ap(s));
    if (hit) {
      const auto& h = *hit;
      ASSERT_EQ(h[1] - h[0], h[2] - h[1]);
      ASSERT_EQ(h[2] - h[1], h[3] - h[2]);
      ASSERT_GT(h[1], h[0]);
    }
  }
}

bool contains(const FermatScanResult& r, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  return std::find(r.three_aps.begin(), r.three_aps.end(), ThreeSquareAP{a, b, c}) != r.three_aps.end();
}

TEST(FermatScan, Examples) {
  const auto r10 = fermat_scan(10);
  EXPECT_TRUE(contains(r10, 1, 5, 7));
  EXPECT_FALSE(r10.four_ap_found);
  const auto r20 = fermat_scan(20);
  EXPECT_TRUE(contains(r20, 7, 13, 17));
  EXPECT_EQ(ThreeSquareAP({7, 13, 17}).difference(), 120u);
  EXPECT_THROW(fermat_scan(1), DomainError);
}

TEST(FermatScan, CensusMatchesDirectEnumeration) {
  const auto r = fermat_scan(300);
  std::size_t count = 0;
  for (std::uint64_t b = 2; b <= 300; ++b)
    for (std::uint64_t a = 1; a < b; ++a)
      for (std::uint64_t c = b + 1; c * c <= 2 * b * b; ++c)
        if (a * a + c * c == 2 * b * b) ++count;
  EXPECT_EQ(r.three_ap_census(), count);
}

TEST(FermatScan, DoublingNeverFindsFourTermsAndCensusGrows) {
  std::size_t prev = 0;
  for (std::uint64_t b = 50; b <= 3200; b *= 2) {
    const auto r = fermat_scan(b);
    EXPECT_FALSE(r.four_ap_found) << b;
    EXPECT_GE(r.three_ap_census(), prev);
    prev = r.three_ap_census();
  }
}

TEST(FermatScan, ThreadCountDoesNotChangeResult) {
  const auto a = fermat_scan(1500, 1);
  const auto b = fermat_scan(1500, 7);
  EXPECT_EQ(a.three_aps, b.three_aps);
}

// Brute force over every AP with step <= d_max and terms in [0, top].
StepBest brute_step(std::uint64_t n, std::uint64_t d, std::uint64_t top) {
  StepBest best;
  for (std::uint64_t a = 0; a + (n - 1) * d <= top; ++a) {
    std::uint64_t c = 0;
    for (std::uint64_t i = 0; i < n; ++i) c += is_square(a + i * d);
    if (c > best.count) best = {c, a};
  }
  return best;
}

TEST(QnLowerSearch, MatchesBruteForceBox) {
  for (std::uint64_t n : {2u, 3u, 4u, 5u, 6u, 9u}) {
    const auto r = qn_lower_search(n, 30, 100);
    std::uint64_t best = 0, best_d = 0;
    for (std::uint64_t d = 1; d <= 30; ++d) {
      const StepBest s = brute_step(n, d, 10000);
      ASSERT_EQ(r.per_step[d - 1].count, s.count) << "n=" << n << " d=" << d;
      ASSERT_EQ(r.per_step[d - 1].first, s.first) << "n=" << n << " d=" << d;
      if (s.count > best) best = s.count, best_d = d;
    }
    EXPECT_EQ(r.best_count, best);
    EXPECT_EQ(r.witness.step, best_d);
  }
}

TEST(QnLowerSearch, Examples) {
  const auto r4 = qn_lower_search(4, 30, 100);
  EXPECT_EQ(r4.best_count, 3u);
  // Smallest step wins ties: 1, 9, 17, 25 (d = 8) comes before 1, 25, 49, 73 (d = 24).
  EXPECT_EQ(r4.witness.step, 8u);
  EXPECT_EQ(r4.witness.first, 1u);
  EXPECT_EQ(r4.per_step[23].count, 3u);
  EXPECT_EQ(r4.per_step[23].first, 1u);
  for (std::uint64_t d = 1; d <= 30; ++d) {
    if (d != 8 && d != 24) EXPECT_LE(r4.per_step[d - 1].count, 2u) << d;
  }

  EXPECT_EQ(qn_lower_search(2, 5, 10).best_count, 2u);
  EXPECT_EQ(qn_lower_search(2, 1, 1).best_count, 2u);

  const auto r5 = qn_lower_search(5, 30, 100);
  EXPECT_EQ(r5.best_count, 3u);
  EXPECT_LE(r5.best_count, no4ap_max(5).max_size);
}

TEST(QnLowerSearch, WitnessReverifiesAndIsFourAPFree) {
  for (std::uint64_t n = 2; n <= 60; n += 3) {
    const auto r = qn_lower_search(n, 120, 400);
    const auto again = square_positions_naive(AP(r.witness.first, r.witness.step, n));
    EXPECT_EQ(again.count(), r.best_count);
    EXPECT_FALSE(find_4ap_in_set(again.positions));
    EXPECT_LE(Integer(r.best_count), fermat_upper_bound(n));
  }
}

TEST(QnLowerSearch, MonotoneInBox) {
  for (std::uint64_t n : {5u, 12u, 30u}) {
    std::uint64_t prev = 0;
    for (std::uint64_t d_max : {5u, 20u, 60u, 200u}) {
      const auto c = qn_lower_search(n, d_max, 300).best_count;
      EXPECT_GE(c, prev);
      prev = c;
    }
    prev = 0;
    for (std::uint64_t x_max : {10u, 50u, 200u, 800u}) {
      const auto c = qn_lower_search(n, 60, x_max).best_count;
      EXPECT_GE(c, prev);
      prev = c;
    }
  }
}

TEST(QnLowerSearch, DeterministicAcrossThreads) {
  const auto a = qn_lower_search(25, 300, 500, 1);
  const auto b = qn_lower_search(25, 300, 500, 6);
  EXPECT_EQ(a.best_count, b.best_count);
  EXPECT_EQ(a.witness.step, b.witness.step);
  EXPECT_EQ(a.witness.first, b.witness.first);
}

TEST(No4APMax, Examples) {
  EXPECT_EQ(no4ap_max(4).max_size, 3u);
  EXPECT_EQ(no4ap_max(5).max_size, 4u);
  EXPECT_EQ(no4ap_max(1).max_size, 1u);
  EXPECT_TRUE(no4ap_max(5).optimal);
  EXPECT_THROW(no4ap_max(0), DomainError);
  EXPECT_THROW(no4ap_max(65), DomainError);
}

TEST(No4APMax, MatchesSubsetOracle) {
  // Exhaustive values for N = 1..18, frozen from an independent enumeration.
  const std::vector<std::uint64_t> frozen{1, 2, 3, 3, 4, 5, 5, 6, 7, 8, 8, 8, 9, 9, 10, 10, 11, 11};
  const auto table = no4ap_table(20);
  for (unsigned n = 1; n <= 20; ++n) {
    const auto expected = brute_no4ap(n);
    EXPECT_EQ(table[n - 1].max_size, expected) << n;
    if (n <= frozen.size()) EXPECT_EQ(expected, frozen[n - 1]) << n;
  }
}

TEST(No4APMax, WitnessesAndMonotonicity) {
  const auto table = no4ap_table(40);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto& r = table[i];
    EXPECT_TRUE(r.optimal);
    EXPECT_EQ(r.witness.size(), r.max_size);
    EXPECT_FALSE(find_4ap_in_set(r.witness));
    for (auto x : r.witness) EXPECT_LT(x, r.n);
    if (i) {
      EXPECT_GE(r.max_size, table[i - 1].max_size);
      EXPECT_LE(r.max_size, table[i - 1].max_size + 1);
    }
  }
}

TEST(No4APMax, ThreadCountDoesNotChangeWitness) {
  No4APOptions one, many;
  one.threads = 1;
  many.threads = 8;
  const auto a = no4ap_max(36, one);
  const auto b = no4ap_max(36, many);
  EXPECT_EQ(a.max_size, b.max_size);
  EXPECT_EQ(a.witness, b.witness);
}

TEST(No4APMax, BudgetExhaustionReportsLowerBound) {
  No4APOptions opt;
  opt.node_budget = 5;
  const auto r = no4ap_max(30, opt);
  EXPECT_FALSE(r.optimal);
  EXPECT_LE(r.max_size, no4ap_max(30).max_size);
  EXPECT_FALSE(find_4ap_in_set(r.witness));
}

TEST(FermatUpperBound, Examples) {
  EXPECT_EQ(fermat_upper_bound(4), 3);
  EXPECT_EQ(fermat_upper_bound(1), 1);
  EXPECT_EQ(fermat_upper_bound(99), 75);
  EXPECT_THROW(fermat_upper_bound(0), DomainError);
}

}  // namespace
}  // namespace apsq
