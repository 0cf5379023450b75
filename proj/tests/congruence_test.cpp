#include <random>

#include <gtest/gtest.h>

#include "apsq/congruence.hpp"

namespace apsq {
namespace {

std::vector<Integer> brute_roots(std::uint64_t c, std::uint64_t m) {
  std::vector<Integer> out;
  for (std::uint64_t x = 0; x < m; ++x) {
    if (x * x % m == c % m) out.emplace_back(x);
  }
  return out;
}

std::vector<Integer> ints(std::initializer_list<int> v) { return {v.begin(), v.end()}; }

TEST(SolveSquareCongruence, Examples) {
  EXPECT_EQ(solve_square_congruence(1, 24).roots, ints({1, 5, 7, 11, 13, 17, 19, 23}));
  EXPECT_EQ(solve_square_congruence(0, 4).roots, ints({0, 2}));
  EXPECT_TRUE(solve_square_congruence(2, 4).roots.empty());
  EXPECT_EQ(solve_square_congruence(5, 1).roots, ints({0}));
  EXPECT_THROW(solve_square_congruence(1, 0), DomainError);
}

TEST(SolveSquareCongruence, NegativeResidueReduces) {
  EXPECT_EQ(solve_square_congruence(-1, 5).roots, ints({2, 3}));
  EXPECT_EQ(solve_square_congruence(-23, 24).roots, solve_square_congruence(1, 24).roots);
}

TEST(SolveSquareCongruence, MatchesBruteForceForSmallModuli) {
  for (std::uint64_t m = 1; m <= 300; ++m) {
    const auto fm = factorize(m);
    for (std::uint64_t c = 0; c < m; ++c) {
      ASSERT_EQ(solve_square_congruence(c, fm).roots, brute_roots(c, m)) << c << " mod " << m;
    }
  }
}

TEST(SolveSquareCongruence, HighPrimePowers) {
  // 2^k and odd prime powers with non-unit residues.
  for (std::uint64_t m : {512ull, 1024ull, 2187ull, 3125ull, 4096ull, 6561ull}) {
    const auto fm = factorize(m);
    for (std::uint64_t c = 0; c < m; c += (c % 7 == 0 ? 1 : 5)) {
      ASSERT_EQ(solve_square_congruence(c, fm).roots, brute_roots(c, m)) << c << " mod " << m;
    }
  }
}

TEST(SolveSquareCongruence, LargeModulusRootsVerify) {
  // A modulus past 64 bits; every root must satisfy the congruence.
  const Integer p("1000000000000000000000007");
  ASSERT_TRUE(is_prime(p));
  const Integer m = p * 8 * 9;
  const Integer c = Integer(123456789) * 123456789 % m;
  const auto r = solve_square_congruence(c, m);
  ASSERT_FALSE(r.roots.empty());
  for (const auto& x : r.roots) ASSERT_EQ(x * x % m, c);
  EXPECT_TRUE(std::is_sorted(r.roots.begin(), r.roots.end()));
  EXPECT_NE(std::find(r.roots.begin(), r.roots.end(), Integer(123456789)), r.roots.end());
}

}  // namespace
}  // namespace apsq
