#include <gtest/gtest.h>

#include "apsq/coloring.hpp"

namespace apsq {
namespace {

using Bits = std::vector<std::uint8_t>;

TEST(ParityColor, Examples) {
  EXPECT_EQ(parity_color(12, 2).bits, (Bits{0, 1}));
  EXPECT_EQ(parity_color(1, 3).bits, (Bits{0, 0, 0}));
  EXPECT_EQ(parity_color(8, 1).bits, (Bits{1}));
  EXPECT_THROW(parity_color(0, 2), DomainError);
  EXPECT_THROW(parity_color(5, 0), DomainError);
}

TEST(ColorTable, MatchesDirectColoring) {
  const ColorTable t(3000, 6);
  for (std::uint64_t n = 1; n <= 3000; ++n) {
    ASSERT_EQ(t.mask(n), parity_color(n, 6).mask()) << n;
    Integer rest = n;
    for (auto p : first_primes(6)) {
      while (rest % p == 0) rest /= p;
    }
    ASSERT_EQ(t.smooth(n), rest == 1) << n;
  }
}

TEST(FindMonoAP, Examples) {
  const auto m = find_mono_ap(7, 4, 1);
  ASSERT_TRUE(m);
  EXPECT_EQ(m->A, 1);
  EXPECT_EQ(m->D, 2);
  EXPECT_EQ(m->color.bits, (Bits{0}));
  EXPECT_FALSE(find_mono_ap(3, 4, 1));
}

TEST(FindMonoAP, RegressionFixtureAt200) {
  const auto m = find_mono_ap(200, 4, 2);
  ASSERT_TRUE(m);
  // 9 = 3^2 has even v3, so 5, 7, 9, 11 all have color (0,0).
  EXPECT_EQ(m->A, 5);
  EXPECT_EQ(m->D, 2);
  EXPECT_EQ(m->color.bits, (Bits{0, 0}));
}

TEST(FindMonoAP, IsLexicographicallySmallest) {
  for (std::size_t k = 1; k <= 4; ++k) {
    const ColorTable t(400, k);
    std::optional<std::pair<std::uint64_t, std::uint64_t>> first;
    for_each_mono_ap(t, 4, [&](std::uint64_t a, std::uint64_t d) {
      if (!first) first = {d, a};
    });
    const auto m = find_mono_ap(t, 4, 3);
    ASSERT_EQ(m.has_value(), first.has_value());
    if (m) {
      EXPECT_EQ(m->D, first->first);
      EXPECT_EQ(m->A, first->second);
    }
  }
}

TEST(FindMonoAP, DeterministicAcrossThreadCounts) {
  const ColorTable t(20000, 6);
  const auto a = find_mono_ap(t, 5, 1);
  const auto b = find_mono_ap(t, 5, 8);
  ASSERT_TRUE(a && b);
  EXPECT_EQ(*a, *b);
}

TEST(WitnessCheck, Examples) {
  const MonoAP m{1, 2, 4, ParityColor{{0}}};
  const auto w = witness_check(m, 1);
  EXPECT_EQ(w.R, 1);
  EXPECT_TRUE(w.divides_A);
  EXPECT_TRUE(w.divides_D);
  for (const auto& t : w.per_term) EXPECT_TRUE(t.parity_even_after_R);
  EXPECT_FALSE(w.all_terms_smooth);
  EXPECT_TRUE(w.per_term[0].smooth);
  EXPECT_FALSE(w.per_term[1].smooth);

  // v2(4) = 2 but v2(8) = 3: not monochromatic.
  EXPECT_THROW(witness_check(MonoAP{4, 4, 2, ParityColor{{0}}}, 1), ContractViolation);
  EXPECT_THROW(witness_check(m, 2), ContractViolation);
}

TEST(WitnessCheck, KernelNontrivial) {
  // 2 * {1, 25, 49}
  const MonoAP m{2, 48, 3, parity_color(2, 3)};
  const auto w = witness_check(m, 3);
  EXPECT_EQ(w.R, 2);
  EXPECT_TRUE(w.divides_A && w.divides_D);
  for (const auto& t : w.per_term) EXPECT_TRUE(t.parity_even_after_R);
  // 98 = 2 * 7^2 is not 5-smooth
  EXPECT_FALSE(w.all_terms_smooth);
}

// Every monochromatic 4-AP in a window: R divides the terms and D, and the
// quotients have even valuations; none is made entirely of smooth terms.
TEST(Invariants, AllMonochromaticFourAPsInSmallWindows) {
  for (std::size_t k = 1; k <= 6; ++k) {
    const ColorTable t(600, k);
    std::size_t seen = 0;
    for_each_mono_ap(t, 4, [&](std::uint64_t a, std::uint64_t d) {
      if (seen++ % 37 != 0) return;  // witness_check is slow; sample
      const auto w = witness_check(t.make(a, d, 4), k);
      ASSERT_TRUE(w.divides_A && w.divides_D);
      for (const auto& term : w.per_term) ASSERT_TRUE(term.parity_even_after_R);
      ASSERT_FALSE(w.all_terms_smooth);
    });
    for_each_mono_ap(t, 4, [&](std::uint64_t a, std::uint64_t d) {
      bool all_smooth = true;
      for (int i = 0; i < 4; ++i) all_smooth = all_smooth && t.smooth(a + i * d);
      ASSERT_FALSE(all_smooth) << a << " " << d;
    });
    EXPECT_GT(seen, 0u);
  }
}

TEST(Invariants, NoSmoothMonochromaticFourAP) {
  for (std::size_t k = 1; k <= 6; ++k) {
    const ColorTable t(100000, k);
    EXPECT_FALSE(find_smooth_mono_ap(t, 4)) << "k=" << k;
  }
}

TEST(Invariants, SmoothSearchFindsThreeTermExamples) {
  // 1, 25, 49 are all 7-smooth squares with the trivial color.
  const ColorTable t(100, 4);
  const auto m = find_smooth_mono_ap(t, 3);
  ASSERT_TRUE(m);
  const auto w = witness_check(*m, 4);
  EXPECT_TRUE(w.all_terms_smooth);
}

}  // namespace
}  // namespace apsq
