#ifndef APSQ_INTEGER_HPP
#define APSQ_INTEGER_HPP

#include <bit>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace apsq {

/// Exact signed integer of unbounded magnitude. Every quantity that can
/// grow with the inputs is carried in this type.
using Integer = boost::multiprecision::cpp_int;

using u128 = unsigned __int128;
using i128 = __int128;

/// Input outside an operation's mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An internal invariant or caller contract failed. Raised when a result
/// would contradict something that must hold (e.g. a four-square AP).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A configured work budget ran out before the operation finished.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string to_string(const Integer& n) { return n.str(); }

inline std::optional<std::uint64_t> to_u64(const Integer& n) {
  if (n < 0 || n > std::numeric_limits<std::uint64_t>::max()) {
    return std::nullopt;
  }
  return n.convert_to<std::uint64_t>();
}

inline std::optional<std::int64_t> to_i64(const Integer& n) {
  if (n < std::numeric_limits<std::int64_t>::min() ||
      n > std::numeric_limits<std::int64_t>::max()) {
    return std::nullopt;
  }
  return n.convert_to<std::int64_t>();
}

inline Integer from_u128(u128 v) {
  Integer r = static_cast<std::uint64_t>(v >> 64);
  r <<= 64;
  r += static_cast<std::uint64_t>(v);
  return r;
}

inline Integer from_i128(i128 v) {
  return v < 0 ? Integer(-from_u128(static_cast<u128>(-(v + 1)) + 1))
               : from_u128(static_cast<u128>(v));
}

/// Checked fixed-width helpers. They return nullopt instead of wrapping.
inline std::optional<std::uint64_t> checked_mul(std::uint64_t a,
                                                std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_mul_overflow(a, b, &r)) return std::nullopt;
  return r;
}

inline std::optional<std::uint64_t> checked_add(std::uint64_t a,
                                                std::uint64_t b) {
  std::uint64_t r;
  if (__builtin_add_overflow(a, b, &r)) return std::nullopt;
  return r;
}

// ---------------------------------------------------------------------------
// Integer square roots

/// floor(sqrt(n)) for 64-bit n. The floating seed is corrected exactly.
constexpr std::uint64_t isqrt(std::uint64_t n) noexcept {
  if (n < 2) return n;
  std::uint64_t r;
  if (std::is_constant_evaluated()) {
    // Newton from an overestimate.
    r = std::uint64_t{1} << ((std::bit_width(n) + 1) / 2);
    for (;;) {
      std::uint64_t y = (r + n / r) / 2;
      if (y >= r) break;
      r = y;
    }
  } else {
    r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  }
  while (static_cast<u128>(r) * r > n) --r;
  while (static_cast<u128>(r + 1) * (r + 1) <= n) ++r;
  return r;
}

/// floor(sqrt(n)) for 128-bit n; long double seed, exact correction.
inline u128 isqrt(u128 n) noexcept {
  if (n <= std::numeric_limits<std::uint64_t>::max()) {
    return isqrt(static_cast<std::uint64_t>(n));
  }
  constexpr u128 kMaxRoot = std::numeric_limits<std::uint64_t>::max();
  long double seed = std::sqrt(static_cast<long double>(n));
  u128 r = seed >= 18446744073709551615.0L ? kMaxRoot : static_cast<u128>(seed);
  while (r * r > n) --r;
  while (r < kMaxRoot && (r + 1) * (r + 1) <= n) ++r;
  return r;
}

/// floor(sqrt(n)) for n >= 0, exact for any magnitude.
inline Integer isqrt(const Integer& n) {
  if (n < 0) throw DomainError("isqrt: negative argument " + n.str());
  if (auto small = to_u64(n)) return Integer(isqrt(*small));
  // Newton iteration starting above the root.
  std::size_t bits = boost::multiprecision::msb(n) + 1;
  Integer x = Integer(1) << ((bits + 1) / 2);
  for (;;) {
    Integer y = (x + n / x) >> 1;
    if (y >= x) break;
    x = std::move(y);
  }
  while (x * x > n) --x;
  while ((x + 1) * (x + 1) <= n) ++x;
  return x;
}

/// ceil(sqrt(n)) for n >= 0.
inline Integer isqrt_ceil(const Integer& n) {
  Integer r = isqrt(n);
  return r * r == n ? r : r + 1;
}

namespace detail {

// Quadratic-residue filters: bit r set iff r is a square modulo m.
struct ResidueFilter {
  std::uint64_t mod64 = 0;
  std::uint64_t mod63 = 0;
  std::uint64_t mod65_lo = 0, mod65_hi = 0;
  std::uint32_t mod11 = 0;

  constexpr ResidueFilter() {
    for (std::uint64_t i = 0; i < 64; ++i) mod64 |= std::uint64_t{1} << (i * i % 64);
    for (std::uint64_t i = 0; i < 63; ++i) mod63 |= std::uint64_t{1} << (i * i % 63);
    for (std::uint64_t i = 0; i < 65; ++i) {
      std::uint64_t r = i * i % 65;
      if (r < 64) mod65_lo |= std::uint64_t{1} << r;
      else mod65_hi |= std::uint64_t{1} << (r - 64);
    }
    for (std::uint32_t i = 0; i < 11; ++i) mod11 |= std::uint32_t{1} << (i * i % 11);
  }

  // n is any value congruent to the candidate modulo 45045 = 63 * 65 * 11.
  constexpr bool maybe_square_odd(std::uint64_t n) const noexcept {
    if (!((mod63 >> (n % 63)) & 1)) return false;
    std::uint64_t r65 = n % 65;
    if (!(r65 < 64 ? (mod65_lo >> r65) & 1 : (mod65_hi >> (r65 - 64)) & 1)) {
      return false;
    }
    return (mod11 >> (n % 11)) & 1;
  }

  constexpr bool maybe_square(std::uint64_t n) const noexcept {
    return ((mod64 >> (n & 63)) & 1) && maybe_square_odd(n);
  }
};

inline constexpr ResidueFilter kResidueFilter{};

}  // namespace detail

/// 0 is a square; so is every k*k.
inline bool is_square(std::uint64_t n) noexcept {
  if (!detail::kResidueFilter.maybe_square(n)) return false;
  std::uint64_t r = isqrt(n);
  return r * r == n;
}

inline bool is_square(std::int64_t n) noexcept {
  return n >= 0 && is_square(static_cast<std::uint64_t>(n));
}

inline bool is_square(u128 n) noexcept {
  if (!((detail::kResidueFilter.mod64 >> static_cast<unsigned>(n & 63)) & 1)) {
    return false;
  }
  // 45045 = 63 * 65 * 11
  const auto r = static_cast<std::uint64_t>(n % 45045);
  if (!detail::kResidueFilter.maybe_square_odd(r)) return false;
  u128 root = isqrt(n);
  return root * root == n;
}

/// Negative integers are never squares.
inline bool is_square(const Integer& n) {
  if (n < 0) return false;
  if (auto small = to_u64(n)) return is_square(*small);
  unsigned low = (n & 63).convert_to<unsigned>();
  if (!((detail::kResidueFilter.mod64 >> low) & 1)) return false;
  Integer r = isqrt(n);
  return r * r == n;
}

inline Integer gcd(const Integer& a, const Integer& b) {
  return boost::multiprecision::gcd(a, b);
}

/// C(n, r) exactly; zero when r > n.
inline Integer binomial(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  Integer acc = 1;
  for (std::uint64_t i = 0; i < r; ++i) {
    acc *= n - i;
    acc /= i + 1;
  }
  return acc;
}

}  // namespace apsq

#endif  // APSQ_INTEGER_HPP
