#ifndef APSQ_FACTOR_HPP
#define APSQ_FACTOR_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "apsq/integer.hpp"

namespace apsq {

// ---------------------------------------------------------------------------
// Prime tables

/// All primes <= limit (sieve of Eratosthenes).
inline std::vector<std::uint32_t> primes_up_to(std::uint32_t limit) {
  std::vector<std::uint32_t> out;
  if (limit < 2) return out;
  std::vector<bool> composite(static_cast<std::size_t>(limit) + 1, false);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return out;
}

inline constexpr std::uint32_t kDefaultTrialBound = 1'000'000;

/// Primes up to the default trial-division bound, built once.
inline const std::vector<std::uint32_t>& prime_table() {
  static const std::vector<std::uint32_t> table = primes_up_to(kDefaultTrialBound);
  return table;
}

/// The first k primes, p_1 = 2.
inline std::vector<std::uint64_t> first_primes(std::size_t k) {
  const auto& table = prime_table();
  if (k <= table.size()) return {table.begin(), table.begin() + static_cast<std::ptrdiff_t>(k)};
  throw DomainError("first_primes: k exceeds the built-in prime table");
}

// ---------------------------------------------------------------------------
// Primality

namespace detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = mulmod(r, b, m);
    b = mulmod(b, b, m);
    e >>= 1;
  }
  return r;
}

inline bool strong_probable_prime(std::uint64_t n, std::uint64_t base) {
  base %= n;
  if (base == 0) return true;
  std::uint64_t d = n - 1;
  int s = std::countr_zero(d);
  d >>= s;
  std::uint64_t x = powmod(base, d, n);
  if (x == 1 || x == n - 1) return true;
  for (int i = 1; i < s; ++i) {
    x = mulmod(x, x, n);
    if (x == n - 1) return true;
  }
  return false;
}

inline bool strong_probable_prime(const Integer& n, const Integer& base) {
  Integer d = n - 1;
  std::size_t s = boost::multiprecision::lsb(d);
  d >>= s;
  Integer x = boost::multiprecision::powm(base, d, n);
  if (x == 1 || x == n - 1) return true;
  for (std::size_t i = 1; i < s; ++i) {
    x = x * x % n;
    if (x == n - 1) return true;
  }
  return false;
}

inline int jacobi(Integer a, Integer n) {
  // n odd and positive
  a %= n;
  if (a < 0) a += n;
  int result = 1;
  while (a != 0) {
    while ((a & 1) == 0) {
      a >>= 1;
      unsigned r = static_cast<unsigned>((n & 7).convert_to<unsigned>());
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, n);
    if ((a & 3) == 3 && (n & 3) == 3) result = -result;
    a %= n;
  }
  return n == 1 ? result : 0;
}

// Strong Lucas probable-prime test with Selfridge parameters.
inline bool strong_lucas_probable_prime(const Integer& n) {
  if (is_square(n)) return false;
  Integer D = 5;
  for (;;) {
    int j = jacobi(D, n);
    if (j == -1) break;
    if (j == 0 && boost::multiprecision::abs(D) != n) return false;
    D = D > 0 ? Integer(-(D + 2)) : Integer(-D + 2);
  }
  const Integer P = 1;
  const Integer Q = (1 - D) / 4;
  auto mod = [&n](Integer v) {
    v %= n;
    if (v < 0) v += n;
    return v;
  };
  Integer d = n + 1;
  std::size_t s = boost::multiprecision::lsb(d);
  d >>= s;
  // Binary Lucas chain computing U_d, V_d, Q^d.
  Integer U = 0, V = 2, Qk = 1;
  const Integer inv2 = (n + 1) / 2;
  std::size_t bits = boost::multiprecision::msb(d) + 1;
  for (std::size_t i = bits; i-- > 0;) {
    // double
    U = mod(U * V);
    V = mod(V * V - 2 * Qk);
    Qk = mod(Qk * Qk);
    if (boost::multiprecision::bit_test(d, i)) {
      Integer U2 = mod((P * U + V) * inv2);
      Integer V2 = mod((D * U + P * V) * inv2);
      U = std::move(U2);
      V = std::move(V2);
      Qk = mod(Qk * Q);
    }
  }
  if (U == 0 || V == 0) return true;
  for (std::size_t r = 1; r < s; ++r) {
    V = mod(V * V - 2 * Qk);
    Qk = mod(Qk * Qk);
    if (V == 0) return true;
  }
  return false;
}

}  // namespace detail

/// Deterministic for n < 2^64 (fixed Miller-Rabin base set).
inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  if (n < 37 * 37) return true;
  for (std::uint64_t a : {2ull, 325ull, 9375ull, 28178ull, 450775ull, 9780504ull,
                          1795265022ull}) {
    if (!detail::strong_probable_prime(n, a)) return false;
  }
  return true;
}

/// Deterministic below 3.3e24 (Miller-Rabin on the primes up to 41); above
/// that, Baillie-PSW, which has no known counterexample.
inline bool is_prime(const Integer& n) {
  if (n < 2) return false;
  if (auto small = to_u64(n)) return is_prime(*small);
  for (std::uint32_t p : prime_table()) {
    if (p > 1000) break;
    if (n % p == 0) return false;
  }
  static const Integer kSorensonWebster("3317044064679887385961981");
  for (int a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41}) {
    if (!detail::strong_probable_prime(n, Integer(a))) return false;
  }
  if (n < kSorensonWebster) return true;
  return detail::strong_lucas_probable_prime(n);
}

// ---------------------------------------------------------------------------
// Factorization

struct PrimePower {
  Integer prime;
  std::uint32_t exponent = 0;

  friend bool operator==(const PrimePower&, const PrimePower&) = default;
};

/// n = prod prime^exponent, primes strictly increasing.
struct Factorization {
  Integer value;
  std::vector<PrimePower> factors;

  [[nodiscard]] Integer recompose() const {
    Integer acc = 1;
    for (const auto& f : factors) acc *= boost::multiprecision::pow(f.prime, f.exponent);
    return acc;
  }
};

struct FactorOptions {
  std::uint32_t trial_bound = kDefaultTrialBound;
  std::uint64_t seed = 0x9e3779b97f4a7c15ull;
  /// Total rho iterations allowed per call; 0 means unlimited.
  std::uint64_t rho_budget = 0;
};

namespace detail {

// Brent's variant of Pollard rho. Returns a nontrivial factor or 0/n on a
// failed cycle; `budget` is decremented per iteration.
template <typename T, typename MulMod>
T rho_brent(const T& n, const T& c, const T& y0, MulMod mulmod,
            std::uint64_t& budget, bool limited) {
  auto gcd_t = [](T a, T b) {
    while (b != 0) {
      T t = a % b;
      a = std::move(b);
      b = std::move(t);
    }
    return a;
  };
  auto absdiff = [](const T& a, const T& b) { return a > b ? T(a - b) : T(b - a); };
  auto step = [&](const T& v) {
    T r = mulmod(v, v);
    T gap = n - c;
    return r >= gap ? T(r - gap) : T(r + c);
  };
  constexpr std::uint64_t kBatch = 128;
  T y = y0, x, ys, q = 1, g = 1;
  std::uint64_t r = 1;
  while (g == 1) {
    x = y;
    for (std::uint64_t i = 0; i < r; ++i) y = step(y);
    std::uint64_t k = 0;
    while (k < r && g == 1) {
      ys = y;
      std::uint64_t lim = std::min(kBatch, r - k);
      for (std::uint64_t i = 0; i < lim; ++i) {
        y = step(y);
        q = mulmod(q, absdiff(x, y));
      }
      if (limited) {
        if (budget < lim) throw BudgetExceeded("factorize: rho budget exhausted");
        budget -= lim;
      }
      g = gcd_t(q, n);
      k += lim;
    }
    r *= 2;
  }
  if (g == n) {
    do {
      ys = step(ys);
      g = gcd_t(absdiff(x, ys), n);
    } while (g == 1);
  }
  return g;
}

inline void split_u64(std::uint64_t n, std::mt19937_64& rng, const FactorOptions& opt,
                      std::uint64_t& budget, std::vector<std::uint64_t>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  if (n % 2 == 0) {
    out.push_back(2);
    split_u64(n / 2, rng, opt, budget, out);
    return;
  }
  if (std::uint64_t r = isqrt(n); r * r == n) {
    std::vector<std::uint64_t> half;
    split_u64(r, rng, opt, budget, half);
    for (auto p : half) out.insert(out.end(), {p, p});
    return;
  }
  auto mm = [n](std::uint64_t a, std::uint64_t b) { return mulmod(a, b, n); };
  for (;;) {
    std::uint64_t c = rng() % (n - 1) + 1;
    std::uint64_t y = rng() % n;
    std::uint64_t g = rho_brent<std::uint64_t>(n, c, y, mm, budget, opt.rho_budget != 0);
    if (g != n && g != 1) {
      split_u64(g, rng, opt, budget, out);
      split_u64(n / g, rng, opt, budget, out);
      return;
    }
  }
}

inline void split_big(const Integer& n, std::mt19937_64& rng, const FactorOptions& opt,
                      std::uint64_t& budget, std::vector<Integer>& out) {
  if (n == 1) return;
  if (auto small = to_u64(n)) {
    std::vector<std::uint64_t> parts;
    split_u64(*small, rng, opt, budget, parts);
    for (auto p : parts) out.emplace_back(p);
    return;
  }
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  if (Integer r = isqrt(n); r * r == n) {
    std::vector<Integer> half;
    split_big(r, rng, opt, budget, half);
    for (auto& p : half) out.insert(out.end(), {p, p});
    return;
  }
  auto mm = [&n](const Integer& a, const Integer& b) { return Integer(a * b % n); };
  for (;;) {
    Integer c = Integer(rng()) % (n - 1) + 1;
    Integer y = Integer(rng()) % n;
    Integer g = rho_brent<Integer>(n, c, y, mm, budget, opt.rho_budget != 0);
    if (g != n && g != 1) {
      split_big(g, rng, opt, budget, out);
      split_big(n / g, rng, opt, budget, out);
      return;
    }
  }
}

}  // namespace detail

/// Complete factorization of n >= 1. Trial division by the prime table, then
/// seeded Brent-Pollard rho on the cofactor; the result depends only on n.
inline Factorization factorize(const Integer& n, const FactorOptions& opt = {}) {
  if (n <= 0) throw DomainError("factorize: argument must be >= 1, got " + n.str());
  Factorization out{n, {}};
  Integer rest = n;

  std::vector<std::uint32_t> local;
  const std::vector<std::uint32_t>* table = &prime_table();
  if (opt.trial_bound != kDefaultTrialBound) {
    local = primes_up_to(opt.trial_bound);
    table = &local;
  }

  if (auto small = to_u64(rest)) {
    std::uint64_t m = *small;
    for (std::uint32_t p : *table) {
      if (static_cast<std::uint64_t>(p) * p > m) break;
      if (m % p) continue;
      std::uint32_t e = 0;
      while (m % p == 0) {
        m /= p;
        ++e;
      }
      out.factors.push_back({Integer(p), e});
    }
    rest = m;
  } else {
    for (std::uint32_t p : *table) {
      if (Integer(p) * p > rest) break;
      if (rest % p != 0) continue;
      std::uint32_t e = 0;
      while (rest % p == 0) {
        rest /= p;
        ++e;
      }
      out.factors.push_back({Integer(p), e});
    }
  }
  if (rest == 1) return out;

  const std::uint64_t last = table->empty() ? 1 : table->back();
  if (Integer(last) * last >= rest || is_prime(rest)) {
    out.factors.push_back({rest, 1});
    return out;
  }

  // Seed from the options and the cofactor only, so results never depend on
  // call order or thread.
  std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                    static_cast<std::uint32_t>(rest.convert_to<std::uint64_t>())};
  std::mt19937_64 rng(seq);
  std::uint64_t budget = opt.rho_budget;
  std::vector<Integer> primes;
  detail::split_big(rest, rng, opt, budget, primes);
  std::sort(primes.begin(), primes.end());
  for (std::size_t i = 0; i < primes.size();) {
    std::size_t j = i;
    while (j < primes.size() && primes[j] == primes[i]) ++j;
    out.factors.push_back({primes[i], static_cast<std::uint32_t>(j - i)});
    i = j;
  }
  return out;
}

/// Largest e with p^e | n.
inline std::uint64_t valuation(const Integer& n, const Integer& p) {
  if (n <= 0) throw DomainError("valuation: n must be >= 1, got " + n.str());
  if (!is_prime(p)) throw DomainError("valuation: " + p.str() + " is not prime");
  std::uint64_t e = 0;
  Integer m = n;
  while (m % p == 0) {
    m /= p;
    ++e;
  }
  return e;
}

/// value = kernel * root^2 with kernel squarefree.
struct SquarefreeDecomposition {
  Integer kernel;
  Integer root;
};

inline SquarefreeDecomposition squarefree_decompose(const Integer& n,
                                                    const FactorOptions& opt = {}) {
  if (n <= 0) throw DomainError("squarefree_decompose: n must be >= 1, got " + n.str());
  SquarefreeDecomposition out{1, 1};
  for (const auto& [p, e] : factorize(n, opt).factors) {
    if (e & 1) out.kernel *= p;
    out.root *= boost::multiprecision::pow(p, e / 2);
  }
  return out;
}

}  // namespace apsq

#endif  // APSQ_FACTOR_HPP
