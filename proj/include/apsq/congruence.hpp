#ifndef APSQ_CONGRUENCE_HPP
#define APSQ_CONGRUENCE_HPP

#include <algorithm>
#include <vector>

#include "apsq/factor.hpp"
#include "apsq/integer.hpp"

namespace apsq {

/// Every x in [0, modulus) with x^2 = c (mod modulus), sorted, no repeats.
struct ResidueClasses {
  Integer modulus;
  std::vector<Integer> roots;
};

namespace detail {

inline Integer mod_floor(const Integer& a, const Integer& m) {
  Integer r = a % m;
  if (r < 0) r += m;
  return r;
}

inline Integer mod_inverse(const Integer& a, const Integer& m) {
  Integer old_r = mod_floor(a, m), r = m;
  Integer old_s = 1, s = 0;
  while (r != 0) {
    Integer q = old_r / r;
    Integer t = old_r - q * r;
    old_r = std::move(r);
    r = std::move(t);
    t = old_s - q * s;
    old_s = std::move(s);
    s = std::move(t);
  }
  if (old_r != 1) throw DomainError("mod_inverse: not invertible");
  return mod_floor(old_s, m);
}

// Square root of a quadratic residue c modulo an odd prime p.
inline Integer tonelli_shanks(const Integer& c, const Integer& p) {
  using boost::multiprecision::powm;
  Integer n = mod_floor(c, p);
  if (n == 0) return 0;
  if (p % 4 == 3) return powm(n, (p + 1) / 4, p);
  Integer q = p - 1;
  std::size_t s = boost::multiprecision::lsb(q);
  q >>= s;
  Integer z = 2;
  while (powm(z, (p - 1) / 2, p) != p - 1) ++z;
  Integer m = s;
  Integer cc = powm(z, q, p);
  Integer t = powm(n, q, p);
  Integer r = powm(n, (q + 1) / 2, p);
  while (t != 1) {
    std::size_t i = 0;
    Integer tt = t;
    while (tt != 1) {
      tt = tt * tt % p;
      ++i;
    }
    Integer b = cc;
    for (Integer j = m - i - 1; j > 0; --j) b = b * b % p;
    m = i;
    cc = b * b % p;
    t = t * cc % p;
    r = r * b % p;
  }
  return r;
}

// Roots of x^2 = c mod p^f for c a unit modulo p.
inline std::vector<Integer> unit_roots(const Integer& c, const Integer& p, std::uint32_t f) {
  using boost::multiprecision::pow;
  const Integer pf = pow(p, f);
  const Integer cm = mod_floor(c, pf);
  if (p == 2) {
    if (f == 1) return {1};
    if (f == 2) return cm % 4 == 1 ? std::vector<Integer>{1, 3} : std::vector<Integer>{};
    if (cm % 8 != 1) return {};
    Integer r = 1;
    for (std::uint32_t i = 3; i < f; ++i) {
      Integer next = Integer(1) << (i + 1);
      if (mod_floor(r * r - cm, next) != 0) r += Integer(1) << (i - 1);
    }
    Integer half = Integer(1) << (f - 1);
    std::vector<Integer> out{r, pf - r, mod_floor(r + half, pf), mod_floor(pf - r + half, pf)};
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  if (boost::multiprecision::powm(mod_floor(cm, p), (p - 1) / 2, p) != 1) return {};
  Integer r = tonelli_shanks(cm, p);
  // Quadratic Hensel lifting; 2r stays a unit.
  Integer mod = p;
  while (mod < pf) {
    mod = std::min<Integer>(mod * mod, pf);
    Integer fx = r * r - cm;
    r = mod_floor(r - fx * mod_inverse(2 * r, mod), mod);
  }
  Integer other = pf - r;
  if (other < r) std::swap(r, other);
  return {r, other};
}

// Roots of x^2 = c mod p^e for arbitrary c.
inline std::vector<Integer> prime_power_roots(const Integer& c, const Integer& p, std::uint32_t e) {
  using boost::multiprecision::pow;
  const Integer pe = pow(p, e);
  Integer cm = mod_floor(c, pe);
  std::vector<Integer> out;
  if (cm == 0) {
    Integer stride = pow(p, (e + 1) / 2);
    for (Integer x = 0; x < pe; x += stride) out.push_back(x);
    return out;
  }
  std::uint32_t v = 0;
  while (cm % p == 0) {
    cm /= p;
    ++v;
  }
  if (v & 1) return out;
  const std::uint32_t h = v / 2;
  const std::uint32_t f = e - v;
  const Integer ph = pow(p, h);
  const Integer pf = pow(p, f);
  for (const Integer& y0 : unit_roots(cm, p, f)) {
    for (Integer t = 0; t < ph; ++t) out.push_back(mod_floor(ph * (y0 + t * pf), pe));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

/// Solves x^2 = c (mod m) given the factorization of m: per prime power,
/// then combined by the Chinese Remainder Theorem.
inline ResidueClasses solve_square_congruence(const Integer& c, const Factorization& m) {
  using boost::multiprecision::pow;
  if (m.value < 1) throw DomainError("solve_square_congruence: modulus must be >= 1");
  std::vector<Integer> acc{0};
  Integer acc_mod = 1;
  for (const auto& [p, e] : m.factors) {
    const Integer pe = pow(p, e);
    std::vector<Integer> local = detail::prime_power_roots(c, p, e);
    if (local.empty()) return {m.value, {}};
    const Integer inv = detail::mod_inverse(acc_mod, pe);
    std::vector<Integer> next;
    next.reserve(acc.size() * local.size());
    for (const Integer& a : acc) {
      for (const Integer& b : local) {
        next.push_back(a + acc_mod * detail::mod_floor((b - a) * inv, pe));
      }
    }
    acc = std::move(next);
    acc_mod *= pe;
  }
  std::sort(acc.begin(), acc.end());
  return {m.value, std::move(acc)};
}

inline ResidueClasses solve_square_congruence(const Integer& c, const Integer& m,
                                              const FactorOptions& opt = {}) {
  if (m < 1) throw DomainError("solve_square_congruence: modulus must be >= 1, got " + m.str());
  return solve_square_congruence(c, factorize(m, opt));
}

}  // namespace apsq

#endif  // APSQ_CONGRUENCE_HPP
