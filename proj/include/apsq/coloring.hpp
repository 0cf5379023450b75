#ifndef APSQ_COLORING_HPP
#define APSQ_COLORING_HPP

#include <atomic>
#include <cstdint>
#include <optional>
#include <vector>

#include "apsq/factor.hpp"
#include "apsq/integer.hpp"
#include "apsq/parallel.hpp"

namespace apsq {

/// Exponent parities over the first k primes: bit j is v_{p_j}(n) mod 2.
struct ParityColor {
  std::vector<std::uint8_t> bits;

  [[nodiscard]] std::size_t k() const { return bits.size(); }

  /// Packed form, bit j of the mask is bits[j]. Requires k <= 64.
  [[nodiscard]] std::uint64_t mask() const {
    if (bits.size() > 64) throw DomainError("ParityColor::mask: k > 64");
    std::uint64_t m = 0;
    for (std::size_t j = 0; j < bits.size(); ++j) m |= std::uint64_t{bits[j]} << j;
    return m;
  }

  static ParityColor from_mask(std::uint64_t mask, std::size_t k) {
    ParityColor c;
    c.bits.resize(k);
    for (std::size_t j = 0; j < k; ++j) c.bits[j] = (mask >> j) & 1;
    return c;
  }

  friend bool operator==(const ParityColor&, const ParityColor&) = default;
};

inline ParityColor parity_color(const Integer& n, std::size_t k) {
  if (n <= 0) throw DomainError("parity_color: n must be >= 1, got " + n.str());
  if (k < 1) throw DomainError("parity_color: k must be >= 1");
  ParityColor c;
  c.bits.reserve(k);
  for (std::uint64_t p : first_primes(k)) {
    std::uint8_t parity = 0;
    Integer m = n;
    while (m % p == 0) {
      m /= p;
      parity ^= 1;
    }
    c.bits.push_back(parity);
  }
  return c;
}

/// A, A+D, ..., A+(length-1)D all colored `color`.
struct MonoAP {
  Integer A;
  Integer D;
  std::uint64_t length = 0;
  ParityColor color;

  friend bool operator==(const MonoAP&, const MonoAP&) = default;
};

/// Colors and p_k-smoothness flags for 1..N, computed by sieving.
class ColorTable {
 public:
  ColorTable(std::uint64_t n, std::size_t k) : n_(n), k_(k), mask_(n + 1, 0), smooth_(n + 1, 0) {
    if (k < 1 || k > 64) throw DomainError("ColorTable: k must be in [1, 64]");
    primes_ = first_primes(k);
    std::vector<std::uint64_t> rest(n + 1);
    for (std::uint64_t i = 0; i <= n; ++i) rest[i] = i;
    for (std::size_t j = 0; j < k; ++j) {
      const std::uint64_t p = primes_[j];
      for (std::uint64_t m = p; m <= n; m += p) {
        std::uint64_t parity = 0;
        while (rest[m] % p == 0) {
          rest[m] /= p;
          parity ^= 1;
        }
        mask_[m] |= parity << j;
      }
    }
    for (std::uint64_t i = 1; i <= n; ++i) smooth_[i] = rest[i] == 1;
  }

  [[nodiscard]] std::uint64_t size() const { return n_; }
  [[nodiscard]] std::size_t k() const { return k_; }
  [[nodiscard]] const std::vector<std::uint64_t>& primes() const { return primes_; }
  [[nodiscard]] std::uint64_t mask(std::uint64_t i) const { return mask_[i]; }
  [[nodiscard]] bool smooth(std::uint64_t i) const { return smooth_[i] != 0; }

  /// True when a, a+d, ..., a+(len-1)d share one color (all terms <= N).
  [[nodiscard]] bool monochromatic(std::uint64_t a, std::uint64_t d, std::uint64_t len) const {
    const std::uint64_t c = mask_[a];
    for (std::uint64_t i = 1; i < len; ++i) {
      if (mask_[a + i * d] != c) return false;
    }
    return true;
  }

  [[nodiscard]] MonoAP make(std::uint64_t a, std::uint64_t d, std::uint64_t len) const {
    return {Integer(a), Integer(d), len, ParityColor::from_mask(mask_[a], k_)};
  }

 private:
  std::uint64_t n_;
  std::size_t k_;
  std::vector<std::uint64_t> primes_;
  std::vector<std::uint64_t> mask_;
  std::vector<std::uint8_t> smooth_;
};

/// Lexicographically smallest (D, A) with A >= 1, D >= 1, A+(len-1)D <= N and
/// one color on every term. D-stripes are scanned in parallel; the smallest
/// hit wins, so the answer does not depend on `threads`.
inline std::optional<MonoAP> find_mono_ap(const ColorTable& table, std::uint64_t len,
                                          unsigned threads = 0) {
  if (len < 3) throw DomainError("find_mono_ap: length must be >= 3");
  const std::uint64_t n = table.size();
  if (n < len) return std::nullopt;
  const std::uint64_t d_max = (n - 1) / (len - 1);
  const auto stripes = split_range(1, d_max + 1, 16);
  std::vector<std::optional<std::pair<std::uint64_t, std::uint64_t>>> hits(stripes.size());
  std::atomic<std::size_t> first_hit{stripes.size()};
  parallel_for(stripes.size(), threads, [&](std::size_t s) {
    if (first_hit.load(std::memory_order_relaxed) < s) return;
    for (std::uint64_t d = stripes[s].begin; d < stripes[s].end; ++d) {
      const std::uint64_t span = (len - 1) * d;
      for (std::uint64_t a = 1; a + span <= n; ++a) {
        if (table.monochromatic(a, d, len)) {
          hits[s] = {d, a};
          std::size_t cur = first_hit.load();
          while (s < cur && !first_hit.compare_exchange_weak(cur, s)) {
          }
          return;
        }
      }
    }
  });
  for (const auto& h : hits) {
    if (h) return table.make(h->second, h->first, len);
  }
  return std::nullopt;
}

inline std::optional<MonoAP> find_mono_ap(std::uint64_t n, std::uint64_t len, std::size_t k,
                                          unsigned threads = 0) {
  if (n < len) return std::nullopt;
  return find_mono_ap(ColorTable(n, k), len, threads);
}

/// Calls visit(a, d) for every monochromatic AP of the given length in [1, N],
/// in (d, a) order.
template <typename Visit>
void for_each_mono_ap(const ColorTable& table, std::uint64_t len, Visit&& visit) {
  const std::uint64_t n = table.size();
  if (n < len || len < 2) return;
  for (std::uint64_t d = 1; (len - 1) * d < n; ++d) {
    for (std::uint64_t a = 1; a + (len - 1) * d <= n; ++a) {
      if (table.monochromatic(a, d, len)) visit(a, d);
    }
  }
}

/// Monochromatic AP whose terms are all p_k-smooth, searched over pairs of
/// smooth numbers. Such an AP would give len squares in AP after dividing by
/// the color's kernel, so for len >= 4 this must come back empty.
inline std::optional<MonoAP> find_smooth_mono_ap(const ColorTable& table, std::uint64_t len) {
  std::vector<std::uint64_t> smooth;
  for (std::uint64_t i = 1; i <= table.size(); ++i) {
    if (table.smooth(i)) smooth.push_back(i);
  }
  for (std::size_t i = 0; i < smooth.size(); ++i) {
    for (std::size_t j = i + 1; j < smooth.size(); ++j) {
      const std::uint64_t a = smooth[i];
      const std::uint64_t d = smooth[j] - a;
      if (a + (len - 1) * d > table.size()) break;
      bool ok = true;
      for (std::uint64_t t = 1; t < len && ok; ++t) ok = table.smooth(a + t * d);
      if (ok && table.monochromatic(a, d, len)) return table.make(a, d, len);
    }
  }
  return std::nullopt;
}

struct TermWitness {
  Integer term;
  bool smooth = false;
  bool parity_even_after_R = false;
};

struct WitnessReport {
  Integer R;
  bool divides_A = false;
  bool divides_D = false;
  std::vector<TermWitness> per_term;
  bool all_terms_smooth = false;
};

/// Replays the divisibility chain for a monochromatic AP: the color's kernel R
/// divides every term and D, and each term / R has even valuations at
/// p_1..p_k. Throws ContractViolation if some term has a different color.
inline WitnessReport witness_check(const MonoAP& m, std::size_t k) {
  if (m.A < 1 || m.D < 1 || m.length < 2) {
    throw ContractViolation("witness_check: malformed MonoAP");
  }
  if (m.color.k() != k) throw ContractViolation("witness_check: color has wrong length");
  const auto primes = first_primes(k);
  WitnessReport out;
  out.R = 1;
  for (std::size_t j = 0; j < k; ++j) {
    if (m.color.bits[j]) out.R *= primes[j];
  }
  out.all_terms_smooth = true;
  for (std::uint64_t i = 0; i < m.length; ++i) {
    const Integer term = m.A + m.D * i;
    if (parity_color(term, k) != m.color) {
      throw ContractViolation("witness_check: term " + term.str() + " does not have the AP's color");
    }
    TermWitness w{term, false, false};
    if (term % out.R == 0) {
      Integer q = term / out.R;
      bool even = true;
      for (std::uint64_t p : primes) {
        std::uint32_t v = 0;
        while (q % p == 0) {
          q /= p;
          ++v;
        }
        even = even && (v % 2 == 0);
      }
      w.parity_even_after_R = even;
      w.smooth = q == 1;
    }
    out.all_terms_smooth = out.all_terms_smooth && w.smooth;
    out.per_term.push_back(std::move(w));
  }
  out.divides_A = m.A % out.R == 0;
  out.divides_D = m.D % out.R == 0;
  return out;
}

}  // namespace apsq

#endif  // APSQ_COLORING_HPP
