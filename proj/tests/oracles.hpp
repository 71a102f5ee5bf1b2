#pragma once

// Independent reference implementations used only by the tests. They favour
// obviousness over speed and share no code paths with the library.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include <gmpxx.h>

namespace oracle {

/// Is p/q (0 <= p <= q) in the middle-thirds Cantor set? Digits of the
/// ternary expansion are generated by long division; the remainder sequence
/// is eventually periodic. A terminating expansion ending in digit 1 can be
/// rewritten as ...0222..., so that single trailing 1 is allowed.
inline bool cantor_ternary(std::int64_t p, std::int64_t q) {
  if (p == q) return true;
  if (p == 0) return true;
  std::map<std::int64_t, std::size_t> seen;
  std::vector<int> digits;
  std::int64_t rem = p;
  while (rem != 0 && !seen.count(rem)) {
    seen[rem] = digits.size();
    rem *= 3;
    digits.push_back(static_cast<int>(rem / q));
    rem %= q;
  }
  if (rem == 0) {
    // Terminating: digits d_1..d_k with d_k != 0. A final 1 becomes 0222...
    for (std::size_t i = 0; i + 1 < digits.size(); ++i)
      if (digits[i] == 1) return false;
    return true;
  }
  for (int d : digits)
    if (d == 1) return false;
  return true;
}

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

/// Multiplicative order of b mod q (gcd(q,b)=1). Small moduli iterate b^k
/// directly; larger ones try every divisor of φ(q) in increasing order,
/// with φ and the divisors found by trial division.
inline std::uint64_t brute_order(std::uint64_t q, std::uint64_t b) {
  if (q == 1) return 1;
  if (q <= 2000000) {
    std::uint64_t x = b % q, k = 1;
    while (x != 1) {
      x = mulmod(x, b, q);
      ++k;
    }
    return k;
  }
  std::uint64_t phi = q, n = q;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d) continue;
    phi = phi / d * (d - 1);
    while (n % d == 0) n /= d;
  }
  if (n > 1) phi = phi / n * (n - 1);
  std::vector<std::uint64_t> divs;
  for (std::uint64_t d = 1; d * d <= phi; ++d) {
    if (phi % d) continue;
    divs.push_back(d);
    divs.push_back(phi / d);
  }
  std::sort(divs.begin(), divs.end());
  for (auto d : divs) {
    std::uint64_t r = 1, base = b % q, e = d;
    while (e) {
      if (e & 1) r = mulmod(r, base, q);
      base = mulmod(base, base, q);
      e >>= 1;
    }
    if (r == 1) return d;
  }
  return 0;
}

}  // namespace oracle

namespace oracle {

/// Discrepancy by brute force over a symbolic endpoint grid. Endpoints are
/// u - ε, u, u + ε for every point, plus ε and 1 - ε, with ε an infinitesimal.
/// For every admissible closed interval the count is exact and the length is
/// (b - a) + kε, so the supremum is the max of |count/N - (b - a)|.
inline mpq_class grid_discrepancy(const std::vector<mpq_class>& pts) {
  using End = std::pair<mpq_class, int>;
  std::vector<End> ends{{mpq_class(0), 1}, {mpq_class(1), -1}};
  for (const auto& u : pts)
    for (int e : {-1, 0, 1}) ends.push_back({u, e});
  std::sort(ends.begin(), ends.end());
  ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
  const mpq_class n(static_cast<long>(pts.size()));
  mpq_class best = 0;
  for (std::size_t i = 0; i < ends.size(); ++i) {
    const auto& a = ends[i];
    if (a <= End{mpq_class(0), 0}) continue;
    for (std::size_t j = i + 1; j < ends.size(); ++j) {
      const auto& b = ends[j];
      if (b >= End{mpq_class(1), 0}) continue;
      long count = 0;
      for (const auto& u : pts) {
        const End x{u, 0};
        if (a <= x && x <= b) ++count;
      }
      mpq_class v = mpq_class(count) / n - (b.first - a.first);
      if (v < 0) v = -v;
      if (v > best) best = v;
    }
  }
  return best;
}

}  // namespace oracle
