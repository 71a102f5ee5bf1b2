#pragma once

// Factorization, multiplicative orders and the order census.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cantor_dioph/big_float.hpp"
#include "cantor_dioph/budget.hpp"
#include "cantor_dioph/exact_rational.hpp"

namespace cantor_dioph {

/// (prime, exponent) pairs with strictly increasing primes.
using Factorization = std::vector<std::pair<std::uint64_t, unsigned>>;

/// Deterministic Miller-Rabin for 64-bit inputs.
bool is_prime(std::uint64_t n);
/// Trial division below 10^6, Pollard rho beyond. factorize(1) is empty.
Factorization factorize(std::uint64_t n);

unsigned omega(std::uint64_t n);
std::uint64_t euler_phi(std::uint64_t n);
/// Exponent of the prime p in n >= 1. Throws std::invalid_argument for composite p.
unsigned valuation(std::uint64_t p, std::uint64_t n);

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t mod);

/// Order of b modulo p^t by lifting from O_p(b). For p = 2 the lift starts at
/// modulus 4, since b = 3 (mod 4) breaks the plain lifting rule.
std::uint64_t prime_power_order(std::uint64_t p, unsigned t, std::uint64_t b);
/// O_q(b); throws std::domain_error when gcd(q, b) != 1.
std::uint64_t mult_order(std::uint64_t q, std::uint64_t b);
/// Product over prime-power parts of their orders.
std::uint64_t tilde_order(std::uint64_t q, std::uint64_t b);

struct OrderProfile {
  std::uint64_t q = 1;
  Factorization factors;
  unsigned omega = 0;
  bool coprime_to_b = true;
  /// Zero when not coprime.
  std::uint64_t order = 0;
  std::uint64_t tilde_order = 0;
};

OrderProfile order_profile(std::uint64_t q, std::uint64_t b);

/// Smallest-prime-factor table on [0, limit].
class SpfSieve {
 public:
  explicit SpfSieve(std::uint64_t limit);
  std::uint64_t limit() const { return spf_.size() - 1; }
  std::uint32_t spf(std::uint64_t n) const { return spf_[n]; }
  Factorization factorize(std::uint64_t n) const;

 private:
  std::vector<std::uint32_t> spf_;
};

struct CensusRow {
  std::uint64_t x = 0;
  /// Decimal text exactly as parsed, e.g. "0.3".
  std::string epsilon;
  /// #{q <= x : gcd(q,b)=1, Õ_q(b) <= q^ε}.
  std::uint64_t count = 0;
  /// With the ω(q) <= N filter and O_q(b) in place of Õ_q(b).
  std::optional<std::uint64_t> filtered_count;
  double log_ratio = 0.0;
  double bound_2eps = 0.0;
  /// count <= x^(2ε), decided exactly.
  bool holds = true;
};

/// Checkpoints are 10^2, 10^3, ... up to x_max, plus x_max itself. Each ε must
/// be a decimal or fraction in (0, 1).
std::vector<CensusRow> order_census(std::uint64_t b, std::uint64_t x_max, const std::vector<std::string>& epsilons,
                                    std::optional<unsigned> omega_max = std::nullopt, unsigned workers = 1,
                                    const Budget& budget = {});

/// Exact test of n <= q^ε for ε = a/c: n^c <= q^a.
bool le_power(std::uint64_t n, std::uint64_t q, const ExactRational& eps);

struct DecadeIncrement {
  std::uint64_t lo = 0;  // exclusive, 0 for the first decade
  std::uint64_t hi = 0;  // inclusive
  BigFloat increment{64};
};

struct SeriesPartial {
  BigFloat value{64};
  /// Present for integer t and moderate n_max.
  std::optional<ExactRational> exact;
  std::vector<DecadeIncrement> decades;
};

/// Σ_{n <= n_max, gcd(n,b)=1} Õ_n(b)^(-t) at `digits` decimal digits (>= 50).
SeriesPartial s_t_partial(std::uint64_t b, const ExactRational& t, std::uint64_t n_max, int digits = 50);

/// Ascending P_N ∩ [1, x_max].
std::vector<std::uint64_t> pn_sieve(std::uint64_t x_max, unsigned n);
/// φ(m) >= m · Π_{i=2}^{N+1} (1 - 1/i) = m / (N+1).
bool phi_lower_bound_holds(std::uint64_t m, unsigned n);

}  // namespace cantor_dioph
