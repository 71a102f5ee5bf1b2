#include "cantor_dioph/number_theory.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "cantor_dioph/parallel.hpp"

namespace cantor_dioph {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mul_mod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

bool miller_rabin_witness(u64 n, u64 a, u64 d, unsigned s) {
  u64 x = pow_mod(a % n, d, n);
  if (x == 1 || x == n - 1) return false;
  for (unsigned r = 1; r < s; ++r) {
    x = mul_mod(x, x, n);
    if (x == n - 1) return false;
  }
  return true;
}

u64 pollard_rho(u64 n) {
  if (n % 2 == 0) return 2;
  // Brent's variant with batched gcds; deterministic sequence of seeds.
  for (u64 c = 1;; ++c) {
    u64 y = 2, x = 2, g = 1, q = 1, ys = 2;
    auto f = [&](u64 v) { return (mul_mod(v, v, n) + c) % n; };
    const u64 m = 128;
    for (u64 r = 1; g == 1; r <<= 1) {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      for (u64 k = 0; k < r && g == 1; k += m) {
        ys = y;
        for (u64 i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mul_mod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
      }
    }
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

void factor_rec(u64 n, std::vector<u64>& out) {
  if (n == 1) return;
  if (is_prime(n)) {
    out.push_back(n);
    return;
  }
  const u64 d = pollard_rho(n);
  factor_rec(d, out);
  factor_rec(n / d, out);
}

Factorization group(std::vector<u64> primes) {
  std::sort(primes.begin(), primes.end());
  Factorization f;
  for (u64 p : primes) {
    if (!f.empty() && f.back().first == p) {
      ++f.back().second;
    } else {
      f.push_back({p, 1});
    }
  }
  return f;
}

// O_p(b) for prime p not dividing b, from the factorization of p - 1.
u64 order_mod_prime(u64 p, u64 b, const Factorization& pm1) {
  if (p == 2) return 1;
  u64 k = p - 1;
  for (const auto& [r, e] : pm1) {
    for (unsigned i = 0; i < e; ++i) {
      if (pow_mod(b, k / r, p) == 1) {
        k /= r;
      } else {
        break;
      }
    }
  }
  return k;
}

// v_p(b^k - 1) capped at `cap`, valid while p^(cap+1) fits in 64 bits.
unsigned lift_valuation(u64 p, u64 b, u64 k, unsigned cap) {
  unsigned u = 0;
  u64 mod = 1;
  while (u < cap) {
    if (mod > UINT64_MAX / p) break;
    const u64 next = mod * p;
    if (pow_mod(b, k, next) != 1 % next) break;
    mod = next;
    ++u;
  }
  return u;
}

u64 ipow(u64 base, unsigned e) {
  u64 r = 1;
  for (unsigned i = 0; i < e; ++i) {
    if (r > UINT64_MAX / base) throw std::overflow_error("integer power overflows 64 bits");
    r *= base;
  }
  return r;
}

u64 lifted(u64 k, u64 p, unsigned t, unsigned u) { return t <= u ? k : k * ipow(p, t - u); }

// Lifting data for one prime: order at the base modulus and the valuation.
struct Lift {
  u64 k;
  unsigned u;
};

Lift lift_data(u64 p, u64 b, unsigned t_max, const Factorization& pm1) {
  if (p == 2) {
    // Work from modulus 4: k = O_4(b), u = v_2(b^k - 1) >= 2.
    const u64 k = (b % 4 == 1) ? 1 : 2;
    return {k, lift_valuation(2, b, k, std::max(t_max, 2u))};
  }
  const u64 k = order_mod_prime(p, b, pm1);
  return {k, lift_valuation(p, b, k, std::max(t_max, 1u))};
}

u64 order_from_lift(u64 p, unsigned t, const Lift& l) {
  if (p == 2 && t == 1) return 1;
  return lifted(l.k, p, t, l.u);
}

}  // namespace

u64 pow_mod(u64 base, u64 exp, u64 mod) {
  if (mod == 1) return 0;
  u64 r = 1;
  base %= mod;
  while (exp) {
    if (exp & 1) r = mul_mod(r, base, mod);
    base = mul_mod(base, base, mod);
    exp >>= 1;
  }
  return r;
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  unsigned s = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++s;
  }
  for (u64 a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull, 23ull, 29ull, 31ull, 37ull}) {
    if (miller_rabin_witness(n, a, d, s)) return false;
  }
  return true;
}

Factorization factorize(u64 n) {
  if (n == 0) throw std::invalid_argument("factorize needs n >= 1");
  std::vector<u64> primes;
  for (u64 p = 2; p < 1000000 && p * p <= n; p += (p == 2 ? 1 : 2)) {
    while (n % p == 0) {
      primes.push_back(p);
      n /= p;
    }
    if (p == 997 && n > 1 && is_prime(n)) break;
  }
  factor_rec(n, primes);
  return group(std::move(primes));
}

unsigned omega(u64 n) { return static_cast<unsigned>(factorize(n).size()); }

u64 euler_phi(u64 n) {
  u64 phi = n;
  for (const auto& [p, e] : factorize(n)) phi = phi / p * (p - 1);
  return phi;
}

unsigned valuation(u64 p, u64 n) {
  if (!is_prime(p)) throw std::invalid_argument("valuation needs a prime, got " + std::to_string(p));
  if (n == 0) throw std::invalid_argument("valuation of 0 is infinite");
  unsigned v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

u64 prime_power_order(u64 p, unsigned t, u64 b) {
  if (t < 1) throw std::invalid_argument("prime_power_order needs t >= 1");
  if (!is_prime(p)) throw std::invalid_argument("prime_power_order needs a prime p");
  if (b % p == 0) throw std::domain_error("gcd(p, b) != 1");
  return order_from_lift(p, t, lift_data(p, b, t, factorize(p - 1 == 0 ? 1 : p - 1)));
}

u64 mult_order(u64 q, u64 b) {
  if (q == 0) throw std::invalid_argument("mult_order needs q >= 1");
  if (std::gcd(q, b) != 1) throw std::domain_error("gcd(q, b) != 1");
  u64 ord = 1;
  for (const auto& [p, e] : factorize(q)) ord = std::lcm(ord, prime_power_order(p, e, b));
  if (pow_mod(b, ord, q) != 1 % q) throw std::logic_error("order check failed");
  return ord;
}

u64 tilde_order(u64 q, u64 b) {
  if (q == 0) throw std::invalid_argument("tilde_order needs q >= 1");
  if (std::gcd(q, b) != 1) throw std::domain_error("gcd(q, b) != 1");
  u64 t = 1;
  for (const auto& [p, e] : factorize(q)) t *= prime_power_order(p, e, b);
  return t;
}

OrderProfile order_profile(u64 q, u64 b) {
  if (q == 0) throw std::invalid_argument("order_profile needs q >= 1");
  OrderProfile prof;
  prof.q = q;
  prof.factors = factorize(q);
  prof.omega = static_cast<unsigned>(prof.factors.size());
  prof.coprime_to_b = std::gcd(q, b) == 1;
  if (prof.coprime_to_b) {
    prof.order = 1;
    prof.tilde_order = 1;
    for (const auto& [p, e] : prof.factors) {
      const u64 o = prime_power_order(p, e, b);
      prof.order = std::lcm(prof.order, o);
      prof.tilde_order *= o;
    }
  }
  return prof;
}

SpfSieve::SpfSieve(u64 limit) : spf_(limit + 1, 0) {
  if (limit > UINT32_MAX) throw std::invalid_argument("sieve limit too large");
  for (u64 i = 2; i <= limit; ++i) {
    if (spf_[i] != 0) continue;
    spf_[i] = static_cast<std::uint32_t>(i);
    for (u64 j = i * i; j <= limit; j += i)
      if (spf_[j] == 0) spf_[j] = static_cast<std::uint32_t>(i);
  }
}

Factorization SpfSieve::factorize(u64 n) const {
  Factorization f;
  while (n > 1) {
    const u64 p = spf_[n];
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    f.push_back({p, e});
  }
  return f;
}

bool le_power(u64 n, u64 q, const ExactRational& eps) {
  const u64 a = big_to_u64(eps.numerator());
  const u64 c = big_to_u64(eps.denominator());
  const double lhs = static_cast<double>(c) * std::log(static_cast<double>(n));
  const double rhs = static_cast<double>(a) * std::log(static_cast<double>(q));
  const double guard = 1e-9 * (std::abs(lhs) + std::abs(rhs) + 1.0);
  if (lhs < rhs - guard) return true;
  if (lhs > rhs + guard) return false;
  BigInt l, r;
  mpz_ui_pow_ui(l.get_mpz_t(), n, c);
  mpz_ui_pow_ui(r.get_mpz_t(), q, a);
  return l <= r;
}

std::vector<CensusRow> order_census(u64 b, u64 x_max, const std::vector<std::string>& epsilons,
                                    std::optional<unsigned> omega_max, unsigned workers, const Budget& budget) {
  if (b < 2) throw std::invalid_argument("census base must be >= 2");
  if (x_max < 2) throw std::invalid_argument("census needs x_max >= 2");
  if (x_max > budget.census_x_max) {
    throw BudgetExceeded("census x_max " + std::to_string(x_max) + " exceeds census_x_max=" +
                         std::to_string(budget.census_x_max));
  }
  if (epsilons.empty()) throw std::invalid_argument("census needs at least one epsilon");
  std::vector<ExactRational> eps;
  for (const auto& s : epsilons) {
    auto e = ExactRational::parse(s, true);
    if (e.sign() <= 0 || e >= ExactRational(1)) throw std::invalid_argument("epsilon must lie in (0,1): " + s);
    eps.push_back(std::move(e));
  }
  std::vector<u64> checkpoints;
  for (u64 x = 100; x <= x_max; x *= 10) {
    checkpoints.push_back(x);
    if (x > UINT64_MAX / 10) break;
  }
  if (checkpoints.empty() || checkpoints.back() != x_max) checkpoints.push_back(x_max);

  const SpfSieve sieve(x_max);
  // Lifting data per prime; primes above sqrt(x_max) only ever appear squared-free.
  std::vector<std::uint32_t> k_of(x_max + 1, 0);
  std::map<u64, Lift> small_lift;
  for (u64 p = 2; p <= x_max; ++p) {
    if (sieve.spf(p) != p || b % p == 0) continue;
    unsigned t_max = 0;
    for (u64 pp = p; pp <= x_max; pp *= p) {
      ++t_max;
      if (pp > x_max / p) break;
    }
    const Lift l = lift_data(p, b, t_max, sieve.factorize(p - 1));
    k_of[p] = static_cast<std::uint32_t>(l.k);
    if (t_max > 1 || p == 2) small_lift.emplace(p, l);
  }
  auto pp_order = [&](u64 p, unsigned t) -> u64 {
    if (t == 1 && p != 2) return k_of[p];
    return order_from_lift(p, t, small_lift.at(p));
  };

  const std::size_t E = eps.size(), C = checkpoints.size();
  constexpr u64 kChunk = u64{1} << 16;
  const std::size_t chunks = chunk_count(1, x_max + 1, kChunk);
  // counts[chunk][(e * C + bucket) * 2 + filtered]
  std::vector<std::vector<u64>> counts(chunks, std::vector<u64>(E * C * 2, 0));
  parallel_chunks(1, x_max + 1, kChunk, workers, [&](std::size_t chunk, u64 lo, u64 hi) {
    auto& out = counts[chunk];
    std::size_t bucket = static_cast<std::size_t>(std::lower_bound(checkpoints.begin(), checkpoints.end(), lo) -
                                                  checkpoints.begin());
    for (u64 q = lo; q < hi; ++q) {
      while (checkpoints[bucket] < q) ++bucket;
      if (std::gcd(q, b) != 1) continue;
      u64 tilde = 1, ord = 1;
      unsigned w = 0;
      for (u64 n = q; n > 1;) {
        const u64 p = sieve.spf(n);
        unsigned t = 0;
        while (n % p == 0) {
          n /= p;
          ++t;
        }
        const u64 o = pp_order(p, t);
        tilde *= o;
        ord = std::lcm(ord, o);
        ++w;
      }
      for (std::size_t e = 0; e < E; ++e) {
        if (le_power(tilde, q, eps[e])) ++out[(e * C + bucket) * 2];
        if (omega_max && w <= *omega_max && le_power(ord, q, eps[e])) ++out[(e * C + bucket) * 2 + 1];
      }
    }
  });

  std::vector<CensusRow> rows;
  for (std::size_t e = 0; e < E; ++e) {
    u64 running = 0, running_f = 0;
    const u64 a = big_to_u64(eps[e].numerator()), c = big_to_u64(eps[e].denominator());
    for (std::size_t k = 0; k < C; ++k) {
      for (const auto& part : counts) {
        running += part[(e * C + k) * 2];
        running_f += part[(e * C + k) * 2 + 1];
      }
      CensusRow row;
      row.x = checkpoints[k];
      row.epsilon = epsilons[e];
      row.count = running;
      if (omega_max) row.filtered_count = running_f;
      const double lx = std::log(static_cast<double>(row.x));
      row.log_ratio = std::log(static_cast<double>(running)) / lx;
      row.bound_2eps = std::exp(2.0 * eps[e].to_double() * lx);
      BigInt l, r;
      mpz_ui_pow_ui(l.get_mpz_t(), running, c);
      mpz_ui_pow_ui(r.get_mpz_t(), row.x, 2 * a);
      row.holds = l <= r;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

SeriesPartial s_t_partial(u64 b, const ExactRational& t, u64 n_max, int digits) {
  if (t.sign() <= 0) throw std::invalid_argument("s_t_partial needs t > 0");
  if (n_max < 1) throw std::invalid_argument("s_t_partial needs n_max >= 1");
  if (digits < 50) throw std::invalid_argument("s_t_partial needs at least 50 digits");
  const mpfr_prec_t bits = precision_bits_for_digits(digits);
  const bool exact = t.is_integer() && n_max <= 20000;
  const SpfSieve sieve(n_max);
  const BigFloat t_f(bits, t);

  SeriesPartial res{BigFloat(bits), std::nullopt, {}};
  mpq_class exact_sum = 0;
  std::map<u64, BigFloat> term_cache;
  auto term = [&](u64 o) -> const BigFloat& {
    auto it = term_cache.find(o);
    if (it != term_cache.end()) return it->second;
    BigFloat v(bits, ExactRational(static_cast<std::int64_t>(o)));
    BigFloat neg_t = BigFloat(bits) - t_f;
    mpfr_pow(v.get(), v.get(), neg_t.get(), MPFR_RNDN);
    return term_cache.emplace(o, std::move(v)).first->second;
  };
  u64 decade_hi = std::min<u64>(10, n_max), decade_lo = 0;
  BigFloat decade_sum(bits);
  for (u64 n = 1; n <= n_max; ++n) {
    if (std::gcd(n, b) == 1) {
      u64 o = 1;
      for (const auto& [p, e] : sieve.factorize(n)) o *= prime_power_order(p, e, b);
      const BigFloat& v = term(o);
      res.value += v;
      decade_sum += v;
      if (exact) {
        mpz_class den;
        mpz_ui_pow_ui(den.get_mpz_t(), o, big_to_u64(t.numerator()));
        exact_sum += mpq_class(1, den);
      }
    }
    if (n == decade_hi) {
      res.decades.push_back({decade_lo, decade_hi, decade_sum});
      decade_sum = BigFloat(bits);
      decade_lo = decade_hi;
      decade_hi = decade_hi > n_max / 10 ? n_max : decade_hi * 10;
    }
  }
  if (exact) {
    exact_sum.canonicalize();
    res.exact = ExactRational(exact_sum);
  }
  return res;
}

std::vector<u64> pn_sieve(u64 x_max, unsigned n) {
  std::vector<u64> out;
  if (x_max < 1) return out;
  const SpfSieve sieve(x_max);
  for (u64 q = 1; q <= x_max; ++q) {
    unsigned w = 0;
    for (u64 m = q; m > 1 && w <= n;) {
      const u64 p = sieve.spf(m);
      while (m % p == 0) m /= p;
      ++w;
    }
    if (w <= n) out.push_back(q);
  }
  return out;
}

bool phi_lower_bound_holds(u64 m, unsigned n) {
  // Π_{i=2}^{N+1} (1 - 1/i) telescopes to 1/(N+1).
  return static_cast<u128>(euler_phi(m)) * (n + 1) >= m;
}

}  // namespace cantor_dioph
