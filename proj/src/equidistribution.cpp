#include "cantor_dioph/equidistribution.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "cantor_dioph/number_theory.hpp"
#include "cantor_dioph/parallel.hpp"

namespace cantor_dioph {

std::vector<ExactRational> orbit(std::uint64_t b, std::uint64_t p, std::uint64_t q) {
  if (q == 0) throw std::invalid_argument("orbit needs q >= 1");
  if (p >= q) throw std::invalid_argument("orbit needs 0 <= p < q");
  const std::uint64_t ord = mult_order(q, b);
  std::vector<ExactRational> pts;
  pts.reserve(ord);
  std::uint64_t x = p;
  for (std::uint64_t k = 0; k < ord; ++k) {
    pts.emplace_back(big_from_u64(x), big_from_u64(q));
    x = static_cast<std::uint64_t>(static_cast<unsigned __int128>(x) * b % q);
  }
  return pts;
}

namespace {

template <typename T>
struct ScanResult {
  bool has_excess = false;
  T excess{};
  std::size_t ei = 0, ej = 0;
  T deficit{};
  std::size_t ds = 0, dt = 0;
};

// pos: sorted positive points, inv = 1/N and one = 1 in the same scale.
// Excess over [P_i, P_j]: (j-i+1)/N - (P_j - P_i).
// Deficit over the gap (B_s, B_t), B = 0, P..., 1: (B_t - B_s) - (t-s-1)/N.
template <typename T>
ScanResult<T> two_scan(const std::vector<T>& pos, const T& inv, const T& one) {
  ScanResult<T> r;
  const std::size_t m = pos.size();
  std::optional<T> best_left;
  std::size_t best_i = 0;
  for (std::size_t j = 0; j < m; ++j) {
    T left = pos[j] - inv * T(static_cast<long>(j));
    if (!best_left || left > *best_left) {
      best_left = left;
      best_i = j;
    }
    T val = inv * T(static_cast<long>(j + 1)) - pos[j] + *best_left;
    if (!r.has_excess || val > r.excess) {
      r.has_excess = true;
      r.excess = val;
      r.ei = best_i;
      r.ej = j;
    }
  }
  auto boundary = [&](std::size_t t) -> T { return t == 0 ? T(0) : (t == m + 1 ? one : pos[t - 1]); };
  T min_left = boundary(0);
  std::size_t min_s = 0;
  bool first = true;
  for (std::size_t t = 1; t <= m + 1; ++t) {
    T val = boundary(t) - inv * T(static_cast<long>(t)) - min_left + inv;
    if (first || val > r.deficit) {
      r.deficit = val;
      r.ds = min_s;
      r.dt = t;
      first = false;
    }
    T left = boundary(t) - inv * T(static_cast<long>(t));
    if (left < min_left) {
      min_left = left;
      min_s = t;
    }
  }
  return r;
}

// Signed 128-bit scalar with the constructor two_scan expects.
struct I128 {
  __int128 v = 0;
  I128() = default;
  explicit I128(long x) : v(x) {}
  static I128 of(__int128 x) {
    I128 r;
    r.v = x;
    return r;
  }
  friend I128 operator+(I128 a, I128 b) { return of(a.v + b.v); }
  friend I128 operator-(I128 a, I128 b) { return of(a.v - b.v); }
  friend I128 operator*(I128 a, I128 b) { return of(a.v * b.v); }
  friend bool operator<(I128 a, I128 b) { return a.v < b.v; }
  friend bool operator>(I128 a, I128 b) { return a.v > b.v; }
};

BigInt big_from_i128(__int128 v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
  BigInt hi = big_from_u64(static_cast<std::uint64_t>(u >> 64));
  BigInt r = (hi << 64) + big_from_u64(static_cast<std::uint64_t>(u));
  return neg ? BigInt(-r) : r;
}

template <typename T, typename ToRational>
DiscrepancyReport finish(const ScanResult<T>& r, const std::vector<ExactRational>& pos, std::size_t n,
                         ToRational to_rational) {
  DiscrepancyReport rep;
  rep.n_points = n;
  const std::size_t m = pos.size();
  auto boundary = [&](std::size_t t) { return t == 0 ? ExactRational(0) : (t == m + 1 ? ExactRational(1) : pos[t - 1]); };
  if (r.has_excess && !(r.excess < r.deficit)) {
    rep.discrepancy = to_rational(r.excess);
    rep.kind = WitnessKind::excess;
    rep.a = pos[r.ei];
    rep.b = pos[r.ej];
    rep.limit = rep.a == rep.b;
  } else {
    rep.discrepancy = to_rational(r.deficit);
    rep.kind = WitnessKind::deficit;
    rep.a = boundary(r.ds);
    rep.b = boundary(r.dt);
    rep.limit = true;
  }
  return rep;
}

}  // namespace

DiscrepancyReport discrepancy(std::span<const ExactRational> points) {
  if (points.empty()) throw std::invalid_argument("discrepancy needs at least one point");
  std::vector<ExactRational> pos;
  for (const auto& u : points) {
    if (u.sign() < 0 || u >= ExactRational(1)) throw std::invalid_argument("points must lie in [0,1): " + u.to_string());
    if (u.sign() > 0) pos.push_back(u);
  }
  std::sort(pos.begin(), pos.end());
  const std::size_t n = points.size();

  // Integer path when every point scales to an integer below 2^62.
  BigInt lcm = 1;
  for (const auto& u : pos) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), u.denominator().get_mpz_t());
  const BigInt scale = lcm * big_from_u64(n);
  if (scale < BigInt(1) << 62) {
    const std::int64_t s = big_to_i64(scale);
    const std::int64_t l = big_to_i64(lcm);
    std::vector<I128> ipos;
    ipos.reserve(pos.size());
    for (const auto& u : pos) ipos.push_back(I128::of(static_cast<__int128>(big_to_i64(u.numerator())) * (s / big_to_i64(u.denominator()))));
    const auto r = two_scan(ipos, I128::of(l), I128::of(s));
    return finish(r, pos, n, [&](const I128& v) { return ExactRational(big_from_i128(v.v), scale); });
  }
  const auto r = two_scan(pos, ExactRational(1, static_cast<std::int64_t>(n)), ExactRational(1));
  return finish(r, pos, n, [](const ExactRational& v) { return v; });
}

mpfr_prec_t default_weyl_bits() { return precision_bits_for_digits(64); }

UnitRootTable::UnitRootTable(std::uint64_t q, mpfr_prec_t bits) : q_(q), bits_(bits) {
  if (q == 0) throw std::invalid_argument("unit root table needs q >= 1");
  cos_.reserve(q);
  sin_.reserve(q);
  const BigFloat two_pi = BigFloat::pi(bits) * BigFloat(bits, 2.0);
  for (std::uint64_t k = 0; k < q; ++k) {
    BigFloat arg = two_pi;
    mpfr_mul_ui(arg.get(), arg.get(), k, MPFR_RNDN);
    mpfr_div_ui(arg.get(), arg.get(), q, MPFR_RNDN);
    cos_.push_back(cantor_dioph::cos(arg));
    sin_.push_back(cantor_dioph::sin(arg));
  }
}

BigFloat UnitRootTable::entry_error() const {
  // Argument off by at most 4 roundings of a value below 2π (Lipschitz 1),
  // plus the final rounding of cos/sin.
  return BigFloat(bits_, 32.0) * pow2(bits_, bits_);
}

namespace {

// |Σ (c_k, s_k)| with error from per-term table error and N summation roundings.
WeylValue magnitude(const BigFloat& re, const BigFloat& im, std::size_t n, mpfr_prec_t bits, const BigFloat& term_err) {
  WeylValue w;
  w.magnitude = sqrt(re * re + im * im);
  const BigFloat nn(bits, static_cast<double>(n));
  // Each coordinate: n term errors plus n roundings of partial sums bounded by n.
  BigFloat coord = nn * term_err + nn * nn * pow2(bits, bits);
  // sqrt(2) * coord plus the rounding of the final sqrt.
  w.error = coord * BigFloat(bits, 1.5) + nn * pow2(bits, bits - 2);
  return w;
}

}  // namespace

WeylValue weyl_sum(std::span<const std::uint64_t> numerators, const UnitRootTable& table, std::uint64_t j) {
  if (j < 1) throw std::invalid_argument("weyl_sum needs j >= 1");
  const std::uint64_t q = table.modulus();
  const mpfr_prec_t bits = table.bits();
  BigFloat re(bits), im(bits);
  const std::uint64_t jm = j % q;
  for (auto c : numerators) {
    const auto k = static_cast<std::uint64_t>(static_cast<unsigned __int128>(jm) * c % q);
    re += table.cos(k);
    im += table.sin(k);
  }
  return magnitude(re, im, numerators.size(), bits, table.entry_error());
}

WeylValue weyl_sum(std::span<const ExactRational> points, std::uint64_t j, mpfr_prec_t bits) {
  if (j < 1) throw std::invalid_argument("weyl_sum needs j >= 1");
  BigFloat re(bits), im(bits);
  const BigFloat two_pi = BigFloat::pi(bits) * BigFloat(bits, 2.0);
  const BigInt jj = big_from_u64(j);
  for (const auto& u : points) {
    // Phase reduced exactly to (j·num mod den)/den before going to floating point.
    BigInt r = jj * u.numerator();
    mpz_fdiv_r(r.get_mpz_t(), r.get_mpz_t(), u.denominator().get_mpz_t());
    const BigFloat arg = two_pi * BigFloat(bits, ExactRational(r, u.denominator()));
    re += cos(arg);
    im += sin(arg);
  }
  const BigFloat term_err = BigFloat(bits, 32.0) * pow2(bits, bits);
  return magnitude(re, im, points.size(), bits, term_err);
}

bool BoundValue::certainly_at_least(const ExactRational& d) const { return (value - error).compare(d) >= 0; }

namespace {

std::vector<BoundValue> ladder_from(const std::vector<WeylValue>& sums, std::size_t n, const ExactRational& C,
                                    mpfr_prec_t bits) {
  if (C.sign() <= 0) throw std::invalid_argument("Erdős–Turán constant must be positive");
  const BigFloat c(bits, C), nn(bits, static_cast<double>(n));
  std::vector<BoundValue> out;
  BigFloat acc(bits), acc_err(bits);
  for (std::size_t a = 1; a <= sums.size(); ++a) {
    const BigFloat denom = nn * BigFloat(bits, static_cast<double>(a));
    acc += sums[a - 1].magnitude / denom;
    acc_err += sums[a - 1].error / denom;
    BoundValue b;
    b.value = c * (BigFloat(bits, 1.0) / BigFloat(bits, static_cast<double>(a)) + acc);
    // Relative rounding slack for the handful of operations above.
    b.error = c * acc_err + b.value * pow2(bits, bits - 8);
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace

BoundValue erdos_turan_bound(std::span<const ExactRational> points, std::uint64_t A, const ExactRational& C,
                             mpfr_prec_t bits) {
  if (A < 1) throw std::invalid_argument("Erdős–Turán needs A >= 1");
  if (points.empty()) throw std::invalid_argument("Erdős–Turán needs points");
  std::vector<WeylValue> sums;
  for (std::uint64_t j = 1; j <= A; ++j) sums.push_back(weyl_sum(points, j, bits));
  return ladder_from(sums, points.size(), C, bits).back();
}

std::vector<BoundValue> erdos_turan_ladder(std::span<const std::uint64_t> numerators, const UnitRootTable& table,
                                           std::uint64_t A_max, const ExactRational& C) {
  if (A_max < 1) throw std::invalid_argument("Erdős–Turán needs A >= 1");
  if (numerators.empty()) throw std::invalid_argument("Erdős–Turán needs points");
  std::vector<WeylValue> sums;
  for (std::uint64_t j = 1; j <= A_max; ++j) sums.push_back(weyl_sum(numerators, table, j));
  return ladder_from(sums, numerators.size(), C, table.bits());
}

OrbitProfile orbit_profile(std::uint64_t b, std::uint64_t q, unsigned workers, const Budget& budget, mpfr_prec_t bits) {
  if (q == 0) throw std::invalid_argument("orbit_profile needs q >= 1");
  if (q > budget.orbit_profile_q_max) {
    throw BudgetExceeded("orbit_profile q " + std::to_string(q) + " exceeds orbit_profile_q_max=" +
                         std::to_string(budget.orbit_profile_q_max));
  }
  OrbitProfile prof;
  prof.q = q;
  prof.b = b;
  prof.order = mult_order(q, b);

  // Orbits of coprime residues partition Z_q^*; one representative each.
  std::vector<std::uint64_t> reps;
  std::vector<std::uint8_t> seen(q, 0);
  for (std::uint64_t p = 0; p < q; ++p) {
    if (seen[p] || std::gcd(p, q) != 1) continue;
    reps.push_back(p);
    std::uint64_t x = p;
    do {
      seen[x] = 1;
      x = static_cast<std::uint64_t>(static_cast<unsigned __int128>(x) * b % q);
    } while (x != p);
  }
  prof.cosets = reps.size();
  const UnitRootTable table(q, bits);

  struct Part {
    BigFloat weyl{64};
    std::uint64_t weyl_p = 0;
    ExactRational disc;
    std::uint64_t disc_p = 0;
    bool any = false;
  };
  constexpr std::uint64_t kChunk = 64;
  std::vector<Part> parts(chunk_count(0, reps.size(), kChunk));
  parallel_chunks(0, reps.size(), kChunk, workers, [&](std::size_t chunk, std::uint64_t lo, std::uint64_t hi) {
    Part& part = parts[chunk];
    std::vector<std::uint64_t> nums;
    std::vector<ExactRational> pts;
    for (std::uint64_t i = lo; i < hi; ++i) {
      const std::uint64_t p = reps[i];
      nums.clear();
      pts.clear();
      std::uint64_t x = p;
      for (std::uint64_t k = 0; k < prof.order; ++k) {
        nums.push_back(x);
        pts.emplace_back(big_from_u64(x), big_from_u64(q));
        x = static_cast<std::uint64_t>(static_cast<unsigned __int128>(x) * b % q);
      }
      BigFloat w = weyl_sum(nums, table, 1).magnitude / BigFloat(bits, static_cast<double>(prof.order));
      ExactRational d = discrepancy(pts).discrepancy;
      if (!part.any || w > part.weyl) {
        part.weyl = w;
        part.weyl_p = p;
      }
      if (!part.any || d < part.disc) {
        part.disc = d;
        part.disc_p = p;
      }
      part.any = true;
    }
  });
  bool first = true;
  for (auto& part : parts) {
    if (!part.any) continue;
    if (first || part.weyl > prof.max_weyl) {
      prof.max_weyl = part.weyl;
      prof.max_weyl_p = part.weyl_p;
    }
    if (first || part.disc < prof.min_discrepancy) {
      prof.min_discrepancy = part.disc;
      prof.min_discrepancy_p = part.disc_p;
    }
    first = false;
  }
  return prof;
}

bool gap_hit(std::span<const ExactRational> points, const Interval& j) {
  if (j.hi < j.lo || j.lo.sign() < 0 || j.hi > ExactRational(1)) {
    throw std::invalid_argument("gap interval must satisfy 0 <= lo <= hi <= 1");
  }
  return std::any_of(points.begin(), points.end(), [&](const ExactRational& u) { return j.contains(u); });
}

}  // namespace cantor_dioph
