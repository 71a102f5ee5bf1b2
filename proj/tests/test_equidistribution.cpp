#include <random>

#include "cantor_dioph/equidistribution.hpp"
#include "cantor_dioph/number_theory.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cantor_dioph;

namespace {
ExactRational R(std::int64_t p, std::int64_t q = 1) { return ExactRational(p, q); }

std::vector<mpq_class> raw(const std::vector<ExactRational>& v) {
  std::vector<mpq_class> out;
  for (const auto& x : v) out.push_back(x.raw());
  return out;
}

std::vector<ExactRational> random_set(std::mt19937_64& rng, std::size_t n, std::int64_t max_den) {
  std::vector<ExactRational> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t q = 1 + static_cast<std::int64_t>(rng() % max_den);
    pts.push_back(R(static_cast<std::int64_t>(rng() % q), q));
  }
  return pts;
}
}  // namespace

TEST_CASE("orbits") {
  CHECK(orbit(3, 1, 13) == std::vector<ExactRational>{R(1, 13), R(3, 13), R(9, 13)});
  CHECK(orbit(2, 0, 1) == std::vector<ExactRational>{R(0)});
  CHECK(orbit(10, 1, 7) == std::vector<ExactRational>{R(1, 7), R(3, 7), R(2, 7), R(6, 7), R(4, 7), R(5, 7)});
  CHECK_THROWS_AS(orbit(3, 1, 12), std::domain_error);
}

TEST_CASE("orbit closure under multiplication by b") {
  for (std::uint64_t b : {2ull, 3ull}) {
    for (std::uint64_t q = 1; q <= 300; ++q) {
      if (std::gcd(q, b) != 1) continue;
      for (std::uint64_t p = 0; p < q; p += 7) {
        auto pts = orbit(b, p, q);
        CHECK(pts.size() == mult_order(q, b));
        std::vector<ExactRational> img;
        for (const auto& u : pts) {
          CHECK(mpz_divisible_p(big_from_u64(q).get_mpz_t(), u.denominator().get_mpz_t()));
          img.push_back((u * R(static_cast<std::int64_t>(b))).frac());
        }
        std::sort(pts.begin(), pts.end());
        std::sort(img.begin(), img.end());
        CHECK(img == pts);
      }
    }
  }
}

TEST_CASE("discrepancy examples") {
  const auto a = discrepancy(std::vector<ExactRational>{R(0), R(1, 2)});
  CHECK(a.discrepancy == R(1, 2));
  CHECK(discrepancy(std::vector<ExactRational>{R(0), R(1, 4), R(1, 2), R(3, 4)}).discrepancy == R(1, 4));
  const auto c = discrepancy(std::vector<ExactRational>{R(0)});
  CHECK(c.discrepancy == R(1));
  CHECK(c.limit);
  CHECK(c.kind == WitnessKind::deficit);
  CHECK_THROWS_AS(discrepancy(std::vector<ExactRational>{R(1)}), std::invalid_argument);
  CHECK_THROWS_AS(discrepancy(std::vector<ExactRational>{}), std::invalid_argument);
}

TEST_CASE("discrepancy matches the endpoint grid oracle") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 200; ++t) {
    const auto pts = random_set(rng, 1 + rng() % 50, 1 + rng() % 60);
    const auto rep = discrepancy(pts);
    CHECK(rep.discrepancy.raw() == oracle::grid_discrepancy(raw(pts)));
    // The witness achieves the value (in the limit for open gaps).
    std::int64_t count = 0;
    for (const auto& u : pts) {
      if (rep.kind == WitnessKind::excess ? (rep.a <= u && u <= rep.b) : (rep.a < u && u < rep.b)) ++count;
    }
    const auto val = (R(count, static_cast<std::int64_t>(pts.size())) - (rep.b - rep.a)).abs();
    CHECK(val == rep.discrepancy);
  }
}

TEST_CASE("discrepancy rational path agrees with integer path") {
  // Coprime large denominators force the exact rational scan.
  std::vector<ExactRational> pts{ExactRational(BigInt(1), big_pow(2, 40)), R(1, 1000003), R(7, 1000033),
                                 R(999, 1000037), R(1, 3)};
  CHECK(discrepancy(pts).discrepancy.raw() == oracle::grid_discrepancy(raw(pts)));
}

TEST_CASE("equispaced discrepancy is 1/N") {
  for (std::int64_t n = 1; n <= 64; ++n) {
    std::vector<ExactRational> pts;
    for (std::int64_t k = 0; k < n; ++k) pts.push_back(R(k, n));
    CHECK(discrepancy(pts).discrepancy == R(1, n));
  }
}

TEST_CASE("weyl sums") {
  for (std::int64_t n : {1, 5, 12}) {
    std::vector<ExactRational> pts;
    for (std::int64_t k = 0; k < n; ++k) pts.push_back(R(k, n));
    const auto full = weyl_sum(pts, static_cast<std::uint64_t>(n));
    CHECK(full.error.to_double() < 1e-40);
    CHECK((full.magnitude - BigFloat(full.magnitude.precision(), static_cast<double>(n))).to_double() ==
          doctest::Approx(0.0));
    for (std::uint64_t j = 1; j < static_cast<std::uint64_t>(n); ++j) {
      const auto z = weyl_sum(pts, j);
      CHECK(z.magnitude < z.error);
    }
  }
  const auto half = weyl_sum(std::vector<ExactRational>{R(0), R(1, 2)}, 1);
  CHECK(half.magnitude < half.error);
  CHECK_THROWS_AS(weyl_sum(std::vector<ExactRational>{R(0)}, 0), std::invalid_argument);
}

TEST_CASE("table weyl sums agree with direct ones") {
  const UnitRootTable table(91, default_weyl_bits());
  const auto pts = orbit(3, 5, 91);
  std::vector<std::uint64_t> nums;
  for (const auto& u : pts) nums.push_back(big_to_u64(u.numerator() * (91 / u.denominator())));
  for (std::uint64_t j = 1; j <= 10; ++j) {
    const auto a = weyl_sum(pts, j);
    const auto b = weyl_sum(nums, table, j);
    BigFloat diff = abs(a.magnitude - b.magnitude);
    CHECK(diff < a.error + b.error);
  }
}

TEST_CASE("erdos turan bound") {
  const std::vector<ExactRational> half{R(0), R(1, 2)};
  const auto b = erdos_turan_bound(half, 1, R(3));
  CHECK(b.value.to_double() == doctest::Approx(3.0));
  CHECK(b.certainly_at_least(R(1, 2)));
  std::mt19937_64 rng(9);
  for (int t = 0; t < 50; ++t) {
    const auto pts = random_set(rng, 1 + rng() % 30, 40);
    CHECK(erdos_turan_bound(pts, 1, R(1)).certainly_at_least(R(1)));
  }
  const auto o = orbit(3, 1, 13);
  CHECK(erdos_turan_bound(o, 4, R(3)).certainly_at_least(discrepancy(o).discrepancy));
}

TEST_CASE("orbit profiles") {
  const auto p13 = orbit_profile(3, 13);
  CHECK(p13.order == 3);
  CHECK(p13.cosets == 4);
  CHECK(p13.max_weyl.to_double() > 0.0);
  CHECK(p13.max_weyl.to_double() <= 1.0);
  const auto p7 = orbit_profile(10, 7);
  CHECK(p7.order == 6);
  // all of {1/7..6/7}: the closed interval [1/7, 6/7] holds every point
  CHECK(p7.min_discrepancy == R(2, 7));
  CHECK(p7.min_discrepancy.raw() == oracle::grid_discrepancy(raw(orbit(10, 1, 7))));
  const auto p1 = orbit_profile(2, 1);
  CHECK(p1.order == 1);
  CHECK(p1.min_discrepancy == R(1));
  CHECK_THROWS_AS(orbit_profile(3, 12), std::domain_error);
  const auto w1 = orbit_profile(2, 1001, 1);
  const auto w8 = orbit_profile(2, 1001, 8);
  CHECK(w1.max_weyl.to_string(30) == w8.max_weyl.to_string(30));
  CHECK(w1.min_discrepancy == w8.min_discrepancy);
}

TEST_CASE("gap hits") {
  const auto o = orbit(3, 1, 13);
  CHECK_FALSE(gap_hit(o, {R(3, 10), R(2, 5)}));
  CHECK(gap_hit(o, {R(0), R(1)}));
  CHECK(gap_hit(orbit(10, 1, 7), {R(4, 5), R(9, 10)}));
  CHECK_THROWS_AS(gap_hit(o, {R(1, 2), R(1, 3)}), std::invalid_argument);
}

TEST_CASE("small discrepancy forces a hit") {
  std::mt19937_64 rng(17);
  for (std::uint64_t q = 2; q <= 400; ++q) {
    if (q % 3 == 0) continue;
    const auto o = orbit(3, 1, q);
    const auto d = discrepancy(o).discrepancy;
    for (int t = 0; t < 10; ++t) {
      const std::int64_t den = 1 + static_cast<std::int64_t>(rng() % 50);
      std::int64_t a = static_cast<std::int64_t>(rng() % den), b = static_cast<std::int64_t>(rng() % (den + 1));
      if (a > b) std::swap(a, b);
      const Interval j{R(a, den), R(b, den)};
      if (d < j.length()) CHECK(gap_hit(o, j));
    }
  }
}
