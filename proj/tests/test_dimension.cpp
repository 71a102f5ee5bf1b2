#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "cantor_dioph/dimension.hpp"
#include "cantor_dioph/membership.hpp"
#include "doctest.h"

using namespace cantor_dioph;

namespace {
const RationalIFS kCantor = RationalIFS::fixture("cantor");
const RationalIFS kOverlap = RationalIFS::fixture("overlap3");
const RationalIFS kFull = RationalIFS::fixture("full3");
const double kDimCantor = std::log(2.0) / std::log(3.0);

std::set<std::uint64_t> qs(const QCountRow& row) {
  std::set<std::uint64_t> s;
  for (const auto& [q, c] : row.members) s.insert(q);
  return s;
}
}  // namespace

TEST_CASE("delta of approximation functions") {
  CHECK(delta_psi(ApproxFunction::power(2)).value == 2.0);
  CHECK(delta_psi(ApproxFunction::power(2)).exact);
  CHECK(delta_psi(ApproxFunction::parse("pow:3")).value == 3.0);
  // Alternating exponents: the liminf picks the smaller one.
  std::vector<std::pair<std::uint64_t, double>> tab;
  for (std::uint64_t q = 2; q <= 200; ++q) tab.push_back({q, std::pow(static_cast<double>(q), q % 2 ? -3.0 : -2.0)});
  const auto d = delta_psi(ApproxFunction::tabulated(tab));
  CHECK(d.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_FALSE(d.exact);
  CHECK_THROWS_AS(ApproxFunction::parse("pow:x"), std::invalid_argument);
  CHECK_THROWS_AS(ApproxFunction::parse("cubic"), std::invalid_argument);
  CHECK_THROWS_AS(ApproxFunction::power(-1), std::invalid_argument);
}

TEST_CASE("psi table files") {
  const char* path = "psi_table_test.csv";
  {
    std::ofstream f(path);
    f << "# q,psi\n2,0.25\n3,0.111111\n10,0.01\n";
  }
  const auto psi = ApproxFunction::parse(std::string("table:") + path);
  CHECK_FALSE(psi.is_power());
  CHECK(psi(5) == doctest::Approx(0.111111));
  CHECK(psi(10) == doctest::Approx(0.01));
  CHECK(psi.is_non_increasing());
  std::remove(path);
}

TEST_CASE("dimension formula and s_psi") {
  CHECK(dimension_formula(kDimCantor, 3.0) == doctest::Approx(0.21035).epsilon(1e-4));
  CHECK(dimension_formula(kDimCantor, 0.5) == doctest::Approx(kDimCantor));
  CHECK(s_psi(ApproxFunction::power(2), 3) == doctest::Approx(1.0));
  CHECK(s_psi(ApproxFunction::power(4), 1) == doctest::Approx(0.5));
  CHECK(s_psi(ApproxFunction::power(4), 0) == 0.0);
  CHECK_THROWS_AS(dimension_formula(1.5, 2), std::invalid_argument);
}

TEST_CASE("count_q small levels") {
  const auto r1 = count_q(kCantor, 1);
  CHECK(qs(r1) == std::set<std::uint64_t>{3});
  const auto r2 = count_q(kCantor, 2);
  CHECK(qs(r2) == std::set<std::uint64_t>{4, 9});
  CHECK(r2.method == "fiber-scan");
  CHECK(r2.complete);
  const auto r3 = count_q(kCantor, 3);
  CHECK(qs(r3) == std::set<std::uint64_t>{10, 12, 13, 27});
  // ω(q) <= 1 keeps prime powers only.
  const auto r2n = count_q(kCantor, 2, 1u);
  CHECK(qs(r2n) == std::set<std::uint64_t>{4, 9});
  const auto r3n = count_q(kCantor, 3, 1u);
  CHECK(qs(r3n) == std::set<std::uint64_t>{13, 27});
  const std::uint64_t expected[] = {1, 2, 4, 6, 12, 18, 27, 43};
  for (int n = 1; n <= 8; ++n) CHECK(count_q(kCantor, n).count == expected[n - 1]);
}

TEST_CASE("fiber route agrees with coding route") {
  for (const auto* ifs : {&kCantor, &kOverlap}) {
    for (int n = 1; n <= 4; ++n) {
      const auto a = count_q(*ifs, n);
      const auto b = count_q_coding(*ifs, n, std::nullopt, 12);
      CHECK(a.members == b.members);
      CHECK_FALSE(b.complete);
    }
  }
}

TEST_CASE("count_q is independent of worker count") {
  const auto a = count_q(kCantor, 7, std::nullopt, 1);
  const auto b = count_q(kCantor, 7, std::nullopt, 4);
  CHECK(a.members == b.members);
}

TEST_CASE("box dimension estimates") {
  for (int n = 1; n <= 6; ++n) {
    CHECK(box_dimension_estimate(kCantor, n) == doctest::Approx(kDimCantor).epsilon(1e-12));
    CHECK(box_dimension_estimate(kFull, n) == 1.0);
  }
  CHECK(box_dimension_estimate(kOverlap, 2) == doctest::Approx(std::log(8.0) / std::log(9.0)));
  double prev = 2.0;
  for (int n = 1; n <= 10; ++n) {
    const double d = box_dimension_estimate(kOverlap, n);
    CHECK(d <= prev + 1e-12);
    prev = d;
  }
}

TEST_CASE("covering series verdicts") {
  for (double delta : {2.0, 3.0}) {
    const auto psi = ApproxFunction::power(delta);
    const CoveringSeries ser(kCantor, psi, 12, SeriesMode::intrinsic);
    const double s0 = kDimCantor / delta;
    CHECK(ser.evaluate(s0 + 0.1).converging);
    CHECK_FALSE(ser.evaluate(s0 - 0.1).converging);
    const auto th = ser.threshold(0.05, 1.0);
    REQUIRE(th);
    CHECK(th->second - th->first <= 1e-4 + 1e-12);
    CHECK(std::abs(0.5 * (th->first + th->second) - s0) < 0.05);
  }
  const CoveringSeries flat(kCantor, ApproxFunction::power(0), 10, SeriesMode::intrinsic);
  CHECK_FALSE(flat.evaluate(0.5).converging);
  const CoveringSeries ext(kCantor, ApproxFunction::power(2), 8, SeriesMode::extrinsic);
  CHECK_FALSE(ext.evaluate(0.1).converging);
  CHECK(ext.evaluate(2.0).converging);
  std::vector<std::pair<std::uint64_t, double>> up{{2, 0.1}, {3, 0.2}};
  CHECK_THROWS_AS(CoveringSeries(kCantor, ApproxFunction::tabulated(up), 4, SeriesMode::intrinsic),
                  std::invalid_argument);
}

TEST_CASE("b-adic ball systems") {
  const auto s0 = badic_ball_system(kCantor, ApproxFunction::power(2), ExactRational(0), 2);
  CHECK(s0.b_adic);
  CHECK(s0.k == 0);
  std::set<ExactRational> last;
  for (const auto& b : s0.balls)
    if (b.stage == 2) {
      last.insert(b.center);
      REQUIRE(b.radius_exact);
      CHECK(*b.radius_exact == ExactRational(1, 81));
    }
  CHECK(last == std::set<ExactRational>{ExactRational(0), ExactRational(2, 9), ExactRational(2, 3),
                                        ExactRational(8, 9)});

  const auto s1 = badic_ball_system(kCantor, ApproxFunction::power(1), ExactRational(1), 1);
  std::set<ExactRational> c1;
  for (const auto& b : s1.balls) {
    c1.insert(b.center);
    CHECK(*b.radius_exact == ExactRational(1, 3));
  }
  CHECK(c1 == std::set<ExactRational>{ExactRational(1, 3), ExactRational(1)});

  for (const auto& b : badic_ball_system(kCantor, ApproxFunction::power(2), ExactRational(2, 3), 5).balls)
    CHECK(is_member(kCantor, b.center).member);

  // den 2 | 3^0 (3 - 1): the (b-1) seed branch.
  const auto s2 = badic_ball_system(kFull, ApproxFunction::power(2), ExactRational(1, 2), 3);
  CHECK_FALSE(s2.b_adic);
  CHECK(s2.k == 0);
  CHECK(s2.omega_limit == 2);
  CHECK(s2.omega_ok);
  for (const auto& b : s2.balls) {
    CHECK(is_member(kFull, b.center).member);
    CHECK(*b.radius_exact == ExactRational(1, 4 * (b.stage == 1 ? 9 : b.stage == 2 ? 81 : 729)));
  }

  CHECK_THROWS_AS(badic_ball_system(kCantor, ApproxFunction::power(2), ExactRational(1, 2), 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(badic_ball_system(kCantor, ApproxFunction::power(2), ExactRational(1, 7), 2),
                  std::invalid_argument);
}
