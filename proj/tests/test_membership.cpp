#include <random>
#include <set>

#include "cantor_dioph/membership.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace cantor_dioph;

namespace {
ExactRational R(std::int64_t p, std::int64_t q = 1) { return ExactRational(p, q); }
const RationalIFS kCantor = RationalIFS::fixture("cantor");
const RationalIFS kOverlap = RationalIFS::fixture("overlap3");
const RationalIFS kMixed = RationalIFS::fixture("mixed23");
}  // namespace

TEST_CASE("membership examples") {
  const auto a = is_member(kCantor, R(1, 4));
  CHECK(a.member);
  REQUIRE(a.witness);
  CHECK(*a.witness == Coding{{}, {0, 1}});
  CHECK_FALSE(is_member(kCantor, R(1, 2)).member);
  const auto c = is_member(kCantor, R(1, 13));
  CHECK(c.member);
  CHECK(project(kCantor, *c.witness) == R(1, 13));
  CHECK_FALSE(is_member(kCantor, R(-1, 3)).member);
  CHECK_FALSE(is_member(kCantor, R(4, 3)).member);
}

TEST_CASE("fiber scans") {
  CHECK(members_for_denominator(kCantor, 4, false) == std::vector<std::int64_t>{1, 3});
  CHECK(members_for_denominator(kCantor, 8, false).empty());
  CHECK(members_for_denominator(kCantor, 9, false) == std::vector<std::int64_t>{1, 2, 7, 8});
  CHECK(members_for_denominator(kCantor, 1, false) == std::vector<std::int64_t>{0, 1});
  CHECK(members_for_denominator(kCantor, 1, true) == std::vector<std::int64_t>{0});
  // overlap3 lives on [0, 3/2]: the torus folds 5/4 onto 1/4.
  const auto plain = members_for_denominator(kOverlap, 4, false);
  const auto torus = members_for_denominator(kOverlap, 4, true);
  for (auto p : torus) CHECK((p >= 0 && p < 4));
  for (auto p : plain) CHECK(std::find(torus.begin(), torus.end(), ((p % 4) + 4) % 4) != torus.end());
}

TEST_CASE("fiber graph structure") {
  for (std::int64_t q : {7, 12, 26, 81, 91}) {
    const FiberGraph g(kOverlap, q);
    for (std::size_t v = 0; v < g.size(); ++v) {
      for (std::size_t i = 0; i < g.branches(); ++i) {
        const auto t = g.target(v, i);
        if (t < 0) continue;
        const auto& b = kOverlap.branch(i);
        CHECK(g.numerator(static_cast<std::size_t>(t)) == b.q * g.numerator(v) - b.p * q);
      }
      // alive iff some successor is alive or the node is on a cycle
      bool succ_alive = false;
      for (std::size_t i = 0; i < g.branches(); ++i) {
        const auto t = g.target(v, i);
        if (t >= 0 && g.alive(static_cast<std::size_t>(t))) succ_alive = true;
      }
      CHECK(g.alive(v) == (g.cyclic(v) || succ_alive));
    }
  }
  Budget tight;
  tight.max_fiber_denominator = 10;
  CHECK_THROWS_AS(FiberGraph(kCantor, 11, tight), BudgetExceeded);
}

TEST_CASE("cantor membership matches the ternary oracle") {
  for (std::int64_t q = 1; q <= 200; ++q) {
    for (std::int64_t p = 0; p <= q; ++p) {
      const bool got = is_member(kCantor, R(p, q)).member;
      // The oracle works on the reduced fraction too.
      const auto r = R(p, q);
      const bool want = oracle::cantor_ternary(big_to_i64(r.numerator()), big_to_i64(r.denominator()));
      if (got != want) FAIL_CHECK("mismatch at " << p << "/" << q);
    }
  }
}

TEST_CASE("members lie in a level-n cylinder for every n") {
  for (const auto* ifs : {&kCantor, &kOverlap, &kMixed}) {
    const Interval h = hull(*ifs);
    for (std::int64_t q = 1; q <= 60; ++q) {
      for (auto p : members_for_denominator(*ifs, q, false)) {
        const auto r = R(p, q);
        // Cylinders of depth n that contain r form a non-empty frontier.
        std::vector<AffineMap> frontier{AffineMap{}};
        for (int n = 1; n <= 20 && !frontier.empty(); ++n) {
          std::vector<AffineMap> next;
          for (const auto& f : frontier)
            for (std::size_t i = 0; i < ifs->size(); ++i) {
              const auto g = f.after(branch_map(*ifs, static_cast<int>(i)));
              if (g.image(h).contains(r)) next.push_back(g);
            }
          std::sort(next.begin(), next.end(), [](const AffineMap& a, const AffineMap& b) {
            return std::tie(a.ratio, a.offset) < std::tie(b.ratio, b.offset);
          });
          next.erase(std::unique(next.begin(), next.end()), next.end());
          frontier = std::move(next);
        }
        CHECK_FALSE(frontier.empty());
      }
    }
  }
}

TEST_CASE("membership agrees with coding enumeration on small denominators") {
  struct Case {
    const RationalIFS* ifs;
    int k, l;
  };
  for (const auto& [ifs, k, l] : {Case{&kCantor, 5, 10}, Case{&kOverlap, 3, 7}, Case{&kMixed, 5, 10}}) {
    std::set<ExactRational> enumerated;
    for (const auto& e : enumerate_rationals(*ifs, k, l))
      if (e.height <= 40) enumerated.insert(e.value);
    for (const auto& v : enumerated) CHECK(is_member(*ifs, v).member);
    // Members whose shortest spelling fits the bounds must have been generated.
    std::size_t covered = 0, total = 0;
    for (std::int64_t q = 1; q <= 40; ++q) {
      for (auto p : members_for_denominator(*ifs, q, false)) {
        ++total;
        const auto v = R(p, q);
        const auto rep = minimal_representation(*ifs, v);
        REQUIRE(rep);
        if (rep->preperiod_len <= static_cast<std::size_t>(k) && rep->period_len <= static_cast<std::size_t>(l)) {
          ++covered;
          CHECK_MESSAGE(enumerated.count(v) == 1, v.to_string());
        }
      }
    }
    CHECK(covered == enumerated.size());
    CHECK(2 * covered > total);
  }
}

TEST_CASE("minimal representation examples") {
  const auto a = minimal_representation(kCantor, R(1, 4));
  REQUIRE(a);
  CHECK(a->value == 8);
  CHECK(a->preperiod_len == 0);
  CHECK(a->period_len == 2);
  const auto b = minimal_representation(kCantor, R(2, 3));
  REQUIRE(b);
  CHECK(b->value == 6);
  CHECK(b->preperiod_len == 1);
  CHECK(b->period_len == 1);
  const auto c = minimal_representation(kCantor, R(1));
  REQUIRE(c);
  CHECK(c->value == 2);
  CHECK_FALSE(minimal_representation(kCantor, R(1, 2)));
}

TEST_CASE("minimal representation is below every enumerated witness") {
  for (const auto* ifs : {&kCantor, &kOverlap, &kMixed}) {
    const auto inv = enumerate_rationals(*ifs, 3, 6);
    std::size_t equal = 0;
    for (const auto& e : inv) {
      if (e.height > 300) continue;
      const auto rep = minimal_representation(*ifs, e.value);
      REQUIRE(rep);
      CHECK(rep->value <= e.intrinsic_height);
      CHECK(rep->value >= e.height);
      CHECK(project(*ifs, rep->coding) == e.value);
      if (rep->value == e.intrinsic_height) ++equal;
    }
    CHECK(equal > 0);
  }
}
