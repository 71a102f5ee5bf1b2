#include <map>
#include <random>
#include <set>
#include <sstream>

#include "cantor_dioph/codings.hpp"
#include "doctest.h"

using namespace cantor_dioph;

namespace {
ExactRational R(std::int64_t p, std::int64_t q = 1) { return ExactRational(p, q); }
const RationalIFS kCantor = RationalIFS::fixture("cantor");
const RationalIFS kOverlap = RationalIFS::fixture("overlap3");
const RationalIFS kMixed = RationalIFS::fixture("mixed23");

std::set<ExactRational> values(const std::vector<RationalInventoryEntry>& inv) {
  std::set<ExactRational> s;
  for (const auto& e : inv) s.insert(e.value);
  return s;
}

// Every coding without any skipping, minimum raw height per value.
std::map<ExactRational, BigInt> naive_inventory(const RationalIFS& ifs, int k_max, int l_max) {
  std::map<ExactRational, BigInt> out;
  const int m = static_cast<int>(ifs.size());
  auto words = [m](int len) {
    std::vector<Word> ws{Word{}};
    for (int i = 0; i < len; ++i) {
      std::vector<Word> nx;
      for (auto& w : ws)
        for (int d = 0; d < m; ++d) {
          auto x = w;
          x.push_back(d);
          nx.push_back(x);
        }
      ws = nx;
    }
    return ws;
  };
  for (int k = 0; k <= k_max; ++k)
    for (const auto& pre : words(k))
      for (int l = 1; l <= l_max; ++l)
        for (const auto& per : words(l)) {
          // Direct evaluation: x = f_pre(y) with y = f_per(y) solved by hand.
          ExactRational a(1), c(0);
          for (int i : per) {
            c = c + a * ExactRational(ifs.branch(i).p, ifs.branch(i).q);
            a = a * ExactRational(1, ifs.branch(i).q);
          }
          ExactRational y = c / (ExactRational(1) - a);
          for (auto it = pre.rbegin(); it != pre.rend(); ++it)
            y = (y + ExactRational(ifs.branch(*it).p)) / ExactRational(ifs.branch(*it).q);
          BigInt raw = 1, pp = 1;
          for (int i : pre) raw *= ifs.branch(i).q;
          for (int i : per) pp *= ifs.branch(i).q;
          raw *= pp - 1;
          auto it = out.find(y);
          if (it == out.end() || raw < it->second) out[y] = raw;
        }
  return out;
}
}  // namespace

TEST_CASE("projection examples") {
  CHECK(project(kCantor, {{}, {0, 1}}) == R(1, 4));
  CHECK(project(kCantor, {{1}, {0}}) == R(2, 3));
  for (std::size_t i = 0; i < kMixed.size(); ++i) {
    const auto& b = kMixed.branch(i);
    CHECK(project(kMixed, {{}, {static_cast<int>(i)}}) == R(b.p, b.q - 1));
  }
  CHECK_THROWS_AS(project(kCantor, {{0}, {}}), std::invalid_argument);
}

TEST_CASE("raw intrinsic height") {
  CHECK(raw_intrinsic_height(kCantor, {{}, {0, 1}}) == 8);
  CHECK(raw_intrinsic_height(kCantor, {{1}, {0}}) == 6);
  CHECK(raw_intrinsic_height(kMixed, {{0}, {1}}) == 4);
}

TEST_CASE("canonicalization preserves value and is idempotent") {
  std::mt19937_64 rng(3);
  for (const auto* ifs : {&kCantor, &kOverlap, &kMixed}) {
    for (int t = 0; t < 500; ++t) {
      Coding c;
      c.preperiod.resize(rng() % 5);
      c.period.resize(1 + rng() % 4);
      for (auto& x : c.preperiod) x = static_cast<int>(rng() % ifs->size());
      for (auto& x : c.period) x = static_cast<int>(rng() % ifs->size());
      if (rng() % 3 == 0) {
        const auto p = c.period;
        c.period.insert(c.period.end(), p.begin(), p.end());
      }
      const auto cc = canonicalize(c);
      CHECK(project(*ifs, cc) == project(*ifs, c));
      CHECK(canonicalize(cc) == cc);
      CHECK(raw_intrinsic_height(*ifs, cc) <= raw_intrinsic_height(*ifs, c));
    }
  }
  CHECK(canonicalize({{0, 1}, {0, 1, 0, 1}}) == Coding{{}, {0, 1}});
  CHECK(canonicalize({{1, 1}, {1}}) == Coding{{}, {1}});
}

TEST_CASE("shift consistency") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    Coding c;
    c.preperiod.resize(rng() % 4);
    c.period.resize(1 + rng() % 4);
    for (auto& x : c.preperiod) x = static_cast<int>(rng() % 2);
    for (auto& x : c.period) x = static_cast<int>(rng() % 2);
    const auto tail = project(kMixed, {{}, c.period});
    CHECK(compose(kMixed, c.period)(tail) == tail);
    CHECK(project(kMixed, c) == compose(kMixed, c.preperiod)(tail));
  }
}

TEST_CASE("enumeration examples") {
  const auto a = enumerate_rationals(kCantor, 0, 1);
  REQUIRE(a.size() == 2);
  CHECK(a[0].value == R(0));
  CHECK(a[0].intrinsic_height == 2);
  CHECK(a[1].value == R(1));
  CHECK(a[1].intrinsic_height == 2);
  const auto b = enumerate_rationals(kCantor, 0, 2);
  CHECK(values(b) == std::set<ExactRational>{R(0), R(1, 4), R(3, 4), R(1)});
  for (const auto& e : b)
    if (e.value == R(1, 4) || e.value == R(3, 4)) CHECK(e.intrinsic_height == 8);
  const auto c = enumerate_rationals(kCantor, 1, 1);
  CHECK(values(c) == std::set<ExactRational>{R(0), R(1, 3), R(2, 3), R(1)});
  for (const auto& e : c)
    if (e.height == 3) CHECK(e.intrinsic_height == 6);
}

TEST_CASE("enumeration agrees with naive enumeration") {
  for (const auto* ifs : {&kCantor, &kOverlap, &kMixed}) {
    const auto naive = naive_inventory(*ifs, 2, 4);
    const auto inv = enumerate_rationals(*ifs, 2, 4);
    REQUIRE(inv.size() == naive.size());
    for (const auto& e : inv) {
      CHECK(naive.at(e.value) == e.intrinsic_height);
      CHECK(project(*ifs, e.witness) == e.value);
      CHECK(raw_intrinsic_height(*ifs, e.witness) == e.intrinsic_height);
      CHECK(mpz_divisible_p(e.intrinsic_height.get_mpz_t(), e.height.get_mpz_t()));
      CHECK(e.intrinsic_height >= e.height);
    }
  }
}

TEST_CASE("enumeration is monotone in its bounds and worker independent") {
  const auto small = values(enumerate_rationals(kOverlap, 1, 3));
  const auto big = values(enumerate_rationals(kOverlap, 2, 4));
  for (const auto& v : small) CHECK(big.count(v) == 1);
  std::ostringstream a, b;
  write_inventory_csv(a, enumerate_rationals(kOverlap, 3, 5, {}, 1));
  write_inventory_csv(b, enumerate_rationals(kOverlap, 3, 5, {}, 4));
  CHECK(a.str() == b.str());
}

TEST_CASE("enumeration budget guard") {
  Budget tight;
  tight.max_words = 100;
  CHECK_THROWS_AS(enumerate_rationals(kCantor, 3, 6, tight), BudgetExceeded);
  CHECK_THROWS_AS(enumerate_rationals(kCantor, -1, 2), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_rationals(kCantor, 1, 0), std::invalid_argument);
}

TEST_CASE("uper examples") {
  CHECK(uper(kCantor, Word{0, 1}) == std::vector<ExactRational>{R(1, 4), R(1)});
  CHECK(uper(kCantor, Word{0}) == std::vector<ExactRational>{R(0)});
  const auto u = uper(kOverlap, Word{1, 0});
  std::set<ExactRational> expect{project(kOverlap, {{}, {1, 0}}), project(kOverlap, {{}, {0}}),
                                 project(kOverlap, {{}, {0, 2}}), project(kOverlap, {{}, {2}})};
  CHECK(std::set<ExactRational>(u.begin(), u.end()) == expect);
}

TEST_CASE("uper size bounds") {
  for (int n = 1; n <= 6; ++n) {
    std::vector<int> idx(n, 0);
    std::size_t max_class = 0, max_uper = 0;
    for (;;) {
      const Word w(idx.begin(), idx.end());
      const auto u = uper(kOverlap, w).size();
      const auto cls = overlap_class(kOverlap, w).size();
      CHECK(u >= 1);
      CHECK(u <= n * cls);
      max_class = std::max(max_class, cls);
      max_uper = std::max(max_uper, u);
      int pos = n - 1;
      while (pos >= 0 && ++idx[pos] == 3) idx[pos--] = 0;
      if (pos < 0) break;
    }
    CHECK(max_uper <= static_cast<std::size_t>(n) * max_class);
  }
}

TEST_CASE("uper level totals match per-class uper") {
  for (const auto* ifs : {&kCantor, &kOverlap, &kMixed}) {
    for (int n = 1; n <= 5; ++n) {
      std::map<AffineMap, std::size_t, bool (*)(const AffineMap&, const AffineMap&)> seen(
          [](const AffineMap& a, const AffineMap& b) { return std::tie(a.ratio, a.offset) < std::tie(b.ratio, b.offset); });
      std::vector<int> idx(n, 0);
      const int m = static_cast<int>(ifs->size());
      for (;;) {
        const Word w(idx.begin(), idx.end());
        seen.emplace(compose(*ifs, w), uper(*ifs, w).size());
        int pos = n - 1;
        while (pos >= 0 && ++idx[pos] == m) idx[pos--] = 0;
        if (pos < 0) break;
      }
      std::map<ExactRational, std::pair<std::uint64_t, std::uint64_t>> expect;
      for (const auto& [f, u] : seen) {
        expect[f.ratio].first += 1;
        expect[f.ratio].second += u;
      }
      const auto got = uper_level(*ifs, n);
      REQUIRE(got.size() == expect.size());
      for (const auto& t : got) {
        CHECK(expect[t.ratio].first == t.classes);
        CHECK(expect[t.ratio].second == t.uper_total);
      }
    }
  }
}

TEST_CASE("cantor uper level totals") {
  const std::uint64_t expect[] = {2, 6, 18, 48, 126, 306, 738, 1716, 3936, 8862, 19770, 43560};
  for (int n = 1; n <= 12; ++n) {
    const auto t = uper_level(kCantor, n);
    REQUIRE(t.size() == 1);
    CHECK(t[0].classes == (std::uint64_t{1} << n));
    CHECK(t[0].uper_total == expect[n - 1]);
  }
}

TEST_CASE("inventory exports") {
  std::ostringstream csv, jsonl;
  const auto inv = enumerate_rationals(kCantor, 1, 1);
  write_inventory_csv(csv, inv);
  write_inventory_jsonl(jsonl, inv);
  CHECK(csv.str().rfind("value_num,value_den,height,intrinsic_height,preperiod,period\n", 0) == 0);
  CHECK(csv.str().find("1,3,3,6,0,1\n") != std::string::npos);
  CHECK(jsonl.str().find(R"({"value_num":"2","value_den":"3","height":"3","intrinsic_height":"6","preperiod":"1","period":"0"})") !=
        std::string::npos);
}
