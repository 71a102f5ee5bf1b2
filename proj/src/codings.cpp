#include "cantor_dioph/codings.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "cantor_dioph/parallel.hpp"
#include "json.hpp"

namespace cantor_dioph {

namespace {

// Smallest d with w = (w[0..d))^(n/d).
std::size_t primitive_root_length(const Word& w) {
  const std::size_t n = w.size();
  for (std::size_t d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    bool ok = true;
    for (std::size_t i = d; i < n && ok; ++i) ok = w[i] == w[i - d];
    if (ok) return d;
  }
  return n;
}

void require_valid(const RationalIFS& ifs, const Coding& c) {
  if (c.period.empty()) throw std::invalid_argument("coding period must be non-empty");
  ifs.check_word(c.preperiod);
  ifs.check_word(c.period);
}

// Deterministic preference among codings of the same value.
bool better(const BigInt& raw_a, const Coding& a, const BigInt& raw_b, const Coding& b) {
  if (raw_a != raw_b) return raw_a < raw_b;
  const auto la = a.preperiod.size() + a.period.size();
  const auto lb = b.preperiod.size() + b.period.size();
  if (la != lb) return la < lb;
  return std::tie(a.preperiod, a.period) < std::tie(b.preperiod, b.period);
}

struct Candidate {
  ExactRational value;
  BigInt raw;
  Coding coding;
};

std::vector<Word> all_words(std::size_t m, int len) {
  std::vector<Word> out{Word{}};
  for (int k = 0; k < len; ++k) {
    std::vector<Word> next;
    next.reserve(out.size() * m);
    for (const auto& w : out) {
      for (std::size_t i = 0; i < m; ++i) {
        auto x = w;
        x.push_back(static_cast<int>(i));
        next.push_back(std::move(x));
      }
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace

std::string to_string(const Coding& c) { return word_to_string(c.preperiod) + "|" + word_to_string(c.period); }

Coding canonicalize(const Coding& c) {
  if (c.period.empty()) throw std::invalid_argument("coding period must be non-empty");
  Coding out;
  out.preperiod = c.preperiod;
  out.period.assign(c.period.begin(), c.period.begin() + static_cast<std::ptrdiff_t>(primitive_root_length(c.period)));
  while (!out.preperiod.empty() && out.preperiod.back() == out.period.back()) {
    out.preperiod.pop_back();
    std::rotate(out.period.rbegin(), out.period.rbegin() + 1, out.period.rend());
  }
  return out;
}

bool is_canonical(const Coding& c) { return canonicalize(c) == c; }

ExactRational project(const RationalIFS& ifs, const Coding& c) {
  require_valid(ifs, c);
  const AffineMap per = compose(ifs, c.period);
  return compose(ifs, c.preperiod)(per.fixed_point());
}

BigInt raw_intrinsic_height(const RationalIFS& ifs, const Coding& c) {
  require_valid(ifs, c);
  return word_scale(ifs, c.preperiod) * (word_scale(ifs, c.period) - 1);
}

std::vector<RationalInventoryEntry> enumerate_rationals(const RationalIFS& ifs, int k_max, int l_max,
                                                        const Budget& budget, unsigned workers) {
  if (k_max < 0) throw std::invalid_argument("k_max must be >= 0");
  if (l_max < 1) throw std::invalid_argument("l_max must be >= 1");
  const std::size_t m = ifs.size();
  // Candidate count sum_k m^k * sum_l m^l, checked before any allocation.
  BigInt pre_count = 0, per_count = 0, p = 1;
  for (int k = 0; k <= std::max(k_max, l_max); ++k) {
    if (k <= k_max) pre_count += p;
    if (k >= 1 && k <= l_max) per_count += p;
    p *= static_cast<unsigned long>(m);
  }
  if (pre_count * per_count > big_from_u64(budget.max_words)) {
    throw BudgetExceeded("enumerate_rationals: " + to_string(pre_count * per_count) + " codings exceed max_words=" +
                         std::to_string(budget.max_words));
  }

  struct Pre {
    Word word;
    AffineMap map;
    BigInt scale;
  };
  std::vector<Pre> pres;
  for (int k = 0; k <= k_max; ++k) {
    for (auto& w : all_words(m, k)) {
      AffineMap f = compose(ifs, w);
      BigInt s = word_scale(ifs, w);
      pres.push_back({std::move(w), std::move(f), std::move(s)});
    }
  }
  struct Per {
    Word word;
    ExactRational fixed;
    BigInt scale_minus_one;
  };
  std::vector<Per> pers;
  for (int l = 1; l <= l_max; ++l) {
    for (auto& w : all_words(m, l)) {
      if (primitive_root_length(w) != w.size()) continue;
      ExactRational fp = compose(ifs, w).fixed_point();
      BigInt s = word_scale(ifs, w) - 1;
      pers.push_back({std::move(w), std::move(fp), std::move(s)});
    }
  }

  constexpr std::uint64_t kChunk = 64;
  std::vector<std::vector<Candidate>> parts(chunk_count(0, pers.size(), kChunk));
  parallel_chunks(0, pers.size(), kChunk, workers, [&](std::size_t chunk, std::uint64_t lo, std::uint64_t hi) {
    auto& out = parts[chunk];
    for (std::uint64_t i = lo; i < hi; ++i) {
      const auto& per = pers[i];
      for (const auto& pre : pres) {
        // A preperiod ending in the period's last letter is a longer spelling
        // of a shorter coding with the same value.
        if (!pre.word.empty() && pre.word.back() == per.word.back()) continue;
        out.push_back({pre.map(per.fixed), pre.scale * per.scale_minus_one, Coding{pre.word, per.word}});
      }
    }
  });

  std::unordered_map<ExactRational, Candidate> best;
  for (auto& part : parts) {
    for (auto& c : part) {
      auto it = best.find(c.value);
      if (it == best.end()) {
        best.emplace(c.value, std::move(c));
      } else if (better(c.raw, c.coding, it->second.raw, it->second.coding)) {
        it->second = std::move(c);
      }
    }
  }
  std::vector<RationalInventoryEntry> out;
  out.reserve(best.size());
  for (auto& [v, c] : best) out.push_back({v, v.height(), c.raw, c.coding});
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
  return out;
}

std::vector<ExactRational> uper(const RationalIFS& ifs, std::span<const int> word) {
  const auto cls = overlap_class(ifs, word);
  std::vector<ExactRational> vals;
  for (const auto& j : cls) {
    for (std::size_t k = 0; k < j.size(); ++k) {
      vals.push_back(compose(ifs, std::span<const int>(j).subspan(k)).fixed_point());
    }
  }
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  return vals;
}

namespace {

std::vector<UperLevelTerm> uper_level_homogeneous(const RationalIFS& ifs, int n) {
  const std::int64_t b = ifs.base();
  const auto digits = ifs.digits();
  const std::size_t m = digits.size();
  // b^n must fit comfortably; suffix values are T/(b^L - 1) reduced.
  std::vector<std::int64_t> pw(static_cast<std::size_t>(n) + 1, 1);
  for (int i = 1; i <= n; ++i) {
    if (pw[i - 1] > std::numeric_limits<std::int64_t>::max() / b / 4) throw std::overflow_error("uper_level: b^n too large");
    pw[i] = pw[i - 1] * b;
  }
  struct PairHash {
    std::size_t operator()(const std::pair<std::int64_t, std::int64_t>& p) const noexcept {
      return std::hash<std::int64_t>{}(p.first) * 1000003u ^ std::hash<std::int64_t>{}(p.second);
    }
  };
  using ValueSet = std::unordered_set<std::pair<std::int64_t, std::int64_t>, PairHash>;
  std::unordered_map<std::int64_t, ValueSet> classes;
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (;;) {
    std::int64_t translate = 0;
    for (int j = 0; j < n; ++j) translate = translate * b + digits[static_cast<std::size_t>(idx[j])];
    auto& set = classes[translate];
    std::int64_t suffix = 0;
    for (int k = n - 1; k >= 0; --k) {
      const int len = n - k;
      suffix += digits[static_cast<std::size_t>(idx[k])] * pw[len - 1];
      std::int64_t num = suffix, den = pw[len] - 1;
      const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
      if (g > 1) {
        num /= g;
        den /= g;
      }
      set.insert({num, den});
    }
    int pos = n - 1;
    while (pos >= 0 && ++idx[pos] == static_cast<int>(m)) idx[pos--] = 0;
    if (pos < 0) break;
  }
  UperLevelTerm t;
  t.ratio = ExactRational(BigInt(1), big_from_i64(pw[n]));
  t.classes = classes.size();
  for (const auto& [_, s] : classes) t.uper_total += s.size();
  return {t};
}

}  // namespace

std::vector<UperLevelTerm> uper_level(const RationalIFS& ifs, int n, const Budget& budget) {
  if (n < 1) throw std::invalid_argument("uper_level needs n >= 1");
  BigInt words = 1;
  for (int i = 0; i < n; ++i) words *= static_cast<unsigned long>(ifs.size());
  if (words > big_from_u64(budget.max_words)) {
    throw BudgetExceeded("uper_level: " + to_string(words) + " words exceed max_words=" + std::to_string(budget.max_words));
  }
  if (ifs.is_homogeneous()) {
    BigInt bn = 1;
    for (int i = 0; i < n; ++i) bn *= big_from_i64(ifs.base());
    if (bn < BigInt(1) << 58) return uper_level_homogeneous(ifs, n);
  }
  std::unordered_map<AffineMap, std::unordered_set<ExactRational>, AffineMapHash> classes;
  for (const auto& w : all_words(ifs.size(), n)) {
    auto& set = classes[compose(ifs, w)];
    for (std::size_t k = 0; k < w.size(); ++k) {
      set.insert(compose(ifs, std::span<const int>(w).subspan(k)).fixed_point());
    }
  }
  std::map<ExactRational, UperLevelTerm> by_ratio;
  for (const auto& [f, s] : classes) {
    auto& t = by_ratio[f.ratio];
    t.ratio = f.ratio;
    t.classes += 1;
    t.uper_total += s.size();
  }
  std::vector<UperLevelTerm> out;
  for (auto& [_, t] : by_ratio) out.push_back(t);
  return out;
}

void write_inventory_csv(std::ostream& os, const std::vector<RationalInventoryEntry>& entries) {
  os << "value_num,value_den,height,intrinsic_height,preperiod,period\n";
  for (const auto& e : entries) {
    os << to_string(e.value.numerator()) << ',' << to_string(e.value.denominator()) << ',' << to_string(e.height) << ','
       << to_string(e.intrinsic_height) << ',' << word_to_string(e.witness.preperiod) << ','
       << word_to_string(e.witness.period) << '\n';
  }
}

void write_inventory_jsonl(std::ostream& os, const std::vector<RationalInventoryEntry>& entries) {
  for (const auto& e : entries) {
    nlohmann::ordered_json j;
    j["value_num"] = to_string(e.value.numerator());
    j["value_den"] = to_string(e.value.denominator());
    j["height"] = to_string(e.height);
    j["intrinsic_height"] = to_string(e.intrinsic_height);
    j["preperiod"] = word_to_string(e.witness.preperiod);
    j["period"] = word_to_string(e.witness.period);
    os << j.dump() << '\n';
  }
}

}  // namespace cantor_dioph
