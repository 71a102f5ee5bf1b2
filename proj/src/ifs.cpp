#include "cantor_dioph/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace cantor_dioph {

std::string word_to_string(std::span<const int> word) {
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(word[i]);
  }
  return out;
}

Word word_from_string(std::string_view text) {
  Word w;
  if (text.empty()) return w;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto dash = text.find('-', pos);
    const std::string tok(text.substr(pos, dash == std::string_view::npos ? std::string_view::npos : dash - pos));
    if (tok.empty()) throw std::invalid_argument("malformed word: '" + std::string(text) + "'");
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size() || v < 0) throw std::invalid_argument("malformed word: '" + std::string(text) + "'");
    w.push_back(v);
    if (dash == std::string_view::npos) break;
    pos = dash + 1;
  }
  return w;
}

RationalIFS::RationalIFS(std::vector<Branch> branches) : branches_(std::move(branches)) {
  if (branches_.size() < 2) throw std::invalid_argument("an IFS needs at least two branches");
  for (const auto& b : branches_) {
    if (b.q < 2) throw std::invalid_argument("every branch needs q >= 2");
  }
  homogeneous_ = std::all_of(branches_.begin(), branches_.end(),
                             [&](const Branch& b) { return b.q == branches_.front().q; });
}

RationalIFS RationalIFS::homogeneous(std::int64_t base, std::vector<std::int64_t> digits) {
  std::vector<Branch> br;
  br.reserve(digits.size());
  for (auto d : digits) br.push_back({base, d});
  return RationalIFS(std::move(br));
}

bool RationalIFS::is_fixture_name(std::string_view name) {
  return name == "cantor" || name == "overlap3" || name == "full3" || name == "mixed23";
}

RationalIFS RationalIFS::fixture(std::string_view name) {
  if (name == "cantor") return homogeneous(3, {0, 2});
  if (name == "overlap3") return homogeneous(3, {0, 1, 3});
  if (name == "full3") return homogeneous(3, {0, 1, 2});
  if (name == "mixed23") return RationalIFS({{2, 0}, {3, 2}});
  throw std::invalid_argument("unknown fixture: " + std::string(name));
}

std::int64_t RationalIFS::base() const {
  if (!homogeneous_) throw std::domain_error("IFS is not homogeneous");
  return branches_.front().q;
}

std::vector<std::int64_t> RationalIFS::digits() const {
  std::vector<std::int64_t> d;
  d.reserve(branches_.size());
  for (const auto& b : branches_) d.push_back(b.p);
  return d;
}

void RationalIFS::check_word(std::span<const int> word) const {
  for (int i : word) {
    if (i < 0 || static_cast<std::size_t>(i) >= branches_.size()) {
      throw std::out_of_range("branch index " + std::to_string(i) + " out of range for " +
                              std::to_string(branches_.size()) + " branches");
    }
  }
}

std::string RationalIFS::key() const {
  std::ostringstream os;
  for (const auto& b : branches_) os << b.q << ':' << b.p << ';';
  return os.str();
}

ExactRational AffineMap::fixed_point() const {
  if (ratio == ExactRational(1)) throw std::domain_error("identity map has no unique fixed point");
  return offset / (ExactRational(1) - ratio);
}

Interval hull(const RationalIFS& ifs) {
  ExactRational lo, hi;
  for (std::size_t i = 0; i < ifs.size(); ++i) {
    const auto& b = ifs.branch(i);
    const ExactRational fp(b.p, b.q - 1);
    if (i == 0 || fp < lo) lo = fp;
    if (i == 0 || hi < fp) hi = fp;
  }
  return {lo, hi};
}

AffineMap branch_map(const RationalIFS& ifs, int i) {
  const auto& b = ifs.branch(static_cast<std::size_t>(i));
  return {ExactRational(1, b.q), ExactRational(b.p, b.q)};
}

AffineMap compose(const RationalIFS& ifs, std::span<const int> word) {
  ifs.check_word(word);
  AffineMap m;
  for (int i : word) m = m.after(branch_map(ifs, i));
  return m;
}

BigInt word_scale(const RationalIFS& ifs, std::span<const int> word) {
  ifs.check_word(word);
  BigInt s = 1;
  for (int i : word) s *= big_from_i64(ifs.branch(static_cast<std::size_t>(i)).q);
  return s;
}

std::vector<std::int64_t> level_translates(const RationalIFS& ifs, int n) {
  if (!ifs.is_homogeneous()) throw std::domain_error("level_translates needs a homogeneous IFS");
  if (n < 1) throw std::invalid_argument("level must be >= 1");
  const __int128 b = ifs.base();
  const auto digits = ifs.digits();
  std::vector<std::int64_t> level{0};
  constexpr __int128 kMax = std::numeric_limits<std::int64_t>::max();
  for (int k = 0; k < n; ++k) {
    std::vector<std::int64_t> next;
    next.reserve(level.size() * digits.size());
    for (auto t : level) {
      for (auto d : digits) {
        const __int128 v = b * t + d;
        if (v > kMax || v < -kMax) throw std::overflow_error("level translates overflow 64 bits");
        next.push_back(static_cast<std::int64_t>(v));
      }
    }
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
    level = std::move(next);
  }
  return level;
}

std::vector<Word> overlap_class(const RationalIFS& ifs, std::span<const int> word) {
  if (word.empty()) throw std::invalid_argument("overlap_class needs a non-empty word");
  const AffineMap target = compose(ifs, word);
  const BigInt target_scale = word_scale(ifs, word);
  const Interval h = hull(ifs);
  // Every suffix offset f_S(0) lies in conv(hull ∪ {0}).
  const Interval offsets{min(h.lo, ExactRational(0)), max(h.hi, ExactRational(0))};
  const std::size_t n = word.size();

  std::vector<Word> out;
  Word cur;
  cur.reserve(n);
  auto dfs = [&](auto&& self, const AffineMap& prefix, const BigInt& scale) -> void {
    if (cur.size() == n) {
      if (prefix == target) out.push_back(cur);
      return;
    }
    for (std::size_t i = 0; i < ifs.size(); ++i) {
      const BigInt s = scale * big_from_i64(ifs.branch(i).q);
      if (!mpz_divisible_p(target_scale.get_mpz_t(), s.get_mpz_t())) continue;
      const AffineMap next = prefix.after(branch_map(ifs, static_cast<int>(i)));
      if (cur.size() + 1 < n) {
        const ExactRational needed = (target.offset - next.offset) / next.ratio;
        if (!offsets.contains(needed)) continue;
      }
      cur.push_back(static_cast<int>(i));
      self(self, next, s);
      cur.pop_back();
    }
  };
  dfs(dfs, AffineMap{}, BigInt(1));
  return out;
}

std::vector<Word> cutting_set(const RationalIFS& ifs, const ExactRational& r, const Budget& budget) {
  if (r.sign() <= 0 || r >= ExactRational(1)) throw std::invalid_argument("cutting_set needs 0 < r < 1");
  std::vector<Word> out;
  Word cur;
  std::uint64_t visited = 0;
  auto dfs = [&](auto&& self, const ExactRational& ratio) -> void {
    for (std::size_t i = 0; i < ifs.size(); ++i) {
      if (++visited > budget.max_words) throw BudgetExceeded("cutting_set exceeds max_words");
      const ExactRational c = ratio * ExactRational(1, ifs.branch(i).q);
      cur.push_back(static_cast<int>(i));
      if (c <= r) {
        out.push_back(cur);
      } else {
        self(self, c);
      }
      cur.pop_back();
    }
  };
  dfs(dfs, ExactRational(1));
  return out;
}

std::vector<AffineMap> cutting_maps(const RationalIFS& ifs, const ExactRational& r, const Budget& budget) {
  if (r.sign() <= 0 || r >= ExactRational(1)) throw std::invalid_argument("cutting scale needs 0 < r < 1");
  // f_w = f_w' implies equal children, so the walk can run on distinct maps.
  std::unordered_set<AffineMap, AffineMapHash> result;
  std::vector<AffineMap> frontier{AffineMap{}};
  std::uint64_t visited = 0;
  while (!frontier.empty()) {
    std::unordered_set<AffineMap, AffineMapHash> next;
    for (const auto& m : frontier) {
      for (std::size_t i = 0; i < ifs.size(); ++i) {
        if (++visited > budget.max_words) throw BudgetExceeded("cutting_maps exceeds max_words");
        AffineMap child = m.after(branch_map(ifs, static_cast<int>(i)));
        if (child.ratio <= r) {
          result.insert(std::move(child));
        } else {
          next.insert(std::move(child));
        }
      }
    }
    frontier.assign(next.begin(), next.end());
  }
  std::vector<AffineMap> out(result.begin(), result.end());
  std::sort(out.begin(), out.end(), [](const AffineMap& a, const AffineMap& b) {
    if (a.offset != b.offset) return a.offset < b.offset;
    return a.ratio < b.ratio;
  });
  return out;
}

std::vector<SeparationRow> separation_profile(const RationalIFS& ifs, std::span<const ExactRational> scales,
                                              const SamplingPlan& plan, const Budget& budget) {
  if (scales.empty()) throw std::invalid_argument("separation_profile needs at least one scale");
  const Interval h = hull(ifs);
  std::vector<SeparationRow> rows;
  rows.reserve(scales.size());
  for (const auto& r : scales) {
    const auto maps = cutting_maps(ifs, r, budget);
    std::vector<ExactRational> lefts, rights;
    lefts.reserve(maps.size());
    rights.reserve(maps.size());
    for (const auto& m : maps) {
      const Interval img = m.image(h);
      lefts.push_back(img.lo);
      rights.push_back(img.hi);
    }
    std::vector<ExactRational> probes = lefts;
    std::sort(probes.begin(), probes.end());
    probes.erase(std::unique(probes.begin(), probes.end()), probes.end());
    if (plan.max_probes > 0 && probes.size() > plan.max_probes) {
      std::vector<ExactRational> sampled;
      sampled.reserve(plan.max_probes);
      for (std::size_t k = 0; k < plan.max_probes; ++k) {
        sampled.push_back(probes[k * (probes.size() - 1) / std::max<std::size_t>(plan.max_probes - 1, 1)]);
      }
      probes = std::move(sampled);
    }
    std::sort(lefts.begin(), lefts.end());
    std::sort(rights.begin(), rights.end());

    SeparationRow row;
    row.scale = r;
    row.distinct_maps = maps.size();
    row.probes = probes.size();
    for (const auto& x : probes) {
      // Images meeting [x - r, x + r]: left <= x + r, minus those with right < x - r.
      const auto reach_left = std::upper_bound(lefts.begin(), lefts.end(), x + r) - lefts.begin();
      const auto gone_right = std::lower_bound(rights.begin(), rights.end(), x - r) - rights.begin();
      const auto count = static_cast<std::size_t>(reach_left - gone_right);
      if (count > row.max_count) {
        row.max_count = count;
        row.argmax_probe = x;
      }
    }
    const double neg_log_r = -std::log(r.to_double());
    row.awsc_exponent = row.max_count > 0 ? std::log(static_cast<double>(row.max_count)) / neg_log_r : 0.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace cantor_dioph
