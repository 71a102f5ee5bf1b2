#pragma once

// Rational self-similar iterated function systems on the line:
//   f_i(x) = x / q_i + p_i / q_i,   q_i >= 2, p_i integer.
// Branch indices are 0-based and follow the order the branches were given.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cantor_dioph/budget.hpp"
#include "cantor_dioph/exact_rational.hpp"

namespace cantor_dioph {

/// Sequence of 0-based branch indices.
using Word = std::vector<int>;

std::string word_to_string(std::span<const int> word);
/// Parses "0-2-1"; the empty string is the empty word.
Word word_from_string(std::string_view text);

struct Branch {
  std::int64_t q = 2;
  std::int64_t p = 0;
  friend bool operator==(const Branch&, const Branch&) = default;
};

class RationalIFS {
 public:
  explicit RationalIFS(std::vector<Branch> branches);

  /// f_i(x) = (x + digit_i) / base.
  static RationalIFS homogeneous(std::int64_t base, std::vector<std::int64_t> digits);
  /// Built-in fixtures: cantor, overlap3, full3, mixed23.
  static RationalIFS fixture(std::string_view name);
  static bool is_fixture_name(std::string_view name);

  std::size_t size() const { return branches_.size(); }
  const Branch& branch(std::size_t i) const { return branches_.at(i); }
  std::span<const Branch> branches() const { return branches_; }

  bool is_homogeneous() const { return homogeneous_; }
  /// Common q of a homogeneous system; throws std::domain_error otherwise.
  std::int64_t base() const;
  std::vector<std::int64_t> digits() const;

  /// Throws std::out_of_range on a bad index.
  void check_word(std::span<const int> word) const;

  /// Canonical textual key, stable across runs.
  std::string key() const;

  friend bool operator==(const RationalIFS& a, const RationalIFS& b) { return a.branches_ == b.branches_; }

 private:
  std::vector<Branch> branches_;
  bool homogeneous_ = false;
};

struct Interval {
  ExactRational lo;
  ExactRational hi;

  ExactRational length() const { return hi - lo; }
  bool contains(const ExactRational& x) const { return lo <= x && x <= hi; }
  bool intersects(const Interval& o) const { return lo <= o.hi && o.lo <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// x -> ratio * x + offset with 0 < ratio < 1 for non-empty words.
struct AffineMap {
  ExactRational ratio{1};
  ExactRational offset{0};

  ExactRational operator()(const ExactRational& x) const { return ratio * x + offset; }
  /// this ∘ inner.
  AffineMap after(const AffineMap& inner) const { return {ratio * inner.ratio, ratio * inner.offset + offset}; }
  ExactRational fixed_point() const;
  Interval image(const Interval& iv) const { return {(*this)(iv.lo), (*this)(iv.hi)}; }

  friend bool operator==(const AffineMap&, const AffineMap&) = default;
};

struct AffineMapHash {
  std::size_t operator()(const AffineMap& m) const noexcept {
    return m.ratio.hash() * 1000003u ^ m.offset.hash();
  }
};

/// Convex hull of the attractor: [min p_i/(q_i-1), max p_i/(q_i-1)].
Interval hull(const RationalIFS& ifs);

AffineMap branch_map(const RationalIFS& ifs, int i);

/// f_{w_1} ∘ ... ∘ f_{w_n}; the identity for the empty word.
AffineMap compose(const RationalIFS& ifs, std::span<const int> word);

/// Product of q_i along the word (the inverse contraction ratio).
BigInt word_scale(const RationalIFS& ifs, std::span<const int> word);

/// Distinct numerators sum_j p_{i_j} b^{n-j} of level-n offsets, sorted.
/// Requires a homogeneous system and n >= 1.
std::vector<std::int64_t> level_translates(const RationalIFS& ifs, int n);

/// All same-length words whose composed map equals compose(word).
/// Sorted lexicographically.
std::vector<Word> overlap_class(const RationalIFS& ifs, std::span<const int> word);

/// Words w with c_w <= r < c_parent(w), for 0 < r < 1, in depth-first
/// lexicographic order.
std::vector<Word> cutting_set(const RationalIFS& ifs, const ExactRational& r, const Budget& budget = {});

/// Distinct maps {f_w : w in Λ_r}.
std::vector<AffineMap> cutting_maps(const RationalIFS& ifs, const ExactRational& r, const Budget& budget = {});

struct SamplingPlan {
  /// 0 means every cylinder left endpoint at the matching scale.
  std::size_t max_probes = 0;
};

struct SeparationRow {
  ExactRational scale;
  std::size_t distinct_maps = 0;
  std::size_t probes = 0;
  std::size_t max_count = 0;
  ExactRational argmax_probe;
  /// log(max_count) / -log(scale).
  double awsc_exponent = 0.0;
};

/// For each scale r: max over probes x of the number of distinct maps in
/// Λ_r whose hull image meets the closed ball B(x, r).
std::vector<SeparationRow> separation_profile(const RationalIFS& ifs, std::span<const ExactRational> scales,
                                              const SamplingPlan& plan = {}, const Budget& budget = {});

}  // namespace cantor_dioph
