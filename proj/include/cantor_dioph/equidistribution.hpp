#pragma once

// Orbits {b^k p/q mod 1}, exact discrepancy, Weyl sums, Erdős–Turán bounds.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cantor_dioph/big_float.hpp"
#include "cantor_dioph/budget.hpp"
#include "cantor_dioph/exact_rational.hpp"
#include "cantor_dioph/ifs.hpp"

namespace cantor_dioph {

/// {b^k p / q mod 1 : 0 <= k < O_q(b)} in generation order.
std::vector<ExactRational> orbit(std::uint64_t b, std::uint64_t p, std::uint64_t q);

enum class WitnessKind {
  /// Closed interval [a, b] holding too many points.
  excess,
  /// Gap (a, b) approached from inside by closed intervals.
  deficit,
};

struct DiscrepancyReport {
  std::size_t n_points = 0;
  ExactRational discrepancy;
  ExactRational a;
  ExactRational b;
  WitnessKind kind = WitnessKind::excess;
  /// True when the supremum is only approached (open gap or a = b).
  bool limit = false;
};

/// Exact sup over 0 < a < b < 1 of |#{u in [a,b]}/N - (b - a)|.
/// Points must lie in [0, 1); duplicates count with multiplicity.
DiscrepancyReport discrepancy(std::span<const ExactRational> points);

/// cos and sin of 2πk/q for 0 <= k < q at a fixed precision.
class UnitRootTable {
 public:
  UnitRootTable(std::uint64_t q, mpfr_prec_t bits);
  std::uint64_t modulus() const { return q_; }
  mpfr_prec_t bits() const { return bits_; }
  const BigFloat& cos(std::uint64_t k) const { return cos_[k]; }
  const BigFloat& sin(std::uint64_t k) const { return sin_[k]; }
  /// Absolute error bound on every table entry.
  BigFloat entry_error() const;

 private:
  std::uint64_t q_;
  mpfr_prec_t bits_;
  std::vector<BigFloat> cos_, sin_;
};

struct WeylValue {
  BigFloat magnitude{64};
  /// |magnitude - true value| <= error.
  BigFloat error{64};
};

/// Default working precision: 64 decimal digits.
mpfr_prec_t default_weyl_bits();

/// |Σ_u exp(2πi j u)| with a certified error bound.
WeylValue weyl_sum(std::span<const ExactRational> points, std::uint64_t j, mpfr_prec_t bits = default_weyl_bits());
/// Same for points with a common denominator q (numerators in [0, q)), via a table.
WeylValue weyl_sum(std::span<const std::uint64_t> numerators, const UnitRootTable& table, std::uint64_t j);

struct BoundValue {
  BigFloat value{64};
  BigFloat error{64};
  /// value - error >= d, i.e. certified to dominate d.
  bool certainly_at_least(const ExactRational& d) const;
};

/// C (1/A + Σ_{j<=A} |S_j| / (N j)).
BoundValue erdos_turan_bound(std::span<const ExactRational> points, std::uint64_t A, const ExactRational& C,
                             mpfr_prec_t bits = default_weyl_bits());
/// Bounds for A = 1..A_max from one pass of Weyl sums; element A-1 is the bound at A.
std::vector<BoundValue> erdos_turan_ladder(std::span<const std::uint64_t> numerators, const UnitRootTable& table,
                                           std::uint64_t A_max, const ExactRational& C);

struct OrbitProfile {
  std::uint64_t q = 1;
  std::uint64_t b = 2;
  std::uint64_t order = 1;
  std::uint64_t cosets = 1;
  /// max over p coprime to q of |Σ_k exp(2πi p b^k / q)| / O_q(b).
  BigFloat max_weyl{64};
  std::uint64_t max_weyl_p = 0;
  /// min over p coprime to q of the orbit discrepancy.
  ExactRational min_discrepancy;
  std::uint64_t min_discrepancy_p = 0;
};

OrbitProfile orbit_profile(std::uint64_t b, std::uint64_t q, unsigned workers = 1, const Budget& budget = {},
                           mpfr_prec_t bits = default_weyl_bits());

/// Does some point lie in the closed interval J ⊂ [0, 1]?
bool gap_hit(std::span<const ExactRational> points, const Interval& j);

}  // namespace cantor_dioph
