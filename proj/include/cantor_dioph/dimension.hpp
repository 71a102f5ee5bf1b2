#pragma once

// Dimension diagnostics: approximation functions, Q-counting, box counts,
// covering-series thresholds and b-adic ball systems.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cantor_dioph/budget.hpp"
#include "cantor_dioph/exact_rational.hpp"
#include "cantor_dioph/ifs.hpp"

namespace cantor_dioph {

/// ψ: N -> R_+, either c·q^(-δ) or a step table.
class ApproxFunction {
 public:
  static ApproxFunction power(double delta, double coefficient = 1.0);
  /// Step interpolation: ψ(q) is the value at the largest key <= q (the
  /// first value below the first key). Values must be positive.
  static ApproxFunction tabulated(std::vector<std::pair<std::uint64_t, double>> table);
  /// "pow:D" or "pow:D:C" for C·q^-D; "table:PATH" for a file of "q,psi" lines.
  static ApproxFunction parse(std::string_view text);

  bool is_power() const { return table_.empty(); }
  double delta() const { return delta_; }
  double coefficient() const { return coefficient_; }
  const std::vector<std::pair<std::uint64_t, double>>& table() const { return table_; }

  double operator()(double q) const;
  double log_value(double q) const;
  /// Power kinds with δ >= 0 are non-increasing; tables are checked.
  bool is_non_increasing() const;
  /// ψ(q) as an exact rational when c is 1 and δ a non-negative integer.
  std::optional<ExactRational> exact_at(const BigInt& q) const;
  std::string describe() const;

 private:
  double delta_ = 0.0;
  double coefficient_ = 1.0;
  std::vector<std::pair<std::uint64_t, double>> table_;
};

struct DeltaEstimate {
  double value = 0.0;
  /// False for tables: tail minimum as a liminf estimate.
  bool exact = true;
};

DeltaEstimate delta_psi(const ApproxFunction& psi, std::uint64_t tail_start = 2);

/// dim_K / max(1, δ).
double dimension_formula(double dim_k, double delta);
/// Convergence threshold of Σ_{n in P_N} n ψ(n)^s: 2/δ for N >= 1, 0 for N = 0.
double s_psi(const ApproxFunction& psi, unsigned n_omega);

struct QCountRow {
  int n = 0;
  std::uint64_t count = 0;
  /// (q, number of p in [0,q) coprime with p/q + t in the attractor).
  std::vector<std::pair<std::uint64_t, std::uint64_t>> members;
  /// log(count) / (n log b); nullopt when the count is zero.
  std::optional<double> normalized;
  std::string method;
  bool complete = true;
};

/// Q_{b,n,N}(K mod 1) by fiber scans when b^n <= budget.max_fiber_scan,
/// otherwise from codings with period length <= coding_period_max.
QCountRow count_q(const RationalIFS& ifs, int n, std::optional<unsigned> omega_max = std::nullopt,
                  unsigned workers = 1, const Budget& budget = {}, int coding_period_max = 12);
/// Forces the coding-side route.
QCountRow count_q_coding(const RationalIFS& ifs, int n, std::optional<unsigned> omega_max, int period_max,
                         const Budget& budget = {});

double box_dimension_estimate(const RationalIFS& ifs, int n);

enum class SeriesMode { extrinsic, intrinsic };

struct SeriesRow {
  int n = 0;
  double term = 0.0;
  double partial = 0.0;
};

struct SeriesResult {
  double s = 0.0;
  std::vector<SeriesRow> rows;
  /// Last term below the previous one. Finite sums cannot settle convergence.
  bool converging = false;
};

/// Per-level (weight, log scale) data; independent of s.
class CoveringSeries {
 public:
  CoveringSeries(const RationalIFS& ifs, const ApproxFunction& psi, int n_max, SeriesMode mode,
                 std::optional<unsigned> omega_max = std::nullopt, unsigned workers = 1, const Budget& budget = {});
  SeriesResult evaluate(double s) const;
  /// Bisection on the verdict over [s_lo, s_hi]; nullopt without a sign change.
  std::optional<std::pair<double, double>> threshold(double s_lo, double s_hi, double width = 1e-4) const;
  int n_max() const { return static_cast<int>(levels_.size()); }

 private:
  // levels_[n-1] holds (weight, log ψ or log η) pairs.
  std::vector<std::vector<std::pair<double, double>>> levels_;
};

struct Ball {
  ExactRational center;
  double radius = 0.0;
  std::optional<ExactRational> radius_exact;
  int stage = 0;
  BigInt height;
};

struct StageSummary {
  int stage = 0;
  std::size_t balls = 0;
  std::optional<ExactRational> min_gap;
  unsigned max_omega = 0;
};

struct BallSystem {
  /// True for a b-adic seed, false for a b^k(b-1) denominator.
  bool b_adic = true;
  int k = 0;
  std::vector<Ball> balls;
  std::vector<StageSummary> stages;
  unsigned omega_limit = 0;
  bool omega_ok = true;
};

/// Balls B(f_w(seed), ψ(b^(n+k))) (or ψ(b^(n+k)(b-1))) for |w| = n = 1..depth.
BallSystem badic_ball_system(const RationalIFS& ifs, const ApproxFunction& psi, const ExactRational& seed, int depth,
                             const Budget& budget = {});

}  // namespace cantor_dioph
