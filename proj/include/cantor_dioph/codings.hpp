#pragma once

// Eventually periodic codings preperiod·(period)^∞ and their projections.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cantor_dioph/budget.hpp"
#include "cantor_dioph/exact_rational.hpp"
#include "cantor_dioph/ifs.hpp"

namespace cantor_dioph {

struct Coding {
  Word preperiod;
  Word period;
  friend bool operator==(const Coding&, const Coding&) = default;
};

/// "pre|period" with dash-joined indices, e.g. "2|0-2".
std::string to_string(const Coding& c);

/// Primitive period, then the preperiod is shortened while its last letter
/// equals the period's last letter (rotating the period right each time).
/// Value preserving and idempotent.
Coding canonicalize(const Coding& c);
bool is_canonical(const Coding& c);

/// π(preperiod·(period)^∞) = f_pre(fixed point of f_period). Exact, reduced.
ExactRational project(const RationalIFS& ifs, const Coding& c);

/// ∏_{pre} q · (∏_{period} q − 1) for the coding as given.
BigInt raw_intrinsic_height(const RationalIFS& ifs, const Coding& c);

struct RationalInventoryEntry {
  ExactRational value;
  BigInt height;
  /// Minimal raw height among the generated representations.
  BigInt intrinsic_height;
  Coding witness;
};

/// Every π(coding) with |preperiod| <= k_max and |period| <= l_max,
/// deduplicated and sorted by value. Throws BudgetExceeded when the number
/// of candidate codings exceeds budget.max_words.
std::vector<RationalInventoryEntry> enumerate_rationals(const RationalIFS& ifs, int k_max, int l_max,
                                                        const Budget& budget = {}, unsigned workers = 1);

/// Distinct values π((j_{k+1}..j_n)^∞) over j in the overlap class of
/// `word` and 0 <= k <= n-1. Sorted.
std::vector<ExactRational> uper(const RationalIFS& ifs, std::span<const int> word);

/// Level-n data for the intrinsic covering series, grouped by cylinder ratio.
struct UperLevelTerm {
  ExactRational ratio;
  std::uint64_t classes = 0;
  /// Sum of #uper over the overlap classes with this ratio.
  std::uint64_t uper_total = 0;
};

/// Walks all m^n words of length n (budget-guarded) once.
std::vector<UperLevelTerm> uper_level(const RationalIFS& ifs, int n, const Budget& budget = {});

void write_inventory_csv(std::ostream& os, const std::vector<RationalInventoryEntry>& entries);
void write_inventory_jsonl(std::ostream& os, const std::vector<RationalInventoryEntry>& entries);

}  // namespace cantor_dioph
