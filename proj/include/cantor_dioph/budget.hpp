#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cantor_dioph {

/// Resource caps for exponential or sweep-sized work.
struct Budget {
  /// Max number of words (m^length style) an enumeration may visit.
  std::uint64_t max_words = std::uint64_t{1} << 22;
  /// Largest b^n for which Q-counting scans every fiber exhaustively.
  std::uint64_t max_fiber_scan = 100000;
  /// Largest denominator a single fiber graph may be built for.
  std::uint64_t max_fiber_denominator = std::uint64_t{1} << 22;
  /// Default cap for the order census.
  std::uint64_t census_x_max = 10000000;
  /// Default cap on q for orbit profiles.
  std::uint64_t orbit_profile_q_max = 100000;

  /// Defaults overridden by CANTOR_DIOPH_BUDGET when set.
  static Budget from_environment();
  /// Parses "key=value,key=value" over the field names above.
  static Budget parse(std::string_view text);
  static Budget parse(std::string_view text, Budget base);
};

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cantor_dioph
