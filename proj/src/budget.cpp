#include "cantor_dioph/budget.hpp"

#include <cstdlib>

namespace cantor_dioph {

Budget Budget::from_environment() {
  const char* env = std::getenv("CANTOR_DIOPH_BUDGET");
  if (env == nullptr || *env == '\0') return Budget{};
  return parse(env);
}

Budget Budget::parse(std::string_view text) { return parse(text, Budget{}); }

Budget Budget::parse(std::string_view text, Budget base) {
  while (!text.empty()) {
    const auto comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument("budget entry needs key=value: " + std::string(item));
    const std::string key(item.substr(0, eq));
    const std::string value(item.substr(eq + 1));
    std::size_t used = 0;
    const unsigned long long v = std::stoull(value, &used);
    if (used != value.size() || v == 0) throw std::invalid_argument("budget value must be a positive integer: " + value);
    if (key == "max_words") {
      base.max_words = v;
    } else if (key == "max_fiber_scan") {
      base.max_fiber_scan = v;
    } else if (key == "max_fiber_denominator") {
      base.max_fiber_denominator = v;
    } else if (key == "census_x_max") {
      base.census_x_max = v;
    } else if (key == "orbit_profile_q_max") {
      base.orbit_profile_q_max = v;
    } else {
      throw std::invalid_argument("unknown budget key: " + key);
    }
  }
  return base;
}

}  // namespace cantor_dioph
