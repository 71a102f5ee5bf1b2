#include "cantor_dioph/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "cantor_dioph/codings.hpp"
#include "cantor_dioph/membership.hpp"
#include "cantor_dioph/number_theory.hpp"
#include "cantor_dioph/parallel.hpp"

namespace cantor_dioph {

ApproxFunction ApproxFunction::power(double delta, double coefficient) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) throw std::invalid_argument("power ψ needs a finite δ >= 0");
  if (!(coefficient > 0.0) || !std::isfinite(coefficient)) throw std::invalid_argument("power ψ needs a positive coefficient");
  ApproxFunction f;
  f.delta_ = delta;
  f.coefficient_ = coefficient;
  return f;
}

ApproxFunction ApproxFunction::tabulated(std::vector<std::pair<std::uint64_t, double>> table) {
  if (table.empty()) throw std::invalid_argument("tabulated ψ needs at least one entry");
  std::sort(table.begin(), table.end());
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table[i].first < 1) throw std::invalid_argument("tabulated ψ keys must be >= 1");
    if (i && table[i].first == table[i - 1].first) throw std::invalid_argument("duplicate key in tabulated ψ");
    if (!(table[i].second > 0.0) || !std::isfinite(table[i].second)) {
      throw std::invalid_argument("tabulated ψ values must be positive");
    }
  }
  ApproxFunction f;
  f.table_ = std::move(table);
  return f;
}

ApproxFunction ApproxFunction::parse(std::string_view text) {
  auto fail = [&] { return std::invalid_argument("malformed ψ '" + std::string(text) + "': expected pow:D[:C] or table:PATH"); };
  if (text.rfind("pow:", 0) == 0) {
    std::string rest(text.substr(4));
    const auto colon = rest.find(':');
    try {
      std::size_t used = 0;
      const std::string d = rest.substr(0, colon);
      const double delta = std::stod(d, &used);
      if (used != d.size()) throw fail();
      double coef = 1.0;
      if (colon != std::string::npos) {
        const std::string c = rest.substr(colon + 1);
        coef = std::stod(c, &used);
        if (used != c.size()) throw fail();
      }
      return power(delta, coef);
    } catch (const std::logic_error&) {
      throw fail();
    }
  }
  if (text.rfind("table:", 0) == 0) {
    const std::string path(text.substr(6));
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open ψ table: " + path);
    std::vector<std::pair<std::uint64_t, double>> rows;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw std::invalid_argument("ψ table line needs 'q,value': " + line);
      try {
        rows.push_back({std::stoull(line.substr(0, comma)), std::stod(line.substr(comma + 1))});
      } catch (const std::logic_error&) {
        throw std::invalid_argument("ψ table line needs 'q,value': " + line);
      }
    }
    return tabulated(std::move(rows));
  }
  throw fail();
}

double ApproxFunction::operator()(double q) const { return std::exp(log_value(q)); }

double ApproxFunction::log_value(double q) const {
  if (is_power()) return std::log(coefficient_) - delta_ * std::log(q);
  auto it = std::upper_bound(table_.begin(), table_.end(), q,
                             [](double v, const std::pair<std::uint64_t, double>& e) { return v < static_cast<double>(e.first); });
  if (it == table_.begin()) return std::log(table_.front().second);
  return std::log(std::prev(it)->second);
}

bool ApproxFunction::is_non_increasing() const {
  if (is_power()) return true;
  for (std::size_t i = 1; i < table_.size(); ++i)
    if (table_[i].second > table_[i - 1].second) return false;
  return true;
}

std::optional<ExactRational> ApproxFunction::exact_at(const BigInt& q) const {
  if (!is_power() || coefficient_ != 1.0 || delta_ != std::floor(delta_) || delta_ > 64) return std::nullopt;
  BigInt den;
  mpz_pow_ui(den.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(delta_));
  return ExactRational(BigInt(1), den);
}

std::string ApproxFunction::describe() const {
  std::ostringstream os;
  if (is_power()) {
    os << "pow:" << delta_;
    if (coefficient_ != 1.0) os << ':' << coefficient_;
  } else {
    os << "table[" << table_.size() << "]";
  }
  return os.str();
}

DeltaEstimate delta_psi(const ApproxFunction& psi, std::uint64_t tail_start) {
  if (psi.is_power()) return {psi.delta(), true};
  std::optional<double> best;
  for (const auto& [q, v] : psi.table()) {
    if (q < std::max<std::uint64_t>(tail_start, 2)) continue;
    const double r = -std::log(v) / std::log(static_cast<double>(q));
    if (!best || r < *best) best = r;
  }
  if (!best) throw std::invalid_argument("no table entries at or beyond the tail start");
  return {*best, false};
}

double dimension_formula(double dim_k, double delta) {
  if (dim_k < 0.0 || dim_k > 1.0) throw std::invalid_argument("dim_K must lie in [0,1]");
  if (delta < 0.0) throw std::invalid_argument("delta must be >= 0");
  return dim_k / std::max(1.0, delta);
}

double s_psi(const ApproxFunction& psi, unsigned n_omega) {
  if (n_omega == 0) return 0.0;  // P_0 = {1}: a single term
  const double d = delta_psi(psi).value;
  if (d <= 0.0) return std::numeric_limits<double>::infinity();
  return 2.0 / d;
}

namespace {

std::uint64_t checked_pow(std::uint64_t b, int n) {
  std::uint64_t r = 1;
  for (int i = 0; i < n; ++i) {
    if (r > std::numeric_limits<std::uint64_t>::max() / b) throw std::overflow_error("b^n overflows 64 bits");
    r *= b;
  }
  return r;
}

void finish_row(QCountRow& row, std::uint64_t b) {
  row.count = row.members.size();
  if (row.count > 0) {
    row.normalized = std::log(static_cast<double>(row.count)) / (row.n * std::log(static_cast<double>(b)));
  }
}

}  // namespace

QCountRow count_q(const RationalIFS& ifs, int n, std::optional<unsigned> omega_max, unsigned workers,
                  const Budget& budget, int coding_period_max) {
  if (n < 1) throw std::invalid_argument("count_q needs n >= 1");
  const std::uint64_t b = static_cast<std::uint64_t>(ifs.base());
  const std::uint64_t hi = checked_pow(b, n);
  if (hi > budget.max_fiber_scan) return count_q_coding(ifs, n, omega_max, coding_period_max, budget);
  const std::uint64_t lo = hi / b;

  QCountRow row;
  row.n = n;
  row.method = "fiber-scan";
  constexpr std::uint64_t kChunk = 256;
  std::vector<std::vector<std::pair<std::uint64_t, std::uint64_t>>> parts(chunk_count(lo + 1, hi + 1, kChunk));
  parallel_chunks(lo + 1, hi + 1, kChunk, workers, [&](std::size_t chunk, std::uint64_t a, std::uint64_t z) {
    for (std::uint64_t q = a; q < z; ++q) {
      if (omega_max && omega(q) > *omega_max) continue;
      const FiberGraph g(ifs, static_cast<std::int64_t>(q), budget);
      const auto ps = members_for_denominator(g, true);
      if (!ps.empty()) parts[chunk].push_back({q, ps.size()});
    }
  });
  for (auto& p : parts) row.members.insert(row.members.end(), p.begin(), p.end());
  finish_row(row, b);
  return row;
}

QCountRow count_q_coding(const RationalIFS& ifs, int n, std::optional<unsigned> omega_max, int period_max,
                         const Budget& budget) {
  if (n < 1) throw std::invalid_argument("count_q needs n >= 1");
  if (period_max < 1) throw std::invalid_argument("period bound must be >= 1");
  const std::int64_t b = ifs.base();
  const std::uint64_t hi = checked_pow(static_cast<std::uint64_t>(b), n);
  const std::uint64_t lo = hi / static_cast<std::uint64_t>(b);
  if (hi > (std::uint64_t{1} << 40)) throw BudgetExceeded("count_q: b^n too large for the coding route");
  const auto digits = ifs.digits();

  using Value = std::pair<std::int64_t, std::int64_t>;  // reduced num/den
  std::set<Value> seen;
  std::vector<Value> frontier;
  auto add = [&](std::int64_t num, std::int64_t den) {
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    num /= g;
    den /= g;
    if (static_cast<std::uint64_t>(den) > hi) return;
    if (seen.insert({num, den}).second) frontier.push_back({num, den});
  };
  // Periodic points T/(b^l - 1).
  for (int l = 1; l <= period_max; ++l) {
    if (static_cast<double>(ifs.size()) * std::pow(static_cast<double>(ifs.size()), l - 1) >
        static_cast<double>(budget.max_words)) {
      throw BudgetExceeded("count_q coding route: period length " + std::to_string(l) + " exceeds max_words");
    }
    const std::int64_t den = static_cast<std::int64_t>(checked_pow(static_cast<std::uint64_t>(b), l)) - 1;
    for (auto t : level_translates(ifs, l)) add(t, den);
  }
  // Preperiod letters: x -> (x + p_i)/b never lowers the reduced denominator.
  while (!frontier.empty()) {
    const auto [num, den] = frontier.back();
    frontier.pop_back();
    for (auto d : digits) {
      const __int128 nn = static_cast<__int128>(num) + static_cast<__int128>(d) * den;
      const __int128 dd = static_cast<__int128>(den) * b;
      if (dd > static_cast<__int128>(hi) * b) continue;
      add(static_cast<std::int64_t>(nn), static_cast<std::int64_t>(dd));
    }
  }
  std::map<std::uint64_t, std::set<std::int64_t>> residues;
  for (const auto& [num, den] : seen) {
    const auto q = static_cast<std::uint64_t>(den);
    if (q <= lo || q > hi) continue;
    if (omega_max && omega(q) > *omega_max) continue;
    residues[q].insert(((num % den) + den) % den);
  }
  QCountRow row;
  row.n = n;
  row.method = "coding";
  row.complete = false;
  for (const auto& [q, s] : residues) row.members.push_back({q, s.size()});
  finish_row(row, static_cast<std::uint64_t>(b));
  return row;
}

double box_dimension_estimate(const RationalIFS& ifs, int n) {
  if (n < 1) throw std::invalid_argument("box dimension needs n >= 1");
  const std::uint64_t count = level_translates(ifs, n).size();
  // Write count = r^e with e maximal so exact powers give exact ratios.
  std::uint64_t root = count;
  int e = 1;
  for (int k = 64; k >= 2; --k) {
    const auto r = static_cast<std::uint64_t>(std::llround(std::pow(static_cast<double>(count), 1.0 / k)));
    for (std::uint64_t c = r > 1 ? r - 1 : 1; c <= r + 1; ++c) {
      if (c < 2) continue;
      std::uint64_t p = 1;
      bool ok = true;
      for (int i = 0; i < k && ok; ++i) {
        if (p > count / c) ok = false;
        p *= c;
      }
      if (ok && p == count) {
        root = c;
        e = k;
        break;
      }
    }
    if (e > 1) break;
  }
  const auto b = static_cast<std::uint64_t>(ifs.base());
  const double ratio = static_cast<double>(e) / n;
  if (root == b) return ratio;
  if (count == 1) return 0.0;
  return ratio * (std::log(static_cast<double>(root)) / std::log(static_cast<double>(b)));
}

CoveringSeries::CoveringSeries(const RationalIFS& ifs, const ApproxFunction& psi, int n_max, SeriesMode mode,
                               std::optional<unsigned> omega_max, unsigned workers, const Budget& budget) {
  if (n_max < 1) throw std::invalid_argument("series needs n_max >= 1");
  if (!psi.is_non_increasing()) throw std::invalid_argument("covering series needs a non-increasing ψ");
  const Interval h = hull(ifs);
  const double diam = h.length().to_double();
  for (int n = 1; n <= n_max; ++n) {
    std::vector<std::pair<double, double>> level;
    if (mode == SeriesMode::extrinsic) {
      const auto row = count_q(ifs, n, omega_max, workers, budget);
      for (const auto& [q, c] : row.members) level.push_back({static_cast<double>(c), psi.log_value(static_cast<double>(q))});
    } else {
      // η(r) = ψ(1/r) on cylinder diameters |K|·ratio.
      for (const auto& t : uper_level(ifs, n, budget)) {
        const double r = diam * t.ratio.to_double();
        level.push_back({static_cast<double>(t.uper_total), psi.log_value(1.0 / r)});
      }
    }
    levels_.push_back(std::move(level));
  }
}

SeriesResult CoveringSeries::evaluate(double s) const {
  if (!(s > 0.0)) throw std::invalid_argument("series exponent must be positive");
  SeriesResult res;
  res.s = s;
  double partial = 0.0;
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    double term = 0.0;
    for (const auto& [w, lv] : levels_[i]) term += w * std::exp(s * lv);
    partial += term;
    res.rows.push_back({static_cast<int>(i + 1), term, partial});
  }
  res.converging = res.rows.size() >= 2 && res.rows.back().term < res.rows[res.rows.size() - 2].term;
  return res;
}

std::optional<std::pair<double, double>> CoveringSeries::threshold(double s_lo, double s_hi, double width) const {
  if (!(s_lo > 0.0) || !(s_hi > s_lo)) throw std::invalid_argument("threshold search needs 0 < s_lo < s_hi");
  if (evaluate(s_lo).converging || !evaluate(s_hi).converging) return std::nullopt;
  while (s_hi - s_lo > width) {
    const double mid = 0.5 * (s_lo + s_hi);
    (evaluate(mid).converging ? s_hi : s_lo) = mid;
  }
  return std::make_pair(s_lo, s_hi);
}

BallSystem badic_ball_system(const RationalIFS& ifs, const ApproxFunction& psi, const ExactRational& seed, int depth,
                             const Budget& budget) {
  if (depth < 1) throw std::invalid_argument("ball system needs depth >= 1");
  if (!psi.is_non_increasing()) throw std::invalid_argument("ball system needs a non-increasing ψ");
  const std::int64_t b = ifs.base();
  const BigInt bb = big_from_i64(b);
  const BigInt d = seed.denominator();

  BallSystem sys;
  auto divides = [](const BigInt& a, const BigInt& m) { return mpz_divisible_p(m.get_mpz_t(), a.get_mpz_t()) != 0; };
  std::optional<int> k;
  BigInt pw = 1;
  for (int i = 0; i <= 128 && !k; ++i, pw *= bb)
    if (divides(d, pw)) k = i;
  if (k) {
    sys.b_adic = true;
  } else {
    pw = bb - 1;
    for (int i = 0; i <= 128 && !k; ++i, pw *= bb)
      if (divides(d, pw)) k = i;
    if (!k) throw std::invalid_argument("seed denominator must divide b^k or b^k(b-1)");
    sys.b_adic = false;
  }
  sys.k = *k;
  if (!is_member(ifs, seed, budget).member) throw std::invalid_argument("seed " + seed.to_string() + " is not in the attractor");

  double words = 0;
  for (int n = 1; n <= depth; ++n) words += std::pow(static_cast<double>(ifs.size()), n);
  if (words > static_cast<double>(budget.max_words)) throw BudgetExceeded("ball system exceeds max_words");

  const auto b_factors = factorize(static_cast<std::uint64_t>(b));
  const auto bm1_factors = factorize(static_cast<std::uint64_t>(b - 1));
  sys.omega_limit = static_cast<unsigned>(b_factors.size() + bm1_factors.size());

  std::vector<ExactRational> level{seed};
  for (int n = 1; n <= depth; ++n) {
    std::vector<ExactRational> next;
    next.reserve(level.size() * ifs.size());
    for (const auto& x : level)
      for (std::size_t i = 0; i < ifs.size(); ++i) next.push_back(branch_map(ifs, static_cast<int>(i))(x));
    level = std::move(next);
    std::vector<ExactRational> centers = level;
    std::sort(centers.begin(), centers.end());
    centers.erase(std::unique(centers.begin(), centers.end()), centers.end());

    BigInt scale;
    mpz_pow_ui(scale.get_mpz_t(), bb.get_mpz_t(), static_cast<unsigned long>(n + *k));
    if (!sys.b_adic) scale *= bb - 1;
    const double radius = std::exp(psi.log_value(scale.get_d()));
    const auto exact = psi.exact_at(scale);

    StageSummary st;
    st.stage = n;
    st.balls = centers.size();
    for (std::size_t i = 0; i < centers.size(); ++i) {
      if (i > 0) {
        const auto gap = centers[i] - centers[i - 1];
        if (!st.min_gap || gap < *st.min_gap) st.min_gap = gap;
      }
      const BigInt h = centers[i].height();
      const unsigned w = static_cast<unsigned>(factorize(big_to_u64(h)).size());
      st.max_omega = std::max(st.max_omega, w);
      sys.balls.push_back({centers[i], radius, exact, n, h});
    }
    if (st.max_omega > sys.omega_limit) sys.omega_ok = false;
    sys.stages.push_back(std::move(st));
  }
  return sys;
}

}  // namespace cantor_dioph
