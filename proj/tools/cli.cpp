#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "cantor_dioph/codings.hpp"
#include "cantor_dioph/dimension.hpp"
#include "cantor_dioph/equidistribution.hpp"
#include "cantor_dioph/ifs_io.hpp"
#include "cantor_dioph/membership.hpp"
#include "cantor_dioph/number_theory.hpp"
#include "json.hpp"

namespace cantor_dioph::cli {
namespace {

using Json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Json>> rows;
  void add(std::vector<Json> row) { rows.push_back(std::move(row)); }
};

std::string csv_cell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) {
    const auto& s = v.get_ref<const std::string&>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + '"';
  }
  return v.dump();
}

void emit(const Table& t, const std::string& format, std::ostream& os) {
  if (format == "csv") {
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& r : t.rows) {
      for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << csv_cell(r[i]);
      os << '\n';
    }
  } else {
    for (const auto& r : t.rows) {
      Json o = Json::object();
      for (std::size_t i = 0; i < r.size(); ++i) o[t.columns[i]] = r[i];
      os << o.dump() << '\n';
    }
  }
}

Json rational_json(const ExactRational& r) { return r.to_string(); }
Json big_json(const BigInt& v) {
  if (big_fits_i64(v)) return big_to_i64(v);
  return to_string(v);
}

ExactRational parse_rational_flag(const std::string& text, const std::string& flag) {
  try {
    return ExactRational::parse(text, false);
  } catch (const std::invalid_argument& e) {
    throw UsageError(flag + ": " + e.what());
  }
}

std::vector<ExactRational> read_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open point file: " + path);
  std::vector<ExactRational> pts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      pts.push_back(ExactRational::parse(line, true));
    } catch (const std::invalid_argument& e) {
      throw UsageError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return pts;
}

std::pair<int, int> parse_range(const std::string& text) {
  try {
    const auto dots = text.find("..");
    std::size_t used = 0;
    if (dots == std::string::npos) {
      const int v = std::stoi(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return {v, v};
    }
    const std::string a = text.substr(0, dots), b = text.substr(dots + 2);
    const int lo = std::stoi(a, &used);
    if (used != a.size()) throw std::invalid_argument(text);
    const int hi = std::stoi(b, &used);
    if (used != b.size() || hi < lo) throw std::invalid_argument(text);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw UsageError("expected N or LO..HI, got '" + text + "'");
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string factor_string(const Factorization& f) {
  if (f.empty()) return "1";
  std::string s;
  for (const auto& [p, e] : f) {
    if (!s.empty()) s += '*';
    s += std::to_string(p);
    if (e > 1) s += '^' + std::to_string(e);
  }
  return s;
}

std::string kind_name(WitnessKind k) { return k == WitnessKind::excess ? "excess" : "deficit"; }

// Appends "--key value" pairs from a JSON config for flags not given explicitly.
std::vector<std::string> apply_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--config") path = args[i + 1];
  }
  for (const auto& a : args) {
    if (a.rfind("--config=", 0) == 0) path = a.substr(9);
  }
  if (path.empty()) return args;
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file: " + path);
  Json cfg;
  try {
    cfg = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("config " + path + ": " + e.what());
  }
  if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
  std::set<std::string> given;
  for (const auto& a : args) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  }
  for (const auto& [key, value] : cfg.items()) {
    if (given.count(key)) continue;
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
      args.push_back(flag);
      args.push_back(joined);
    } else if (value.is_object()) {
      if (key != "budget") throw UsageError("config key '" + key + "' cannot be an object");
      std::string joined;
      for (const auto& [k, v] : value.items()) joined += (joined.empty() ? "" : ",") + k + "=" + v.dump();
      args.push_back(flag);
      args.push_back(joined);
    } else {
      args.push_back(flag);
      args.push_back(value.is_string() ? value.get<std::string>() : value.dump());
    }
  }
  return args;
}

struct Options {
  std::string format;
  std::string out_path;
  unsigned workers = 1;
  std::string config;
  std::optional<int> precision;
  std::string budget_spec;
  bool selftest = false;

  std::string ifs = "cantor";
  std::string rational;
  bool torus = false;
  bool quiet = false;
  int k = 3, l = 6;
  std::uint64_t b = 0, q = 0, xmax = 1000;
  std::string eps = "0.3";
  std::optional<unsigned> omega_max;
  unsigned pn_n = 1;
  std::string points;
  std::string interval;
  std::uint64_t et_a = 0;
  std::string et_c = "3";
  std::string n_range = "1..8";
  int coding_period = 12;
  bool list = false;
  int depth = 12;
  std::string psi = "pow:2";
  std::string mode = "intrinsic";
  int n_max = 12;
  double smin = 0.05, smax = 1.0, width = 1e-4;
  std::optional<double> s;
  std::string seed = "0";
  bool summary = false;
  int kmax = 10;
  std::string scales;
  std::size_t max_probes = 0;
};

mpfr_prec_t weyl_bits(const Options& o) {
  return o.precision ? precision_bits_for_digits(*o.precision) : default_weyl_bits();
}

// ---- selftests: quick oracle checks on the built-in fixtures ----

using Check = std::function<bool()>;

bool ternary_member(std::int64_t p, std::int64_t q) {
  // Long division; a terminating expansion may end in a single 1 (…1 = …0222…).
  std::map<std::int64_t, int> seen;
  std::int64_t r = p;
  if (p == q) return true;
  std::vector<int> digits;
  while (!seen.count(r)) {
    seen[r] = static_cast<int>(digits.size());
    r *= 3;
    digits.push_back(static_cast<int>(r / q));
    r %= q;
    if (r == 0) {
      for (std::size_t i = 0; i + 1 < digits.size(); ++i)
        if (digits[i] == 1) return false;
      return true;
    }
  }
  for (int d : digits)
    if (d == 1) return false;
  return true;
}

std::map<std::string, Check> selftests() {
  const auto cantor = RationalIFS::fixture("cantor");
  std::map<std::string, Check> t;
  t["member"] = [cantor] {
    if (!is_member(cantor, ExactRational(1, 4)).member || is_member(cantor, ExactRational(1, 2)).member) return false;
    for (std::int64_t q = 1; q <= 60; ++q)
      for (std::int64_t p = 0; p <= q; ++p)
        if (std::gcd(p, q) == 1 && is_member(cantor, ExactRational(p, q)).member != ternary_member(p, q)) return false;
    return true;
  };
  t["enumerate"] = [cantor] {
    for (const auto& fx : {"cantor", "overlap3"}) {
      const auto ifs = RationalIFS::fixture(fx);
      for (const auto& e : enumerate_rationals(ifs, 2, 4)) {
        if (project(ifs, e.witness) != e.value || !is_member(ifs, e.value).member) return false;
        if (e.intrinsic_height < e.height) return false;
      }
    }
    return true;
  };
  t["orders"] = [] {
    for (std::uint64_t b : {2, 3, 10})
      for (std::uint64_t p = 2; p < 50; ++p) {
        if (!is_prime(p) || b % p == 0) continue;
        std::uint64_t pt = 1;
        for (unsigned e = 1; e <= 3; ++e) {
          pt *= p;
          std::uint64_t x = b % pt, k = 1;
          while (x != 1) x = x * b % pt, ++k;
          if (prime_power_order(p, e, b) != k) return false;
        }
      }
    return order_profile(45, 2).order == 12 && order_profile(45, 2).tilde_order == 24;
  };
  t["census"] = [] {
    for (const auto& row : order_census(2, 1000, {"0.3"}))
      if (!row.holds) return false;
    return true;
  };
  t["pn"] = [] {
    for (unsigned n = 1; n <= 3; ++n)
      for (auto m : pn_sieve(2000, n))
        if (omega(m) > n || !phi_lower_bound_holds(m, n)) return false;
    return true;
  };
  t["discrepancy"] = [] {
    for (std::int64_t n = 1; n <= 32; ++n) {
      std::vector<ExactRational> pts;
      for (std::int64_t i = 0; i < n; ++i) pts.push_back(ExactRational(i, n));
      if (discrepancy(pts).discrepancy != ExactRational(1, n)) return false;
    }
    return true;
  };
  t["orbit-profile"] = [] {
    const auto prof = orbit_profile(2, 9);
    return prof.order == 6 && prof.min_discrepancy == discrepancy(orbit(2, 1, 9)).discrepancy;
  };
  t["gap-hit"] = [] {
    for (std::uint64_t q : {7, 11, 13, 17, 19, 23}) {
      const auto pts = orbit(2, 1, q);
      const auto d = discrepancy(pts).discrepancy;
      for (std::int64_t i = 0; i < 8; ++i)
        for (std::int64_t j = i + 1; j <= 8; ++j) {
          const Interval iv{ExactRational(i, 8), ExactRational(j, 8)};
          if (d < iv.length() && !gap_hit(pts, iv)) return false;
        }
    }
    return true;
  };
  t["count-q"] = [cantor] {
    auto qs = [](const QCountRow& r) {
      std::set<std::uint64_t> s;
      for (const auto& [q, c] : r.members) s.insert(q);
      return s;
    };
    return qs(count_q(cantor, 1)) == std::set<std::uint64_t>{3} && qs(count_q(cantor, 2)) == std::set<std::uint64_t>{4, 9};
  };
  t["boxdim"] = [cantor] {
    return box_dimension_estimate(cantor, 10) == std::log(2.0) / std::log(3.0) &&
           box_dimension_estimate(RationalIFS::fixture("full3"), 5) == 1.0;
  };
  t["series"] = [cantor] {
    const double s0 = std::log(2.0) / std::log(3.0) / 3.0;
    const CoveringSeries ser(cantor, ApproxFunction::power(3), 10, SeriesMode::intrinsic);
    return ser.evaluate(s0 + 0.1).converging && !ser.evaluate(s0 - 0.1).converging;
  };
  t["ballsys"] = [cantor] {
    const auto sys = badic_ball_system(cantor, ApproxFunction::power(2), ExactRational(1), 4);
    for (const auto& b : sys.balls)
      if (!is_member(cantor, b.center).member) return false;
    return sys.omega_ok;
  };
  t["separation"] = [cantor] {
    std::vector<ExactRational> scales;
    for (int k = 1; k <= 6; ++k) scales.push_back(ExactRational(BigInt(1), big_pow(3, k)));
    for (const auto& row : separation_profile(cantor, scales))
      if (row.max_count != 2) return false;
    return true;
  };
  return t;
}

// ---- subcommands ----

Table run_member(const Options& o, const Budget& budget, int& code) {
  const auto ifs = load_ifs(o.ifs);
  const auto r = parse_rational_flag(o.rational, "--rational");
  ExactRational value = r;
  MembershipResult res;
  if (o.torus) {
    const Interval h = hull(ifs);
    for (BigInt t = (h.lo - r).ceil(); ExactRational(t, BigInt(1)) <= h.hi - r; ++t) {
      const ExactRational x = r + ExactRational(t, BigInt(1));
      res = is_member(ifs, x, budget);
      if (res.member) {
        value = x;
        break;
      }
    }
  } else {
    res = is_member(ifs, r, budget);
  }
  code = res.member ? 0 : 1;
  Table t{{"rational", "value", "member", "witness", "h", "h_int"}, {}};
  Json h_int = nullptr;
  if (res.member) {
    if (const auto rep = minimal_representation(ifs, value, budget)) h_int = big_json(rep->value);
  }
  t.add({rational_json(r), rational_json(value), res.member, res.witness ? Json(to_string(*res.witness)) : Json(nullptr),
         big_json(value.height()), h_int});
  return t;
}

Table run_enumerate(const Options& o, const Budget& budget) {
  const auto ifs = load_ifs(o.ifs);
  if (o.k < 0 || o.l < 1) throw UsageError("--k must be >= 0 and --l >= 1");
  Table t{{"value_num", "value_den", "height", "intrinsic_height", "preperiod", "period"}, {}};
  for (const auto& e : enumerate_rationals(ifs, o.k, o.l, budget, o.workers)) {
    t.add({big_json(e.value.numerator()), big_json(e.value.denominator()), big_json(e.height),
           big_json(e.intrinsic_height), word_to_string(e.witness.preperiod), word_to_string(e.witness.period)});
  }
  return t;
}

Table run_orders(const Options& o) {
  if (o.b < 2) throw UsageError("--b must be >= 2");
  if (o.q < 1) throw UsageError("--q must be >= 1");
  const auto prof = order_profile(o.q, o.b);
  if (!prof.coprime_to_b) throw std::domain_error("gcd(q, b) != 1");
  Table t{{"q", "b", "factors", "omega", "order", "tilde_order"}, {}};
  t.add({prof.q, o.b, factor_string(prof.factors), prof.omega, prof.order, prof.tilde_order});
  return t;
}

Table run_census(const Options& o, const Budget& budget) {
  if (o.b < 2) throw UsageError("--b must be >= 2");
  const auto eps = split_list(o.eps);
  if (eps.empty()) throw UsageError("--eps needs at least one value");
  const auto rows = order_census(o.b, o.xmax, eps, o.omega_max, o.workers, budget);
  Table t{{"x", "epsilon", "count"}, {}};
  if (o.omega_max) t.columns.push_back("filtered_count");
  for (const char* c : {"log_ratio", "bound_2eps", "holds"}) t.columns.push_back(c);
  for (const auto& r : rows) {
    std::vector<Json> row{r.x, r.epsilon, r.count};
    if (o.omega_max) row.push_back(r.filtered_count ? Json(*r.filtered_count) : Json(nullptr));
    row.push_back(r.log_ratio);
    row.push_back(r.bound_2eps);
    row.push_back(r.holds);
    t.add(std::move(row));
  }
  return t;
}

Table run_pn(const Options& o) {
  if (o.xmax > 100000000) throw BudgetExceeded("pn: --xmax above 1e8");
  Table t{{"m", "omega", "phi", "phi_bound_holds"}, {}};
  for (auto m : pn_sieve(o.xmax, o.pn_n)) t.add({m, omega(m), euler_phi(m), phi_lower_bound_holds(m, o.pn_n)});
  return t;
}

Table run_discrepancy(const Options& o) {
  if (o.points.empty()) throw UsageError("--points is required");
  const auto pts = read_points(o.points);
  if (pts.empty()) throw std::invalid_argument("point file is empty");
  const auto rep = discrepancy(pts);
  Table t{{"n_points", "discrepancy", "discrepancy_float", "a", "b", "kind", "limit"}, {}};
  std::vector<Json> row{rep.n_points, rational_json(rep.discrepancy), rep.discrepancy.to_double(), rational_json(rep.a),
                        rational_json(rep.b), kind_name(rep.kind), rep.limit};
  if (o.et_a > 0) {
    const auto bound = erdos_turan_bound(pts, o.et_a, parse_rational_flag(o.et_c, "--et-c"), weyl_bits(o));
    t.columns.insert(t.columns.end(), {"et_A", "et_bound", "et_error", "et_holds"});
    row.push_back(o.et_a);
    row.push_back(bound.value.to_string(o.precision.value_or(20)));
    row.push_back(bound.error.to_string(6));
    row.push_back(bound.certainly_at_least(rep.discrepancy));
  }
  t.add(std::move(row));
  return t;
}

Table run_orbit_profile(const Options& o, const Budget& budget) {
  if (o.b < 2) throw UsageError("--b must be >= 2");
  if (o.q < 2) throw UsageError("--q must be >= 2");
  if (std::gcd(o.b, o.q) != 1) throw std::domain_error("gcd(q, b) != 1");
  const auto p = orbit_profile(o.b, o.q, o.workers, budget, weyl_bits(o));
  Table t{{"q", "b", "order", "cosets", "max_weyl", "max_weyl_p", "min_discrepancy", "min_discrepancy_float",
           "min_discrepancy_p"},
          {}};
  t.add({p.q, p.b, p.order, p.cosets, p.max_weyl.to_string(o.precision.value_or(20)), p.max_weyl_p,
         rational_json(p.min_discrepancy), p.min_discrepancy.to_double(), p.min_discrepancy_p});
  return t;
}

Table run_gap_hit(const Options& o) {
  if (o.points.empty()) throw UsageError("--points is required");
  const auto ends = split_list(o.interval);
  if (ends.size() != 2) throw UsageError("--interval expects LO,HI");
  const Interval iv{parse_rational_flag(ends[0], "--interval"), parse_rational_flag(ends[1], "--interval")};
  const auto pts = read_points(o.points);
  if (pts.empty()) throw std::invalid_argument("point file is empty");
  const auto d = discrepancy(pts).discrepancy;
  const bool hit = gap_hit(pts, iv);
  Table t{{"lo", "hi", "hit", "discrepancy", "length", "forced"}, {}};
  t.add({rational_json(iv.lo), rational_json(iv.hi), hit, rational_json(d), rational_json(iv.length()), d < iv.length()});
  return t;
}

Table run_count_q(const Options& o, const Budget& budget) {
  const auto ifs = load_ifs(o.ifs);
  const auto [lo, hi] = parse_range(o.n_range);
  if (lo < 1) throw UsageError("--n must be >= 1");
  Table t;
  if (o.list) {
    t.columns = {"n", "q", "members"};
  } else {
    t.columns = {"n", "count", "normalized", "method", "complete"};
  }
  for (int n = lo; n <= hi; ++n) {
    const auto row = count_q(ifs, n, o.omega_max, o.workers, budget, o.coding_period);
    if (o.list) {
      for (const auto& [q, c] : row.members) t.add({n, q, c});
    } else {
      t.add({n, row.count, row.normalized ? Json(*row.normalized) : Json(nullptr), row.method, row.complete});
    }
  }
  return t;
}

Table run_boxdim(const Options& o) {
  const auto ifs = load_ifs(o.ifs);
  if (o.depth < 1) throw UsageError("--depth must be >= 1");
  Table t{{"n", "translates", "estimate"}, {}};
  for (int n = 1; n <= o.depth; ++n) t.add({n, level_translates(ifs, n).size(), box_dimension_estimate(ifs, n)});
  return t;
}

Table run_series(const Options& o, const Budget& budget) {
  const auto ifs = load_ifs(o.ifs);
  ApproxFunction psi = ApproxFunction::power(0);
  try {
    psi = ApproxFunction::parse(o.psi);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--psi: ") + e.what());
  }
  SeriesMode mode;
  if (o.mode == "intrinsic") {
    mode = SeriesMode::intrinsic;
  } else if (o.mode == "extrinsic") {
    mode = SeriesMode::extrinsic;
  } else {
    throw UsageError("--mode must be intrinsic or extrinsic");
  }
  const CoveringSeries ser(ifs, psi, o.n_max, mode, o.omega_max, o.workers, budget);
  Table t;
  if (o.s) {
    const auto res = ser.evaluate(*o.s);
    t.columns = {"s", "n", "term", "partial", "verdict"};
    for (const auto& r : res.rows) {
      const bool last = r.n == static_cast<int>(res.rows.size());
      t.add({*o.s, r.n, r.term, r.partial, last ? Json(res.converging ? "converging" : "diverging") : Json(nullptr)});
    }
    return t;
  }
  const auto br = ser.threshold(o.smin, o.smax, o.width);
  const double delta = delta_psi(psi).value;
  const double reference = ifs.is_homogeneous() ? dimension_formula(std::min(1.0, box_dimension_estimate(ifs, o.n_max)), delta)
                                                 : std::nan("");
  t.columns = {"smin", "smax", "found", "s_lo", "s_hi", "reference"};
  t.add({o.smin, o.smax, br.has_value(), br ? Json(br->first) : Json(nullptr), br ? Json(br->second) : Json(nullptr),
         std::isnan(reference) ? Json(nullptr) : Json(reference)});
  return t;
}

Table run_ballsys(const Options& o, const Budget& budget) {
  const auto ifs = load_ifs(o.ifs);
  ApproxFunction psi = ApproxFunction::power(0);
  try {
    psi = ApproxFunction::parse(o.psi);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--psi: ") + e.what());
  }
  const auto seed = parse_rational_flag(o.seed, "--seed");
  const auto sys = badic_ball_system(ifs, psi, seed, o.depth, budget);
  Table t;
  if (o.summary) {
    t.columns = {"stage", "balls", "min_gap", "max_omega", "omega_limit", "b_adic", "k"};
    for (const auto& s : sys.stages) {
      t.add({s.stage, s.balls, s.min_gap ? rational_json(*s.min_gap) : Json(nullptr), s.max_omega, sys.omega_limit,
             sys.b_adic, sys.k});
    }
    return t;
  }
  t.columns = {"stage", "center", "center_float", "radius", "radius_exact", "height", "omega"};
  for (const auto& b : sys.balls) {
    t.add({b.stage, rational_json(b.center), b.center.to_double(), b.radius,
           b.radius_exact ? rational_json(*b.radius_exact) : Json(nullptr), big_json(b.height),
           big_fits_i64(b.height) ? Json(omega(big_to_u64(b.height))) : Json(nullptr)});
  }
  return t;
}

Table run_separation(const Options& o, const Budget& budget) {
  const auto ifs = load_ifs(o.ifs);
  std::vector<ExactRational> scales;
  if (!o.scales.empty()) {
    for (const auto& s : split_list(o.scales)) scales.push_back(parse_rational_flag(s, "--scales"));
  } else {
    if (!ifs.is_homogeneous()) throw UsageError("--scales is required for an inhomogeneous system");
    if (o.kmax < 1) throw UsageError("--kmax must be >= 1");
    for (int k = 1; k <= o.kmax; ++k)
      scales.push_back(ExactRational(BigInt(1), big_pow(static_cast<std::uint64_t>(ifs.base()), k)));
  }
  const auto rows = separation_profile(ifs, scales, SamplingPlan{o.max_probes}, budget);
  Table t{{"scale", "distinct_maps", "probes", "max_count", "argmax_probe", "awsc_exponent"}, {}};
  for (const auto& r : rows)
    t.add({rational_json(r.scale), r.distinct_maps, r.probes, r.max_count, rational_json(r.argmax_probe), r.awsc_exponent});
  return t;
}

void add_common(CLI::App* sc, Options& o) {
  sc->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "jsonl"}));
  sc->add_option("--out", o.out_path, "Write results to this path instead of stdout");
  sc->add_option("--workers", o.workers, "Worker threads")->check(CLI::Range(1u, 1024u));
  sc->add_option("--config", o.config, "JSON file whose keys mirror the flags");
  sc->add_option("--precision", o.precision, "Decimal digits for floating evaluations")->check(CLI::Range(8, 4000));
  sc->add_option("--budget", o.budget_spec, "Budget caps as key=value,...; overrides CANTOR_DIOPH_BUDGET");
  sc->add_flag("--selftest", o.selftest, "Run this command's oracle checks on the built-in fixtures");
}

void print_error(std::ostream& err, const std::string& kind, const std::string& message) {
  err << Json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int dispatch(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Rational points, orders and dimension experiments for rational IFS attractors", "cantor_dioph"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  auto ifs_opt = [&](CLI::App* sc) { sc->add_option("--ifs", o.ifs, "Fixture name (cantor, overlap3, full3, mixed23) or JSON file"); };
  auto omega_opt = [&](CLI::App* sc) { sc->add_option("--omega-max", o.omega_max, "Keep only q with omega(q) <= N"); };
  std::map<CLI::App*, std::string> names;
  std::map<std::string, std::string> formats;
  auto sub = [&](const std::string& name, const std::string& desc, const std::string& fmt) {
    auto* sc = app.add_subcommand(name, desc);
    add_common(sc, o);
    names[sc] = name;
    formats[name] = fmt;
    return sc;
  };

  auto* member = sub("member", "Decide whether a rational lies in the attractor", "jsonl");
  ifs_opt(member);
  member->add_option("--rational", o.rational, "p/q or integer");
  member->add_flag("--torus", o.torus, "Test p/q + t for integer t");
  member->add_flag("--quiet", o.quiet, "Suppress output; the exit code carries the verdict");

  auto* enumerate = sub("enumerate", "List rationals with codings of preperiod <= k and period <= l", "csv");
  ifs_opt(enumerate);
  enumerate->add_option("--k", o.k, "Max preperiod length");
  enumerate->add_option("--l", o.l, "Max period length");

  auto* orders = sub("orders", "Multiplicative order data of b mod q", "jsonl");
  orders->add_option("--b", o.b);
  orders->add_option("--q", o.q);

  auto* census = sub("census", "Count q <= x coprime to b with small composite order", "csv");
  census->add_option("--b", o.b);
  census->add_option("--xmax", o.xmax)->check(CLI::PositiveNumber);
  census->add_option("--eps", o.eps, "Comma-separated exponents, decimal or p/q");
  omega_opt(census);

  auto* pn = sub("pn", "Integers with at most N distinct prime factors", "csv");
  pn->add_option("--xmax", o.xmax)->check(CLI::PositiveNumber);
  pn->add_option("--n", o.pn_n, "Max number of distinct prime factors")->check(CLI::Range(1u, 64u));

  auto* disc = sub("discrepancy", "Exact discrepancy of a finite point set", "jsonl");
  disc->add_option("--points", o.points, "File with one decimal or fraction per line");
  disc->add_option("--et-a", o.et_a, "Also evaluate the Erdos-Turan bound with this A");
  disc->add_option("--et-c", o.et_c, "Erdos-Turan constant C as p/q");

  auto* orbit_prof = sub("orbit-profile", "Weyl sums and discrepancy over orbits {b^k p/q}", "jsonl");
  orbit_prof->add_option("--b", o.b);
  orbit_prof->add_option("--q", o.q);

  auto* gap = sub("gap-hit", "Whether a point set meets a closed interval", "jsonl");
  gap->add_option("--points", o.points, "File with one decimal or fraction per line");
  gap->add_option("--interval", o.interval, "LO,HI as fractions");

  auto* cq = sub("count-q", "Denominators q in (b^(n-1), b^n] carrying points of K mod 1", "csv");
  ifs_opt(cq);
  cq->add_option("--n", o.n_range, "Level or LO..HI");
  omega_opt(cq);
  cq->add_option("--coding-period", o.coding_period, "Period bound for the coding route above the fiber-scan cap");
  cq->add_flag("--list", o.list, "Emit one row per denominator");

  auto* box = sub("boxdim", "Box-dimension estimates from level translate counts", "csv");
  ifs_opt(box);
  box->add_option("--depth", o.depth);

  auto* series = sub("series", "Covering series partial sums and threshold bracket", "csv");
  ifs_opt(series);
  series->add_option("--psi", o.psi, "pow:D[:C] or table:PATH");
  series->add_option("--mode", o.mode, "intrinsic or extrinsic");
  series->add_option("--nmax", o.n_max)->check(CLI::Range(1, 40));
  series->add_option("--smin", o.smin);
  series->add_option("--smax", o.smax);
  series->add_option("--width", o.width, "Bisection stops at this bracket width");
  series->add_option("--s", o.s, "Print partial sums at this exponent instead of bisecting");
  omega_opt(series);

  auto* balls = sub("ballsys", "b-adic lower-bound ball system", "csv");
  ifs_opt(balls);
  balls->add_option("--seed", o.seed, "Seed rational with denominator dividing b^k or b^k(b-1)");
  balls->add_option("--depth", o.depth)->check(CLI::Range(1, 30));
  balls->add_option("--psi", o.psi, "pow:D[:C] or table:PATH");
  balls->add_flag("--summary", o.summary, "One row per stage");

  auto* sep = sub("separation", "Cylinder counts in balls at scales r", "csv");
  ifs_opt(sep);
  sep->add_option("--kmax", o.kmax, "Scales b^-k for k = 1..kmax");
  sep->add_option("--scales", o.scales, "Comma-separated explicit scales p/q");
  sep->add_option("--max-probes", o.max_probes, "Sample at most this many probe points (0 = all)");

  std::vector<std::string> args;
  try {
    args = apply_config(raw_args);
  } catch (const UsageError& e) {
    print_error(err, "usage", e.what());
    return 2;
  }
  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", e.what());
    return 2;
  }

  CLI::App* chosen = app.get_subcommands().front();
  const std::string cmd = names.at(chosen);
  if (o.format.empty()) o.format = formats.at(cmd);
  if (cmd == "member" && o.rational.empty() && !o.selftest) {
    print_error(err, "usage", "--rational is required");
    return 2;
  }

  int code = 0;
  try {
    if (o.selftest) {
      const auto tests = selftests();
      const bool ok = tests.at(cmd)();
      if (!o.quiet) out << Json{{"selftest", cmd}, {"ok", ok}}.dump() << '\n';
      return ok ? 0 : 1;
    }
    Budget budget = Budget::from_environment();
    if (!o.budget_spec.empty()) {
      try {
        budget = Budget::parse(o.budget_spec, budget);
      } catch (const std::logic_error& e) {
        throw UsageError(std::string("--budget: ") + e.what());
      }
    }
    Table t;
    if (cmd == "member") t = run_member(o, budget, code);
    else if (cmd == "enumerate") t = run_enumerate(o, budget);
    else if (cmd == "orders") t = run_orders(o);
    else if (cmd == "census") t = run_census(o, budget);
    else if (cmd == "pn") t = run_pn(o);
    else if (cmd == "discrepancy") t = run_discrepancy(o);
    else if (cmd == "orbit-profile") t = run_orbit_profile(o, budget);
    else if (cmd == "gap-hit") t = run_gap_hit(o);
    else if (cmd == "count-q") t = run_count_q(o, budget);
    else if (cmd == "boxdim") t = run_boxdim(o);
    else if (cmd == "series") t = run_series(o, budget);
    else if (cmd == "ballsys") t = run_ballsys(o, budget);
    else if (cmd == "separation") t = run_separation(o, budget);

    if (o.quiet) return code;
    if (o.out_path.empty()) {
      emit(t, o.format, out);
    } else {
      std::ofstream f(o.out_path);
      if (!f) throw UsageError("cannot write " + o.out_path);
      emit(t, o.format, f);
    }
    return code;
  } catch (const UsageError& e) {
    print_error(err, "usage", e.what());
    return 2;
  } catch (const BudgetExceeded& e) {
    print_error(err, "budget", e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error(err, "domain", e.what());
    return 1;
  }
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, out, err);
}

}  // namespace cantor_dioph::cli
