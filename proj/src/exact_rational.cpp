#include "cantor_dioph/exact_rational.hpp"

#include <limits>
#include <ostream>
#include <stdexcept>

namespace cantor_dioph {

BigInt big_from_u64(std::uint64_t v) {
  BigInt r;
  mpz_import(r.get_mpz_t(), 1, -1, sizeof(v), 0, 0, &v);
  return r;
}

BigInt big_from_i64(std::int64_t v) {
  if (v >= 0) return big_from_u64(static_cast<std::uint64_t>(v));
  // -(v+1) avoids overflow at INT64_MIN.
  BigInt r = big_from_u64(static_cast<std::uint64_t>(-(v + 1)));
  r += 1;
  return -r;
}

bool big_fits_i64(const BigInt& v) {
  static const BigInt lo = big_from_i64(std::numeric_limits<std::int64_t>::min());
  static const BigInt hi = big_from_i64(std::numeric_limits<std::int64_t>::max());
  return v >= lo && v <= hi;
}

std::uint64_t big_to_u64(const BigInt& v) {
  if (sgn(v) < 0 || mpz_sizeinbase(v.get_mpz_t(), 2) > 64) {
    throw std::overflow_error("integer does not fit in 64 unsigned bits: " + v.get_str());
  }
  std::uint64_t out = 0;
  std::size_t count = 0;
  mpz_export(&out, &count, -1, sizeof(out), 0, 0, v.get_mpz_t());
  return count == 0 ? 0 : out;
}

std::int64_t big_to_i64(const BigInt& v) {
  if (!big_fits_i64(v)) throw std::overflow_error("integer does not fit in int64: " + v.get_str());
  if (sgn(v) >= 0) return static_cast<std::int64_t>(big_to_u64(v));
  BigInt m = -v - 1;
  return -static_cast<std::int64_t>(big_to_u64(m)) - 1;
}

BigInt big_pow(std::uint64_t base, std::uint64_t exp) {
  BigInt r;
  mpz_pow_ui(r.get_mpz_t(), big_from_u64(base).get_mpz_t(), exp);
  return r;
}

std::string to_string(const BigInt& v) { return v.get_str(); }

ExactRational::ExactRational(std::int64_t n) : value_(big_from_i64(n), 1) {}

ExactRational::ExactRational(std::int64_t num, std::int64_t den)
    : ExactRational(big_from_i64(num), big_from_i64(den)) {}

ExactRational::ExactRational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw std::domain_error("zero denominator");
  value_ = mpq_class(num, den);
  value_.canonicalize();
}

ExactRational::ExactRational(const mpq_class& q) : value_(q) { value_.canonicalize(); }

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (c < '0' || c > '9') return false;
  }
  return true;
}

BigInt parse_integer(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
  BigInt v(std::string(s), 10);
  return neg ? BigInt(-v) : v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

ExactRational ExactRational::parse(std::string_view text, bool allow_decimal) {
  text = trim(text);
  if (text.empty()) throw std::invalid_argument("empty rational");
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_integer(trim(text.substr(0, slash)));
    std::string_view den_text = trim(text.substr(slash + 1));
    if (!den_text.empty() && den_text.front() == '+') den_text.remove_prefix(1);
    BigInt den = parse_integer(den_text);
    if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
    return ExactRational(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    if (!allow_decimal) {
      throw std::invalid_argument("decimal input rejected, use p/q: '" + std::string(text) + "'");
    }
    std::string_view int_part = text.substr(0, dot);
    std::string_view frac_part = text.substr(dot + 1);
    bool neg = false;
    if (!int_part.empty() && (int_part.front() == '-' || int_part.front() == '+')) {
      neg = int_part.front() == '-';
      int_part.remove_prefix(1);
    }
    if (int_part.empty()) int_part = "0";
    if (frac_part.empty()) frac_part = "0";
    if (!all_digits(int_part) || !all_digits(frac_part)) {
      throw std::invalid_argument("malformed decimal: '" + std::string(text) + "'");
    }
    BigInt num(std::string(int_part) + std::string(frac_part), 10);
    BigInt den = big_pow(10, frac_part.size());
    return ExactRational(neg ? BigInt(-num) : num, den);
  }
  return ExactRational(parse_integer(text), BigInt(1));
}

BigInt ExactRational::floor() const {
  BigInt r;
  mpz_fdiv_q(r.get_mpz_t(), value_.get_num_mpz_t(), value_.get_den_mpz_t());
  return r;
}

BigInt ExactRational::ceil() const {
  BigInt r;
  mpz_cdiv_q(r.get_mpz_t(), value_.get_num_mpz_t(), value_.get_den_mpz_t());
  return r;
}

ExactRational ExactRational::frac() const { return *this - ExactRational(floor(), BigInt(1)); }

ExactRational ExactRational::abs() const { return sign() < 0 ? -*this : *this; }

std::string ExactRational::to_string() const {
  if (is_integer()) return value_.get_num().get_str();
  return value_.get_num().get_str() + "/" + value_.get_den().get_str();
}

ExactRational ExactRational::operator-() const {
  ExactRational r;
  r.value_ = -value_;
  return r;
}

ExactRational& ExactRational::operator+=(const ExactRational& o) {
  value_ += o.value_;
  return *this;
}
ExactRational& ExactRational::operator-=(const ExactRational& o) {
  value_ -= o.value_;
  return *this;
}
ExactRational& ExactRational::operator*=(const ExactRational& o) {
  value_ *= o.value_;
  return *this;
}
ExactRational& ExactRational::operator/=(const ExactRational& o) {
  if (o.sign() == 0) throw std::domain_error("division by zero");
  value_ /= o.value_;
  return *this;
}

std::size_t ExactRational::hash() const {
  auto mix = [](std::size_t h, const mpz_srcptr z) {
    const mp_size_t n = mpz_size(z);
    h ^= std::hash<long>{}(static_cast<long>(mpz_sgn(z))) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    for (mp_size_t i = 0; i < n; ++i) {
      h ^= std::hash<mp_limb_t>{}(mpz_getlimbn(z, i)) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return h;
  };
  std::size_t h = mix(0, value_.get_num_mpz_t());
  return mix(h, value_.get_den_mpz_t());
}

std::ostream& operator<<(std::ostream& os, const ExactRational& r) { return os << r.to_string(); }

ExactRational min(const ExactRational& a, const ExactRational& b) { return b < a ? b : a; }
ExactRational max(const ExactRational& a, const ExactRational& b) { return a < b ? b : a; }

}  // namespace cantor_dioph
