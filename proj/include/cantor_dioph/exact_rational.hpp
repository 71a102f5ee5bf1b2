#pragma once

// Exact rationals and arbitrary-precision integers (GMP-backed).
//
// ExactRational is always stored reduced with a positive denominator, so
// structural equality is value equality and denominator() is the height.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>

namespace cantor_dioph {

using BigInt = mpz_class;

BigInt big_from_u64(std::uint64_t v);
BigInt big_from_i64(std::int64_t v);
/// Throws std::overflow_error when the value does not fit.
std::int64_t big_to_i64(const BigInt& v);
std::uint64_t big_to_u64(const BigInt& v);
bool big_fits_i64(const BigInt& v);
BigInt big_pow(std::uint64_t base, std::uint64_t exp);
std::string to_string(const BigInt& v);

class ExactRational {
 public:
  ExactRational() = default;
  ExactRational(std::int64_t n);  // NOLINT(google-explicit-constructor)
  ExactRational(std::int64_t num, std::int64_t den);
  ExactRational(const BigInt& num, const BigInt& den);
  explicit ExactRational(const mpq_class& q);

  /// Accepts "p/q", "p", and (when allow_decimal) finite decimals such as
  /// "-0.125", converted exactly. Throws std::invalid_argument otherwise.
  static ExactRational parse(std::string_view text, bool allow_decimal = false);

  BigInt numerator() const { return value_.get_num(); }
  BigInt denominator() const { return value_.get_den(); }
  /// Height of the reduced fraction, i.e. its denominator.
  BigInt height() const { return value_.get_den(); }

  const mpq_class& raw() const { return value_; }

  bool is_integer() const { return value_.get_den() == 1; }
  int sign() const { return sgn(value_); }

  BigInt floor() const;
  BigInt ceil() const;
  /// Fractional part in [0, 1).
  ExactRational frac() const;
  ExactRational abs() const;

  double to_double() const { return value_.get_d(); }
  std::string to_string() const;

  ExactRational operator-() const;
  ExactRational& operator+=(const ExactRational& o);
  ExactRational& operator-=(const ExactRational& o);
  ExactRational& operator*=(const ExactRational& o);
  ExactRational& operator/=(const ExactRational& o);

  friend ExactRational operator+(ExactRational a, const ExactRational& b) { return a += b; }
  friend ExactRational operator-(ExactRational a, const ExactRational& b) { return a -= b; }
  friend ExactRational operator*(ExactRational a, const ExactRational& b) { return a *= b; }
  friend ExactRational operator/(ExactRational a, const ExactRational& b) { return a /= b; }

  friend bool operator==(const ExactRational& a, const ExactRational& b) {
    return cmp(a.value_, b.value_) == 0;
  }
  friend std::strong_ordering operator<=>(const ExactRational& a, const ExactRational& b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  std::size_t hash() const;

 private:
  mpq_class value_{0};
};

std::ostream& operator<<(std::ostream& os, const ExactRational& r);

ExactRational min(const ExactRational& a, const ExactRational& b);
ExactRational max(const ExactRational& a, const ExactRational& b);

}  // namespace cantor_dioph

template <>
struct std::hash<cantor_dioph::ExactRational> {
  std::size_t operator()(const cantor_dioph::ExactRational& r) const noexcept { return r.hash(); }
};
