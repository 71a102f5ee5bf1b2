#pragma once

// Minimal RAII wrapper over an MPFR float with explicit precision. Every
// operation rounds to nearest at the precision of the destination.

#include <mpfr.h>

#include <cstdint>
#include <string>

#include "cantor_dioph/exact_rational.hpp"

namespace cantor_dioph {

/// Bits needed to carry `digits` decimal digits plus guard bits.
mpfr_prec_t precision_bits_for_digits(int digits);

class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t bits);
  BigFloat(mpfr_prec_t bits, double v);
  BigFloat(mpfr_prec_t bits, const ExactRational& v);
  BigFloat(const BigFloat& o);
  BigFloat(BigFloat&& o) noexcept;
  BigFloat& operator=(const BigFloat& o);
  BigFloat& operator=(BigFloat&& o) noexcept;
  ~BigFloat();

  static BigFloat pi(mpfr_prec_t bits);

  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }
  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }

  BigFloat& operator+=(const BigFloat& o);
  BigFloat& operator-=(const BigFloat& o);
  BigFloat& operator*=(const BigFloat& o);
  BigFloat& operator/=(const BigFloat& o);

  friend BigFloat operator+(BigFloat a, const BigFloat& b) { return a += b; }
  friend BigFloat operator-(BigFloat a, const BigFloat& b) { return a -= b; }
  friend BigFloat operator*(BigFloat a, const BigFloat& b) { return a *= b; }
  friend BigFloat operator/(BigFloat a, const BigFloat& b) { return a /= b; }

  friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }

  /// Sign of (this - q), computed exactly.
  int compare(const ExactRational& q) const;

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  /// Scientific notation with `digits` significant digits.
  std::string to_string(int digits) const;

 private:
  mpfr_t v_;
};

BigFloat sqrt(const BigFloat& x);
BigFloat cos(const BigFloat& x);
BigFloat sin(const BigFloat& x);
BigFloat log(const BigFloat& x);
BigFloat exp(const BigFloat& x);
BigFloat abs(const BigFloat& x);
/// 2^-e at the given precision.
BigFloat pow2(mpfr_prec_t bits, long e);

}  // namespace cantor_dioph
