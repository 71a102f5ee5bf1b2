#include "cantor_dioph/big_float.hpp"

#include <cmath>
#include <vector>

namespace cantor_dioph {

mpfr_prec_t precision_bits_for_digits(int digits) {
  return static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873623)) + 32;
}

BigFloat::BigFloat(mpfr_prec_t bits) {
  mpfr_init2(v_, bits);
  mpfr_set_zero(v_, 1);
}

BigFloat::BigFloat(mpfr_prec_t bits, double v) {
  mpfr_init2(v_, bits);
  mpfr_set_d(v_, v, MPFR_RNDN);
}

BigFloat::BigFloat(mpfr_prec_t bits, const ExactRational& v) {
  mpfr_init2(v_, bits);
  mpfr_set_q(v_, v.raw().get_mpq_t(), MPFR_RNDN);
}

BigFloat::BigFloat(const BigFloat& o) {
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_set(v_, o.v_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& o) noexcept {
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_swap(v_, o.v_);
}

BigFloat& BigFloat::operator=(const BigFloat& o) {
  if (this != &o) {
    mpfr_set_prec(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& o) noexcept {
  mpfr_swap(v_, o.v_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(v_); }

BigFloat BigFloat::pi(mpfr_prec_t bits) {
  BigFloat r(bits);
  mpfr_const_pi(r.v_, MPFR_RNDN);
  return r;
}

BigFloat& BigFloat::operator+=(const BigFloat& o) {
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
BigFloat& BigFloat::operator-=(const BigFloat& o) {
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
BigFloat& BigFloat::operator*=(const BigFloat& o) {
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
BigFloat& BigFloat::operator/=(const BigFloat& o) {
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

int BigFloat::compare(const ExactRational& q) const { return mpfr_cmp_q(v_, q.raw().get_mpq_t()); }

std::string BigFloat::to_string(int digits) const {
  if (mpfr_zero_p(v_)) return "0";
  std::vector<char> buf(static_cast<std::size_t>(digits) + 32);
  const std::string fmt = "%." + std::to_string(digits - 1) + "Re";
  mpfr_snprintf(buf.data(), buf.size(), fmt.c_str(), v_);
  return std::string(buf.data());
}

BigFloat sqrt(const BigFloat& x) {
  BigFloat r(x.precision());
  mpfr_sqrt(r.get(), x.get(), MPFR_RNDN);
  return r;
}
BigFloat cos(const BigFloat& x) {
  BigFloat r(x.precision());
  mpfr_cos(r.get(), x.get(), MPFR_RNDN);
  return r;
}
BigFloat sin(const BigFloat& x) {
  BigFloat r(x.precision());
  mpfr_sin(r.get(), x.get(), MPFR_RNDN);
  return r;
}
BigFloat log(const BigFloat& x) {
  BigFloat r(x.precision());
  mpfr_log(r.get(), x.get(), MPFR_RNDN);
  return r;
}
BigFloat exp(const BigFloat& x) {
  BigFloat r(x.precision());
  mpfr_exp(r.get(), x.get(), MPFR_RNDN);
  return r;
}
BigFloat abs(const BigFloat& x) {
  BigFloat r(x.precision());
  mpfr_abs(r.get(), x.get(), MPFR_RNDN);
  return r;
}
BigFloat pow2(mpfr_prec_t bits, long e) {
  BigFloat r(bits);
  mpfr_set_ui_2exp(r.get(), 1, -e, MPFR_RNDN);
  return r;
}

}  // namespace cantor_dioph
