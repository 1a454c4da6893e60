#include "waitlist/rational.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace waitlist {

namespace mp = boost::multiprecision;

ExactRational::ExactRational(BigInt numerator, BigInt denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
  if (den_.is_zero()) {
    throw std::invalid_argument("ExactRational: zero denominator");
  }
  normalize();
}

void ExactRational::normalize() {
  if (den_.sign() < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  if (num_.is_zero()) {
    den_ = 1;
    return;
  }
  BigInt g = mp::gcd(num_, den_);
  if (g != 1) {
    num_ /= g;
    den_ /= g;
  }
}

ExactRational& ExactRational::operator+=(const ExactRational& rhs) {
  if (den_ == rhs.den_) {
    num_ += rhs.num_;
  } else {
    num_ = num_ * rhs.den_ + rhs.num_ * den_;
    den_ *= rhs.den_;
  }
  normalize();
  return *this;
}

ExactRational& ExactRational::operator-=(const ExactRational& rhs) {
  return *this += -rhs;
}

ExactRational& ExactRational::operator*=(const ExactRational& rhs) {
  num_ *= rhs.num_;
  den_ *= rhs.den_;
  normalize();
  return *this;
}

ExactRational& ExactRational::operator/=(const ExactRational& rhs) {
  if (rhs.num_.is_zero()) {
    throw std::domain_error("ExactRational: division by zero");
  }
  num_ *= rhs.den_;
  den_ *= rhs.num_;
  normalize();
  return *this;
}

std::strong_ordering operator<=>(const ExactRational& a, const ExactRational& b) {
  const BigInt lhs = a.num_ * b.den_;
  const BigInt rhs = b.num_ * a.den_;
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

double ExactRational::to_double() const {
  if (num_.is_zero()) return 0.0;

  BigInt a = mp::abs(num_);
  BigInt b = den_;
  // Scale so the integer quotient carries at least 55 significant bits,
  // then round the low bits by hand with the remainder as sticky bit.
  const long shift = 55 - (static_cast<long>(mp::msb(a)) - static_cast<long>(mp::msb(b)));
  if (shift >= 0) {
    a <<= static_cast<unsigned>(shift);
  } else {
    b <<= static_cast<unsigned>(-shift);
  }
  BigInt q;
  BigInt r;
  mp::divide_qr(a, b, q, r);

  unsigned extra = static_cast<unsigned>(mp::msb(q)) + 1 - 53;
  BigInt mant = q >> extra;
  const BigInt low = q - (mant << extra);
  const BigInt half = BigInt(1) << (extra - 1);
  const bool sticky = !r.is_zero();
  if (low > half || (low == half && (sticky || mp::bit_test(mant, 0)))) {
    ++mant;
    if (mp::msb(mant) == 53) {
      mant >>= 1;
      ++extra;
    }
  }
  const double magnitude =
      std::ldexp(static_cast<double>(mant.convert_to<std::uint64_t>()), static_cast<int>(extra) - static_cast<int>(shift));
  return num_.sign() < 0 ? -magnitude : magnitude;
}

std::string ExactRational::str() const {
  if (den_ == 1) return num_.str();
  return num_.str() + "/" + den_.str();
}

ExactRational ExactRational::parse(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      return ExactRational(BigInt(text));
    }
    return ExactRational(BigInt(text.substr(0, slash)), BigInt(text.substr(slash + 1)));
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("ExactRational: cannot parse '" + text + "'");
  }
}

std::ostream& operator<<(std::ostream& os, const ExactRational& value) {
  return os << value.str();
}

}  // namespace waitlist
