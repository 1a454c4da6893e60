#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace waitlist {

using BigInt = boost::multiprecision::cpp_int;

/// Exact rational number kept in canonical form: the denominator is
/// positive and shares no factor with the numerator.
class ExactRational {
 public:
  ExactRational() : num_(0), den_(1) {}
  ExactRational(std::int64_t value) : num_(value), den_(1) {}  // NOLINT: implicit by intent
  ExactRational(BigInt value) : num_(std::move(value)), den_(1) {}  // NOLINT
  ExactRational(BigInt numerator, BigInt denominator);

  const BigInt& numerator() const noexcept { return num_; }
  const BigInt& denominator() const noexcept { return den_; }

  bool is_zero() const noexcept { return num_.is_zero(); }
  int sign() const noexcept { return num_.sign(); }

  /// Correctly rounded (round-to-nearest-even) conversion, so values that
  /// are representable come out exact and the mapping is monotone.
  double to_double() const;

  /// "p/q", or "p" when the denominator is one.
  std::string str() const;

  /// Parses "p", "-p" or "p/q". Throws std::invalid_argument on bad input
  /// or a zero denominator.
  static ExactRational parse(const std::string& text);

  ExactRational& operator+=(const ExactRational& rhs);
  ExactRational& operator-=(const ExactRational& rhs);
  ExactRational& operator*=(const ExactRational& rhs);
  ExactRational& operator/=(const ExactRational& rhs);

  friend ExactRational operator+(ExactRational lhs, const ExactRational& rhs) { return lhs += rhs; }
  friend ExactRational operator-(ExactRational lhs, const ExactRational& rhs) { return lhs -= rhs; }
  friend ExactRational operator*(ExactRational lhs, const ExactRational& rhs) { return lhs *= rhs; }
  friend ExactRational operator/(ExactRational lhs, const ExactRational& rhs) { return lhs /= rhs; }
  friend ExactRational operator-(ExactRational value) {
    value.num_ = -value.num_;
    return value;
  }

  friend bool operator==(const ExactRational& a, const ExactRational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const ExactRational& a, const ExactRational& b);

 private:
  void normalize();

  BigInt num_;
  BigInt den_;
};

std::ostream& operator<<(std::ostream& os, const ExactRational& value);

}  // namespace waitlist
