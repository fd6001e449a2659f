#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracles {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// Raised when an operation's precondition on its arguments fails.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Raised when an enumeration would exceed its configured cap.
class ResourceError : public std::runtime_error {
 public:
  ResourceError(const std::string& what, std::size_t cap)
      : std::runtime_error(what + " (cap " + std::to_string(cap) + ")"), cap_(cap) {}
  std::size_t cap() const { return cap_; }

 private:
  std::size_t cap_;
};

// Raised for malformed textual input (JSON documents, rational literals).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string to_string(const Rational& r) { return r.str(); }

// Accepts "p/q", "p" and "-p/q"; whitespace is not permitted.
inline Rational parse_rational(std::string_view text) {
  auto digits_ok = [](std::string_view s) {
    if (s.empty()) return false;
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) return false;
    for (; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9') return false;
    return true;
  };
  auto slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den = slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!digits_ok(num) || !digits_ok(den) || den[0] == '-' || den[0] == '+')
    throw ParseError("malformed rational '" + std::string(text) + "'");
  BigInt n{std::string(num[0] == '+' ? num.substr(1) : num)};
  BigInt d{std::string(den)};
  if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  return Rational(n, d);
}

inline Rational sum(const std::vector<Rational>& xs) {
  Rational total = 0;
  for (const auto& x : xs) total += x;
  return total;
}

inline BigInt lcm_big(const BigInt& a, const BigInt& b) {
  if (a == 0 || b == 0) return 0;
  return boost::multiprecision::abs(a / boost::multiprecision::gcd(a, b) * b);
}

inline Rational pow_rational(const Rational& base, const BigInt& exponent) {
  if (exponent < 0) return pow_rational(1 / base, -exponent);
  unsigned e = exponent.convert_to<unsigned>();
  return Rational(boost::multiprecision::pow(numerator(base), e), boost::multiprecision::pow(denominator(base), e));
}

// An exact value of the form (1/scale) * log(product), or -infinity.
// Weighted sums of logarithms of rationals with rational weights close
// under this representation, so log scores compare without rounding.
class LogValue {
 public:
  LogValue() : product_(1), scale_(1) {}

  static LogValue negative_infinity() {
    LogValue v;
    v.neg_inf_ = true;
    return v;
  }

  // weight * log(x) for x > 0 (x == 0 yields -inf when weight > 0).
  static LogValue weighted_log(const Rational& weight, const Rational& x) {
    if (weight < 0) throw DomainError("negative weight in log score");
    if (weight == 0) return LogValue();
    if (x < 0) throw DomainError("log of negative value");
    if (x == 0) return negative_infinity();
    LogValue v;
    v.product_ = pow_rational(x, numerator(weight));
    v.scale_ = denominator(weight);
    return v;
  }

  bool is_negative_infinity() const { return neg_inf_; }
  const Rational& product() const { return product_; }
  const BigInt& scale() const { return scale_; }

  double approx() const {
    if (neg_inf_) return -std::numeric_limits<double>::infinity();
    // log of a huge rational: split into numerator/denominator digit counts.
    auto log_big = [](const BigInt& v) {
      std::string s = v.str();
      std::size_t keep = std::min<std::size_t>(s.size(), 17);
      double head = std::stod(s.substr(0, keep));
      return std::log(head) + static_cast<double>(s.size() - keep) * std::log(10.0);
    };
    double lp = log_big(numerator(product_)) - log_big(denominator(product_));
    return lp / scale_.convert_to<double>();
  }

  friend LogValue operator+(const LogValue& a, const LogValue& b) {
    if (a.neg_inf_ || b.neg_inf_) return negative_infinity();
    LogValue v;
    v.scale_ = lcm_big(a.scale_, b.scale_);
    v.product_ = pow_rational(a.product_, v.scale_ / a.scale_) * pow_rational(b.product_, v.scale_ / b.scale_);
    v.normalize();
    return v;
  }
  LogValue& operator+=(const LogValue& o) { return *this = *this + o; }

  // Multiplication by a nonnegative rational weight.
  friend LogValue operator*(const Rational& w, const LogValue& a) {
    if (w < 0) throw DomainError("negative scaling of log value");
    if (w == 0) return LogValue();
    if (a.neg_inf_) return negative_infinity();
    LogValue v;
    v.product_ = pow_rational(a.product_, numerator(w));
    v.scale_ = a.scale_ * denominator(w);
    v.normalize();
    return v;
  }

  friend int compare(const LogValue& a, const LogValue& b) {
    if (a.neg_inf_ || b.neg_inf_) return (a.neg_inf_ ? 0 : 1) - (b.neg_inf_ ? 0 : 1);
    // (1/sa) log pa  vs  (1/sb) log pb  <=>  pa^sb vs pb^sa
    Rational lhs = pow_rational(a.product_, b.scale_);
    Rational rhs = pow_rational(b.product_, a.scale_);
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
  }
  friend bool operator==(const LogValue& a, const LogValue& b) { return compare(a, b) == 0; }
  friend bool operator<(const LogValue& a, const LogValue& b) { return compare(a, b) < 0; }
  friend bool operator>(const LogValue& a, const LogValue& b) { return compare(a, b) > 0; }

  std::string str() const {
    if (neg_inf_) return "-inf";
    if (product_ == 1) return "0";
    return "log(" + product_.str() + ")/" + scale_.str();
  }

 private:
  void normalize() {
    if (product_ == 1) scale_ = 1;
  }

  bool neg_inf_ = false;
  Rational product_;
  BigInt scale_;
};

}  // namespace oracles
