#pragma once

#include <cstdint>
#include <cstdlib>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace circlelab {

using i64 = std::int64_t;
using i128 = __int128;

[[noreturn]] inline void throw_overflow(const char* where) {
  throw std::overflow_error(std::string("exact arithmetic overflow in ") + where);
}

inline i64 narrow(i128 v, const char* where = "narrow") {
  if (v > i128(INT64_MAX) || v < i128(INT64_MIN)) throw_overflow(where);
  return static_cast<i64>(v);
}

inline i64 gcd64(i64 a, i64 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b) { i64 t = a % b; a = b; b = t; }
  return a;
}

/// Exact rational on 64-bit numerator/denominator, always reduced, den > 0.
/// Intermediates run through 128 bits; anything wider throws instead of wrapping.
class Rat {
 public:
  Rat() : num_(0), den_(1) {}
  Rat(i64 n) : num_(n), den_(1) {}
  Rat(i64 n, i64 d) { set(i128(n), i128(d)); }

  static Rat from_i128(i128 n, i128 d) { Rat r; r.set(n, d); return r; }

  /// Exact conversion of a binary double (used for config literals like 0.5).
  static Rat from_double(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite value is not rational");
    if (x == 0.0) return Rat();
    int e = 0;
    double m = std::frexp(x, &e);  // x = m * 2^e, |m| in [0.5, 1)
    i64 mant = static_cast<i64>(std::ldexp(m, 53));
    int shift = e - 53;
    Rat r(mant);
    while (shift > 0) { r = r * Rat(2); --shift; }
    while (shift < 0) { r = r / Rat(2); ++shift; }
    return r;
  }

  i64 num() const { return num_; }
  i64 den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }

  friend Rat operator+(const Rat& a, const Rat& b) {
    return from_i128(i128(a.num_) * b.den_ + i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rat operator-(const Rat& a, const Rat& b) {
    return from_i128(i128(a.num_) * b.den_ - i128(b.num_) * a.den_, i128(a.den_) * b.den_);
  }
  friend Rat operator*(const Rat& a, const Rat& b) {
    return from_i128(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
  }
  friend Rat operator/(const Rat& a, const Rat& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return from_i128(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
  }
  Rat operator-() const { Rat r; r.num_ = -num_; r.den_ = den_; return r; }
  Rat& operator+=(const Rat& o) { *this = *this + o; return *this; }
  Rat& operator-=(const Rat& o) { *this = *this - o; return *this; }
  Rat& operator*=(const Rat& o) { *this = *this * o; return *this; }
  Rat& operator/=(const Rat& o) { *this = *this / o; return *this; }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rat& a, const Rat& b) { return !(a == b); }
  friend bool operator<(const Rat& a, const Rat& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
  friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
  friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }

  Rat abs() const { return num_ < 0 ? -*this : *this; }

  i64 floor() const {
    if (num_ >= 0) return num_ / den_;
    return -((-num_ + den_ - 1) / den_);
  }
  i64 ceil() const { return -((-*this).floor()); }
  /// Nearest integer, ties away from zero.
  i64 round_nearest() const {
    i64 f = floor();
    Rat frac = *this - Rat(f);
    if (frac * Rat(2) >= Rat(1)) return f + 1;
    return f;
  }
  /// Representative in [0, 1).
  Rat mod1() const { return *this - Rat(floor()); }

  double to_double() const { return double(num_) / double(den_); }

  Rat pow(int e) const {
    if (e < 0) return (Rat(1) / *this).pow(-e);
    Rat r(1), b = *this;
    while (e) {
      if (e & 1) r *= b;
      b = (e > 1) ? b * b : b;
      e >>= 1;
    }
    return r;
  }

  std::string str() const {
    std::string s = std::to_string(num_);
    if (den_ != 1) s += "/" + std::to_string(den_);
    return s;
  }

  /// Parses "a", "a/b", or a decimal like "-1.25".
  static Rat parse(std::string_view sv) {
    std::string s(sv);
    if (auto slash = s.find('/'); slash != std::string::npos) {
      return Rat(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
    }
    if (auto dot = s.find('.'); dot != std::string::npos) {
      std::string head = s.substr(0, dot), tail = s.substr(dot + 1);
      i64 scale = 1;
      for (size_t i = 0; i < tail.size(); ++i) scale = narrow(i128(scale) * 10, "Rat::parse");
      bool neg = !head.empty() && head[0] == '-';
      i64 ip = head.empty() || head == "-" ? 0 : std::llabs(std::stoll(head));
      i64 fp = tail.empty() ? 0 : std::stoll(tail);
      i128 num = i128(ip) * scale + fp;
      return from_i128(neg ? -num : num, scale);
    }
    return Rat(std::stoll(s));
  }

 private:
  void set(i128 n, i128 d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) { n = -n; d = -d; }
    i128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    num_ = narrow(n, "Rat");
    den_ = narrow(d, "Rat");
  }
  static i128 gcd128(i128 a, i128 b) {
    while (b) { i128 t = a % b; a = b; b = t; }
    return a < 0 ? -a : a;
  }

  i64 num_;
  i64 den_;
};

inline i64 lcm64(i64 a, i64 b) {
  if (a == 0 || b == 0) return 0;
  return narrow(i128(a) / gcd64(a, b) * b, "lcm");
}

}  // namespace circlelab
