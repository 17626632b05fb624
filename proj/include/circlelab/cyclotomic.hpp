#pragma once

#include <complex>
#include <map>
#include <optional>
#include <vector>

#include "circlelab/rational.hpp"

namespace circlelab {

/// Integer combination of m-th roots of unity, stored densely by exponent.
/// Supports the exact bookkeeping behind complete character sums: values are
/// proven rational by reduction modulo the m-th cyclotomic polynomial.
struct CycloSum {
  i64 m = 1;
  std::vector<i128> c;  // coefficient of e(k/m)

  explicit CycloSum(i64 modulus = 1) : m(modulus), c(size_t(modulus), 0) {}

  void add_phase(i64 k, i128 count) { c[size_t(((k % m) + m) % m)] += count; }

  /// Reinterpret at a conductor that is a multiple of m.
  CycloSum lifted(i64 big) const {
    if (big % m != 0) throw std::invalid_argument("conductor lift must be a multiple");
    CycloSum out(big);
    i64 f = big / m;
    for (i64 k = 0; k < m; ++k) out.c[size_t(k * f)] += c[size_t(k)];
    return out;
  }

  void accumulate(const CycloSum& o) {
    if (o.m != m) throw std::invalid_argument("conductor mismatch");
    for (size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
  }

  void scale(i128 f) {
    for (auto& x : c) x *= f;
  }

  /// Cyclic convolution: the sum representing the product of the two values.
  CycloSum convolved(const CycloSum& o) const {
    if (o.m != m) throw std::invalid_argument("conductor mismatch");
    CycloSum out(m);
    for (i64 i = 0; i < m; ++i) {
      if (c[size_t(i)] == 0) continue;
      for (i64 j = 0; j < m; ++j) {
        if (o.c[size_t(j)] == 0) continue;
        i64 k = i + j;
        if (k >= m) k -= m;
        out.c[size_t(k)] += c[size_t(i)] * o.c[size_t(j)];
      }
    }
    return out;
  }

  std::complex<double> value() const {
    double re = 0, im = 0;
    for (i64 k = 0; k < m; ++k) {
      if (c[size_t(k)] == 0) continue;
      double ang = 2.0 * 3.14159265358979323846 * double(k) / double(m);
      double w = double(c[size_t(k)]);
      re += w * std::cos(ang);
      im += w * std::sin(ang);
    }
    return {re, im};
  }

  /// Exact rational value when the sum is rational (reduction mod the m-th
  /// cyclotomic polynomial leaves a constant); nullopt otherwise.
  std::optional<i128> exact_integer() const;
};

/// Coefficients of the m-th cyclotomic polynomial (ascending, int64).
const std::vector<i64>& cyclotomic_poly(i64 m);

}  // namespace circlelab
