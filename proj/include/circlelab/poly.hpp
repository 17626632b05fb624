#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "circlelab/nf_core.hpp"
#include "circlelab/rational.hpp"

namespace circlelab {

// Coefficient plumbing shared by the sparse polynomial template. One overload
// set keyed by an optional field context; scalar types ignore the context.
inline Rat cadd(const NumberField*, const Rat& a, const Rat& b) { return a + b; }
inline Rat cmul(const NumberField*, const Rat& a, const Rat& b) { return a * b; }
inline Rat cneg(const Rat& a) { return -a; }
inline bool ciszero(const Rat& a) { return a.is_zero(); }
inline Rat czero_of(const NumberField*, const Rat*) { return Rat(0); }
inline Rat cscale_int(const NumberField*, const Rat& a, i64 m) { return a * Rat(m); }

inline i64 cadd(const NumberField*, i64 a, i64 b) { return narrow(i128(a) + b, "poly add"); }
inline i64 cmul(const NumberField*, i64 a, i64 b) { return narrow(i128(a) * b, "poly mul"); }
inline i64 cneg(i64 a) { return -a; }
inline bool ciszero(i64 a) { return a == 0; }
inline i64 czero_of(const NumberField*, const i64*) { return 0; }
inline i64 cscale_int(const NumberField*, i64 a, i64 m) { return narrow(i128(a) * m, "poly scale"); }

inline double cadd(const NumberField*, double a, double b) { return a + b; }
inline double cmul(const NumberField*, double a, double b) { return a * b; }
inline double cneg(double a) { return -a; }
inline bool ciszero(double a) { return a == 0.0; }
inline double czero_of(const NumberField*, const double*) { return 0.0; }
inline double cscale_int(const NumberField*, double a, i64 m) { return a * double(m); }

inline Elem cadd(const NumberField*, const Elem& a, const Elem& b) { return add(a, b); }
inline Elem cmul(const NumberField* K, const Elem& a, const Elem& b) { return element_mul(*K, a, b); }
inline Elem cneg(const Elem& a) { return neg(a); }
inline Elem czero_of(const NumberField* K, const Elem*) { return Elem(K->n); }
inline Elem cscale_int(const NumberField*, const Elem& a, i64 m) { return scale(Rat(m), a); }

/// Sparse multivariate polynomial over coefficients C; terms kept sorted by
/// exponent vector, coefficients nonzero.
template <class C>
struct MPoly {
  struct Term {
    std::vector<int> e;
    C c;
  };

  int nv = 0;
  std::vector<Term> terms;

  MPoly() = default;
  explicit MPoly(int nvars) : nv(nvars) {}

  static MPoly constant(int nvars, C c) {
    MPoly p(nvars);
    if (!ciszero(c)) p.terms.push_back({std::vector<int>(nvars, 0), std::move(c)});
    return p;
  }

  bool is_zero() const { return terms.empty(); }

  int total_degree() const {
    int d = -1;
    for (auto& t : terms) {
      int s = 0;
      for (int x : t.e) s += x;
      d = std::max(d, s);
    }
    return d;
  }

  void add_term(std::vector<int> e, C c) { terms.push_back({std::move(e), std::move(c)}); }

  void normalize(const NumberField* K = nullptr) {
    std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.e < b.e; });
    std::vector<Term> out;
    for (auto& t : terms) {
      if (!out.empty() && out.back().e == t.e)
        out.back().c = cadd(K, out.back().c, t.c);
      else
        out.push_back(std::move(t));
    }
    std::erase_if(out, [](const Term& t) { return ciszero(t.c); });
    terms = std::move(out);
  }

  MPoly plus(const MPoly& o, const NumberField* K = nullptr) const {
    MPoly r(nv);
    r.terms = terms;
    r.terms.insert(r.terms.end(), o.terms.begin(), o.terms.end());
    r.normalize(K);
    return r;
  }

  MPoly negated() const {
    MPoly r = *this;
    for (auto& t : r.terms) t.c = cneg(t.c);
    return r;
  }

  MPoly minus(const MPoly& o, const NumberField* K = nullptr) const { return plus(o.negated(), K); }

  MPoly times(const MPoly& o, const NumberField* K = nullptr) const {
    MPoly r(nv);
    r.terms.reserve(terms.size() * o.terms.size());
    for (auto& a : terms)
      for (auto& b : o.terms) {
        Term t;
        t.e.resize(nv);
        for (int i = 0; i < nv; ++i) t.e[i] = a.e[i] + b.e[i];
        t.c = cmul(K, a.c, b.c);
        r.terms.push_back(std::move(t));
      }
    r.normalize(K);
    return r;
  }

  MPoly scaled(const C& s, const NumberField* K = nullptr) const {
    MPoly r(nv);
    for (auto& t : terms) {
      C c = cmul(K, t.c, s);
      if (!ciszero(c)) r.terms.push_back({t.e, std::move(c)});
    }
    return r;
  }

  MPoly degree_part(int d) const {
    MPoly r(nv);
    for (auto& t : terms) {
      int s = 0;
      for (int x : t.e) s += x;
      if (s == d) r.terms.push_back(t);
    }
    return r;
  }

  C eval(std::span<const C> x, const NumberField* K = nullptr) const {
    const C* tag = nullptr;
    C acc = czero_of(K, tag);
    for (auto& t : terms) {
      C m = t.c;
      for (int i = 0; i < nv; ++i)
        for (int j = 0; j < t.e[i]; ++j) m = cmul(K, m, x[i]);
      acc = cadd(K, acc, m);
    }
    return acc;
  }

  /// Substitute variable i by a constant. nv is unchanged; the variable is
  /// simply gone from the support.
  MPoly substituted(int i, const C& v, const NumberField* K = nullptr) const {
    MPoly r(nv);
    for (auto& t : terms) {
      C c = t.c;
      for (int j = 0; j < t.e[i]; ++j) c = cmul(K, c, v);
      r.terms.push_back({t.e, std::move(c)});
      r.terms.back().e[i] = 0;
    }
    r.normalize(K);
    return r;
  }

  /// x_i -> x_i + v by binomial expansion.
  MPoly shifted(int i, const C& v, const NumberField* K = nullptr) const {
    MPoly r(nv);
    for (auto& t : terms) {
      int e = t.e[i];
      std::vector<C> vpow{t.c};
      for (int k = 1; k <= e; ++k) vpow.push_back(cmul(K, vpow.back(), v));
      for (int k = 0; k <= e; ++k) {
        // coefficient t.c * binom(e,k) * v^{e-k} on x^k
        C c = cscale_int(K, vpow[e - k], binom_coeff(e, k));
        if (ciszero(c)) continue;
        Term nt;
        nt.e = t.e;
        nt.e[i] = k;
        nt.c = std::move(c);
        r.terms.push_back(std::move(nt));
      }
    }
    r.normalize(K);
    return r;
  }

  MPoly derivative(int i, const NumberField* K = nullptr) const {
    MPoly r(nv);
    for (auto& t : terms) {
      if (t.e[i] == 0) continue;
      Term nt;
      nt.e = t.e;
      nt.e[i] -= 1;
      nt.c = cscale_int(K, t.c, t.e[i]);
      if (!ciszero(nt.c)) r.terms.push_back(std::move(nt));
    }
    r.normalize(K);
    return r;
  }

  std::vector<int> support() const {
    std::vector<int> s;
    for (int i = 0; i < nv; ++i)
      for (auto& t : terms)
        if (t.e[i] > 0) {
          s.push_back(i);
          break;
        }
    return s;
  }

  static i64 binom_coeff(int n, int k) {
    i128 r = 1;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return narrow(r, "binom");
  }
};

using PolyE = MPoly<Elem>;
using PolyZ = MPoly<i64>;
using PolyQ = MPoly<Rat>;
using PolyD = MPoly<double>;

/// Exact evaluation of an integer polynomial at an integer point, 128-bit
/// accumulator (counting engines).
inline i128 eval_z(const PolyZ& p, std::span<const i64> x) {
  i128 acc = 0;
  for (auto& t : p.terms) {
    i128 m = t.c;
    for (int i = 0; i < p.nv; ++i)
      for (int j = 0; j < t.e[i]; ++j) m *= x[i];
    acc += m;
  }
  return acc;
}

inline double eval_d(const PolyZ& p, std::span<const double> x) {
  double acc = 0;
  for (auto& t : p.terms) {
    double m = double(t.c);
    for (int i = 0; i < p.nv; ++i)
      for (int j = 0; j < t.e[i]; ++j) m *= x[i];
    acc += m;
  }
  return acc;
}

}  // namespace circlelab
