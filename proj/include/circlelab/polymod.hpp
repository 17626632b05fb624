#pragma once

#include <vector>

#include "circlelab/rational.hpp"
#include "circlelab/rng.hpp"

namespace circlelab {

/// Univariate polynomial arithmetic over F_p for small p. Coefficients are
/// kept in [0, p); vectors are trimmed of leading zeros.
namespace fp {

using Poly = std::vector<i64>;

inline i64 mod(i64 a, i64 p) { return ((a % p) + p) % p; }

inline i64 powmod(i64 b, i64 e, i64 p) {
  i64 r = 1 % p;
  b = mod(b, p);
  while (e) {
    if (e & 1) r = narrow(i128(r) * b % p, "powmod");
    b = narrow(i128(b) * b % p, "powmod");
    e >>= 1;
  }
  return r;
}

inline i64 invmod(i64 a, i64 p) { return powmod(mod(a, p), p - 2, p); }

inline Poly trim(Poly f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
  return f;
}
inline int deg(const Poly& f) { return int(f.size()) - 1; }

inline Poly reduce(const std::vector<i64>& f, i64 p) {
  Poly r(f.size());
  for (size_t i = 0; i < f.size(); ++i) r[i] = mod(f[i], p);
  return trim(r);
}

inline Poly mul(const Poly& a, const Poly& b, i64 p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = narrow((i128(r[i + j]) + i128(a[i]) * b[j]) % p, "fp::mul");
  return trim(r);
}

inline Poly sub(Poly a, const Poly& b, i64 p) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (size_t i = 0; i < b.size(); ++i) a[i] = mod(a[i] - b[i], p);
  return trim(a);
}

/// Remainder of a mod b (b nonzero).
inline Poly rem(Poly a, const Poly& b, i64 p) {
  i64 inv = invmod(b.back(), p);
  while (int(a.size()) >= int(b.size()) && !a.empty()) {
    i64 c = narrow(i128(a.back()) * inv % p, "fp::rem");
    size_t off = a.size() - b.size();
    for (size_t i = 0; i < b.size(); ++i) a[off + i] = mod(a[off + i] - narrow(i128(c) * b[i] % p, "fp::rem"), p);
    a = trim(a);
  }
  return a;
}

inline Poly quot(Poly a, const Poly& b, i64 p) {
  Poly q(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, 0);
  i64 inv = invmod(b.back(), p);
  while (int(a.size()) >= int(b.size()) && !a.empty()) {
    i64 c = narrow(i128(a.back()) * inv % p, "fp::quot");
    size_t off = a.size() - b.size();
    q[off] = c;
    for (size_t i = 0; i < b.size(); ++i) a[off + i] = mod(a[off + i] - narrow(i128(c) * b[i] % p, "fp::quot"), p);
    a = trim(a);
  }
  return trim(q);
}

inline Poly gcd(Poly a, Poly b, i64 p) {
  while (!b.empty()) {
    Poly r = rem(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty() && a.back() != 1) {
    i64 inv = invmod(a.back(), p);
    for (auto& c : a) c = narrow(i128(c) * inv % p, "fp::gcd");
  }
  return a;
}

inline Poly derivative(const Poly& f, i64 p) {
  Poly d;
  for (size_t i = 1; i < f.size(); ++i) d.push_back(mod(i64(i) * f[i], p));
  return trim(d);
}

inline Poly powmod_poly(Poly base, i64 e, const Poly& m, i64 p) {
  Poly r = {1};
  base = rem(std::move(base), m, p);
  while (e) {
    if (e & 1) r = rem(mul(r, base, p), m, p);
    base = rem(mul(base, base, p), m, p);
    e >>= 1;
  }
  return r;
}

struct Factor {
  Poly poly;
  int mult;
};

/// Full factorization into monic irreducibles with multiplicities
/// (squarefree split, distinct degree, then Cantor-Zassenhaus).
std::vector<Factor> factor(const Poly& f, i64 p, std::uint64_t seed = 42);

/// True iff f is irreducible over F_p.
bool irreducible(const Poly& f, i64 p);

}  // namespace fp

}  // namespace circlelab
