#include "circlelab/polymod.hpp"

#include <stdexcept>

namespace circlelab::fp {

namespace {

Poly monic(Poly f, i64 p) {
  if (f.empty() || f.back() == 1) return f;
  i64 inv = invmod(f.back(), p);
  for (auto& c : f) c = narrow(i128(c) * inv % p, "fp::monic");
  return f;
}

// Splits a product of distinct irreducibles of equal degree d.
void equal_degree(const Poly& f, int d, i64 p, std::uint64_t& ctr, std::vector<Poly>& out) {
  if (deg(f) == d) {
    out.push_back(f);
    return;
  }
  if (p == 2) {
    // Trace-map splitting for characteristic 2.
    while (true) {
      Poly r(deg(f), 0);
      for (auto& c : r) c = i64(splitmix64(ctr++) & 1);
      r = trim(r);
      if (r.empty()) continue;
      Poly t = r;
      Poly acc = r;
      for (int i = 1; i < d; ++i) {
        acc = rem(mul(acc, acc, p), f, p);
        t = sub(t, sub({}, acc, p), p);  // t += acc
      }
      Poly g = gcd(f, t, p);
      if (!g.empty() && deg(g) > 0 && deg(g) < deg(f)) {
        equal_degree(g, d, p, ctr, out);
        equal_degree(quot(f, g, p), d, p, ctr, out);
        return;
      }
    }
  }
  while (true) {
    Poly r(deg(f), 0);
    for (auto& c : r) c = i64(splitmix64(ctr++) % std::uint64_t(p));
    r = trim(r);
    if (deg(r) < 1) continue;
    i64 pd = 1;
    for (int i = 0; i < d; ++i) pd = narrow(i128(pd) * p, "equal_degree");
    i64 e = (pd - 1) / 2;
    Poly g = gcd(f, sub(powmod_poly(r, e, f, p), {1}, p), p);
    if (!g.empty() && deg(g) > 0 && deg(g) < deg(f)) {
      equal_degree(g, d, p, ctr, out);
      equal_degree(quot(f, g, p), d, p, ctr, out);
      return;
    }
  }
}

}  // namespace

std::vector<Factor> factor(const Poly& f_in, i64 p, std::uint64_t seed) {
  Poly f = monic(trim(f_in), p);
  if (deg(f) < 1) throw std::invalid_argument("fp::factor: constant polynomial");
  std::vector<Factor> out;
  std::uint64_t ctr = seed;

  // Squarefree decomposition by repeated gcd with the derivative; handles
  // p-th power parts by exponent division.
  struct Item { Poly poly; int mult; };
  std::vector<Item> stack{{f, 1}};
  std::vector<Item> squarefree;
  while (!stack.empty()) {
    auto [g, m] = stack.back();
    stack.pop_back();
    Poly d = derivative(g, p);
    if (d.empty()) {
      // g is a p-th power: g(x) = h(x^p)
      Poly h((deg(g) / int(p)) + 1, 0);
      for (int i = 0; i <= deg(g); i += int(p)) h[i / int(p)] = g[i];
      stack.push_back({trim(h), m * int(p)});
      continue;
    }
    Poly c = gcd(g, d, p);
    Poly w = quot(g, c, p);
    int i = 1;
    while (deg(w) > 0) {
      Poly y = gcd(w, c, p);
      Poly z = quot(w, y, p);
      if (deg(z) > 0) squarefree.push_back({z, m * i});
      w = y;
      c = quot(c, y, p);
      ++i;
    }
    if (deg(c) > 0) stack.push_back({c, m});
  }

  for (auto& [sf, m] : squarefree) {
    // Distinct-degree split of the squarefree part.
    Poly g = sf;
    Poly xq = {0, 1};
    int d = 0;
    while (deg(g) > 0) {
      ++d;
      if (2 * d > deg(g)) {
        out.push_back({g, m});
        break;
      }
      xq = powmod_poly(xq, p, g, p);
      Poly diff = sub(xq, {0, 1}, p);
      Poly h = gcd(g, diff, p);
      if (deg(h) > 0) {
        std::vector<Poly> parts;
        equal_degree(h, d, p, ctr, parts);
        for (auto& q : parts) out.push_back({q, m});
        g = quot(g, h, p);
        xq = rem(xq, g, p);
      }
    }
  }
  return out;
}

bool irreducible(const Poly& f_in, i64 p) {
  Poly f = monic(trim(f_in), p);
  int n = deg(f);
  if (n < 1) return false;
  if (n == 1) return true;
  // f irreducible iff x^{p^n} = x mod f and gcd(x^{p^{n/q}} - x, f) = 1 for
  // prime divisors q of n.
  Poly xq = {0, 1};
  std::vector<Poly> powers(n + 1);
  powers[0] = xq;
  for (int i = 1; i <= n; ++i) {
    xq = powmod_poly(xq, p, f, p);
    powers[i] = xq;
  }
  if (!sub(powers[n], {0, 1}, p).empty()) return false;
  for (int q = 2; q <= n; ++q) {
    if (n % q != 0) continue;
    bool prime = true;
    for (int r = 2; r * r <= q; ++r)
      if (q % r == 0) prime = false;
    if (!prime) continue;
    Poly diff = sub(powers[n / q], {0, 1}, p);
    Poly g = gcd(f, diff, p);
    if (deg(g) > 0) return false;
  }
  return true;
}

}  // namespace circlelab::fp
