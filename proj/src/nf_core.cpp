#include "circlelab/nf_core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "circlelab/mpreal.hpp"
#include "circlelab/polymod.hpp"

namespace circlelab {

namespace {

constexpr i64 kKernelBudget = 40'000'000;

std::vector<i64> lift_centered(const fp::Poly& g, i64 /*p*/) {
  return std::vector<i64>(g.begin(), g.end());
}

// Exact integer polynomial product.
std::vector<i64> zmul(const std::vector<i64>& a, const std::vector<i64>& b) {
  if (a.empty() || b.empty()) return {};
  std::vector<i64> r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = narrow(i128(r[i + j]) + i128(a[i]) * b[j], "zmul");
  return r;
}

// Trial division of monic integer polynomials; returns quotient if exact.
std::optional<std::vector<i64>> zdiv_exact(std::vector<i64> f, const std::vector<i64>& g) {
  if (g.empty() || g.back() != 1) return std::nullopt;
  if (f.size() < g.size()) return std::nullopt;
  std::vector<i64> q(f.size() - g.size() + 1, 0);
  for (int i = int(q.size()) - 1; i >= 0; --i) {
    i64 c = f[i + g.size() - 1];
    q[i] = c;
    if (c != 0)
      for (size_t j = 0; j < g.size(); ++j)
        f[i + j] = narrow(i128(f[i + j]) - i128(c) * g[j], "zdiv");
  }
  for (size_t j = 0; j + 1 < g.size(); ++j)
    if (f[j] != 0) return std::nullopt;
  return q;
}

std::string poly_str(const std::vector<i64>& c) {
  std::string s;
  for (int i = int(c.size()) - 1; i >= 0; --i) {
    if (c[i] == 0) continue;
    if (!s.empty()) s += c[i] > 0 ? " + " : " - ";
    else if (c[i] < 0) s += "-";
    i64 a = std::llabs(c[i]);
    if (a != 1 || i == 0) s += std::to_string(a);
    if (i >= 1) s += "x";
    if (i >= 2) s += "^" + std::to_string(i);
  }
  return s.empty() ? "0" : s;
}

// Searches for a rational (necessarily integer) root of a monic polynomial.
std::optional<i64> integer_root(const std::vector<i64>& f) {
  if (f[0] == 0) return 0;
  auto eval = [&](i64 x) {
    i128 acc = 0;
    for (int i = int(f.size()) - 1; i >= 0; --i) acc = acc * x + f[i];
    return acc;
  };
  i64 c0 = std::llabs(f[0]);
  for (i64 d = 1; d * d <= c0; ++d) {
    if (c0 % d != 0) continue;
    for (i64 r : {d, -d, c0 / d, -(c0 / d)})
      if (eval(r) == 0) return r;
  }
  return std::nullopt;
}

// Rejects reducible monic polynomials, reporting a factor when one exists.
// Certificates: irreducibility mod p, complete root/quadratic-factor search
// for degree <= 4.
void check_irreducible(const std::vector<i64>& f, int prime_bound) {
  int n = int(f.size()) - 1;
  if (n == 1) return;
  if (auto r = integer_root(f))
    throw std::invalid_argument("reducible polynomial; factor x - (" + std::to_string(*r) + ")");
  for (i64 p = 2; p <= prime_bound; ++p) {
    bool is_p = true;
    for (i64 d = 2; d * d <= p; ++d)
      if (p % d == 0) is_p = false;
    if (!is_p) continue;
    if (fp::irreducible(fp::reduce(f, p), p)) return;
  }
  if (n <= 3) return;  // no root and degree <= 3: irreducible
  if (n == 4) {
    i64 bound = 4;
    for (i64 c : f) bound = std::max(bound, 4 * std::llabs(c));
    for (i64 u = -bound; u <= bound; ++u)
      for (i64 v = -bound; v <= bound; ++v) {
        if (v == 0) continue;
        if (zdiv_exact(f, {v, u, 1}))
          throw std::invalid_argument("reducible polynomial; factor " + poly_str({v, u, 1}));
      }
    return;
  }
  throw std::invalid_argument(
      "could not certify irreducibility at desk scale (no irreducible reduction mod p <= " +
      std::to_string(prime_bound) + "); supply a field of degree <= 4 or a different polynomial");
}

void build_derived(NumberField& K) {
  int n = K.n;
  // Basis traces and the trace matrix from multiplication matrices: exact.
  K.basis_traces.assign(n, Rat(0));
  for (int k = 0; k < n; ++k) {
    Elem wk(n);
    wk.c[k] = Rat(1);
    K.basis_traces[k] = mul_matrix(K, wk).trace();
  }
  K.trace_matrix = RatMat(n, n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) {
      Rat t;
      for (int m = 0; m < n; ++m) t += K.mult[l][k][m] * K.basis_traces[m];
      K.trace_matrix(l, k) = t;
    }
  Rat d = K.trace_matrix.det();
  if (d.is_zero()) throw std::invalid_argument("degenerate trace form");
  if (!d.is_integer()) throw std::invalid_argument("trace matrix is not integral");
  K.disc_n = d.num();
  K.trace_matrix_inv = K.trace_matrix.inverse();

  K.mult_d.assign(size_t(n) * n * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      for (int m = 0; m < n; ++m) K.mult_d[(size_t(k) * n + l) * n + m] = K.mult[k][l][m].to_double();
}

void check_table_consistency(const NumberField& K) {
  int n = K.n;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      if (K.mult[k][l] != K.mult[l][k]) throw std::invalid_argument("multiplication table is not commutative");
  // Associativity on all basis triples.
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        Elem ea(n), eb(n), ec(n);
        ea.c[a] = Rat(1);
        eb.c[b] = Rat(1);
        ec.c[c] = Rat(1);
        Elem lhs = element_mul(K, element_mul(K, ea, eb), ec);
        Elem rhs = element_mul(K, ea, element_mul(K, eb, ec));
        if (!(lhs == rhs)) throw std::invalid_argument("multiplication table is not associative");
      }
}

}  // namespace

bool IdealLattice::contains(const Elem& e) const {
  if (!e.is_integral()) return false;
  ZVec v(e.n());
  for (int i = 0; i < e.n(); ++i) v[i] = e.c[i].num();
  return hnf_contains(hnf, v);
}

NumberField field_from_poly(const std::vector<i64>& min_poly, const FieldOptions& opt) {
  if (min_poly.size() < 2) throw std::invalid_argument("minimal polynomial must have degree >= 1");
  if (min_poly.back() != 1) throw std::invalid_argument("minimal polynomial must be monic");
  check_irreducible(min_poly, opt.irreducibility_prime_bound);

  NumberField K;
  K.n = int(min_poly.size()) - 1;
  K.min_poly = min_poly;
  K.monogenic = true;
  K.ideal_is_ring = true;
  K.emb_extra_bits = opt.emb_extra_bits;
  int n = K.n;

  // Coordinates of theta^m for m <= 2n-2 via the monic recurrence.
  std::vector<std::vector<Rat>> pow(std::max(1, 2 * n - 1), std::vector<Rat>(n));
  for (int m = 0; m < n; ++m) pow[m][m] = Rat(1);
  for (int m = n; m <= 2 * n - 2; ++m) {
    // theta^m = theta * theta^{m-1}, then reduce theta^n -> -sum c_i theta^i.
    std::vector<Rat> shifted(n + 1);
    for (int i = 0; i < n; ++i) shifted[i + 1] = pow[m - 1][i];
    std::vector<Rat> red(n);
    for (int i = 0; i < n; ++i) red[i] = shifted[i];
    if (!shifted[n].is_zero())
      for (int i = 0; i < n; ++i) red[i] -= shifted[n] * Rat(min_poly[i]);
    pow[m] = red;
  }

  K.mult.assign(n, std::vector<std::vector<Rat>>(n));
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) K.mult[k][l] = pow[k + l];

  K.one_coords.assign(n, Rat(0));
  K.one_coords[0] = Rat(1);

  build_derived(K);

  // Embeddings: roots of the minimal polynomial at extended precision,
  // ordered deterministically; omega_k = theta^k.
  mpfr_prec_t prec = 53 + opt.emb_extra_bits;
  auto [roots, resid] = poly_roots_mp(min_poly, prec);
  std::vector<std::complex<double>> rd(n);
  std::vector<int> order(n);
  for (int v = 0; v < n; ++v) {
    rd[v] = roots[v].to_std();
    order[v] = v;
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (rd[a].real() != rd[b].real()) return rd[a].real() < rd[b].real();
    return rd[a].imag() < rd[b].imag();
  });
  K.emb.assign(n, std::vector<std::complex<double>>(n));
  // Power-sum agreement against the exact traces, measured at full precision.
  double trace_defect = 0.0;
  for (int m = 0; m < n; ++m) {
    MpComplex sum(prec);
    for (int v = 0; v < n; ++v) {
      MpComplex pw(MpReal::from_i64(1, prec), MpReal::from_i64(0, prec));
      for (int t = 0; t < m; ++t) pw = pw * roots[order[v]];
      if (m == 1) pw = roots[order[v]];
      sum = sum + pw;
      K.emb[v][m] = pw.to_std();
      if (m == 0) K.emb[v][m] = {1.0, 0.0};
    }
    double exact = K.basis_traces[m].to_double();
    trace_defect = std::max(trace_defect, std::abs(sum.to_std() - std::complex<double>(exact, 0.0)));
  }
  K.emb_residual = std::max(resid, trace_defect);
  return K;
}

NumberField field_from_tables(int n, const std::vector<std::vector<std::vector<Rat>>>& mult,
                              const FieldOptions& opt) {
  NumberField K;
  K.n = n;
  K.mult = mult;
  K.monogenic = false;
  K.ideal_is_ring = true;
  K.emb_extra_bits = opt.emb_extra_bits;
  if (int(mult.size()) != n) throw std::invalid_argument("multiplication table size mismatch");
  for (auto& row : mult) {
    if (int(row.size()) != n) throw std::invalid_argument("multiplication table size mismatch");
    for (auto& cell : row)
      if (int(cell.size()) != n) throw std::invalid_argument("multiplication table size mismatch");
  }

  // Identity element: solve sum_k e_k (omega_k omega_j) = omega_j for all j.
  RatMat A(n * n, n);
  std::vector<Rat> rhs(size_t(n) * n);
  for (int j = 0; j < n; ++j)
    for (int m = 0; m < n; ++m) {
      for (int k = 0; k < n; ++k) A(j * n + m, k) = mult[k][j][m];
      rhs[size_t(j) * n + m] = (j == m) ? Rat(1) : Rat(0);
    }
  // Least-squares-free exact solve: Gaussian elimination on the stacked system.
  {
    int rows = n * n, cols = n, rank = 0;
    std::vector<int> pivot_col;
    K.one_coords.assign(n, Rat(0));
    RatMat M = A;
    std::vector<Rat> b = rhs;
    for (int col = 0; col < cols && rank < rows; ++col) {
      int piv = -1;
      for (int i = rank; i < rows; ++i)
        if (!M(i, col).is_zero()) { piv = i; break; }
      if (piv < 0) continue;
      for (int j = 0; j < cols; ++j) std::swap(M(piv, j), M(rank, j));
      std::swap(b[piv], b[rank]);
      Rat s = Rat(1) / M(rank, col);
      for (int j = 0; j < cols; ++j) M(rank, j) *= s;
      b[rank] *= s;
      for (int i = 0; i < rows; ++i) {
        if (i == rank || M(i, col).is_zero()) continue;
        Rat f = M(i, col);
        for (int j = 0; j < cols; ++j) M(i, j) -= f * M(rank, j);
        b[i] -= f * b[rank];
      }
      pivot_col.push_back(col);
      ++rank;
    }
    if (rank != n) throw std::invalid_argument("multiplication table admits no identity element");
    for (int i = 0; i < rank; ++i) K.one_coords[pivot_col[i]] = b[i];
    for (int i = rank; i < rows; ++i)
      if (!b[i].is_zero()) throw std::invalid_argument("multiplication table admits no identity element");
  }

  build_derived(K);
  check_table_consistency(K);

  // Embeddings through a generating element: left eigenvectors of its
  // multiplication matrix, normalized so the image of 1 is 1.
  for (int attempt = 0; attempt < 8; ++attempt) {
    Elem g(n);
    for (int k = 0; k < n; ++k) g.c[k] = Rat(1 + attempt * (k + 1) + k * k);
    RatMat Mg = mul_matrix(K, g);
    auto cp = char_poly(Mg);
    // Need n distinct eigenvalues; test squarefreeness via gcd with derivative.
    std::vector<Rat> cpd(cp.size() > 1 ? cp.size() - 1 : 0);
    for (size_t i = 1; i < cp.size(); ++i) cpd[i - 1] = cp[i] * Rat(i64(i));
    mpfr_prec_t prec = 53 + opt.emb_extra_bits;
    std::vector<i64> cpz(cp.size());
    i64 den = 1;
    for (auto& c : cp) den = lcm64(den, c.den());
    bool fits = true;
    for (size_t i = 0; i < cp.size(); ++i) {
      Rat scaled = cp[i] * Rat(den);
      if (!scaled.is_integer()) { fits = false; break; }
      cpz[i] = scaled.num();
    }
    if (!fits || den != 1) continue;  // scale-free only: generating elements are integral here
    std::vector<MpComplex> roots;
    double resid;
    try {
      std::tie(roots, resid) = poly_roots_mp(cpz, prec);
    } catch (const std::exception&) {
      continue;
    }
    // Distinctness check.
    bool distinct = true;
    for (int a = 0; a < n && distinct; ++a)
      for (int b = a + 1; b < n; ++b) {
        auto d = roots[a].to_std() - roots[b].to_std();
        if (std::abs(d) < 1e-9) { distinct = false; break; }
      }
    if (!distinct) continue;

    K.emb.assign(n, std::vector<std::complex<double>>(n));
    bool ok = true;
    for (int v = 0; v < n && ok; ++v) {
      // Null vector of (Mg^T - lambda I) in complex doubles.
      std::complex<double> lam = roots[v].to_std();
      std::vector<std::complex<double>> m(size_t(n) * n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[size_t(i) * n + j] = Mg(j, i).to_double() - (i == j ? lam : 0.0);
      std::vector<int> perm(n);
      for (int i = 0; i < n; ++i) perm[i] = i;
      int rank = 0;
      for (int col = 0; col < n && rank < n; ++col) {
        int piv = -1;
        double best = 1e-9;
        for (int i = rank; i < n; ++i)
          if (std::abs(m[size_t(i) * n + col]) > best) { best = std::abs(m[size_t(i) * n + col]); piv = i; }
        if (piv < 0) continue;
        for (int j = 0; j < n; ++j) std::swap(m[size_t(piv) * n + j], m[size_t(rank) * n + j]);
        auto inv = 1.0 / m[size_t(rank) * n + col];
        for (int j = 0; j < n; ++j) m[size_t(rank) * n + j] *= inv;
        for (int i = 0; i < n; ++i) {
          if (i == rank) continue;
          auto f = m[size_t(i) * n + col];
          if (std::abs(f) == 0.0) continue;
          for (int j = 0; j < n; ++j) m[size_t(i) * n + j] -= f * m[size_t(rank) * n + j];
        }
        perm[rank] = col;
        ++rank;
      }
      if (rank != n - 1) { ok = false; break; }
      // Free column: the one not among pivots.
      std::vector<bool> is_piv(n, false);
      for (int i = 0; i < rank; ++i) is_piv[perm[i]] = true;
      int free_col = 0;
      while (free_col < n && is_piv[free_col]) ++free_col;
      std::vector<std::complex<double>> ell(n, 0.0);
      ell[free_col] = 1.0;
      for (int i = 0; i < rank; ++i) ell[perm[i]] = -m[size_t(i) * n + free_col];
      std::complex<double> at_one = 0.0;
      for (int k = 0; k < n; ++k) at_one += ell[k] * K.one_coords[k].to_double();
      if (std::abs(at_one) < 1e-12) { ok = false; break; }
      for (int k = 0; k < n; ++k) K.emb[v][k] = ell[k] / at_one;
    }
    if (!ok) continue;
    std::sort(K.emb.begin(), K.emb.end(), [](const auto& a, const auto& b) {
      for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
        if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
      }
      return false;
    });
    double defect = 0.0;
    for (int k = 0; k < n; ++k) {
      std::complex<double> s = 0.0;
      for (int v = 0; v < n; ++v) s += K.emb[v][k];
      defect = std::max(defect, std::abs(s - std::complex<double>(K.basis_traces[k].to_double(), 0)));
    }
    K.emb_residual = std::max(resid, defect);
    return K;
  }
  throw std::invalid_argument("could not derive embeddings from the multiplication table");
}

Elem add(const Elem& a, const Elem& b) {
  Elem r(a.n());
  for (int i = 0; i < a.n(); ++i) r.c[i] = a.c[i] + b.c[i];
  return r;
}
Elem sub(const Elem& a, const Elem& b) {
  Elem r(a.n());
  for (int i = 0; i < a.n(); ++i) r.c[i] = a.c[i] - b.c[i];
  return r;
}
Elem neg(const Elem& a) {
  Elem r(a.n());
  for (int i = 0; i < a.n(); ++i) r.c[i] = -a.c[i];
  return r;
}
Elem scale(const Rat& s, const Elem& a) {
  Elem r(a.n());
  for (int i = 0; i < a.n(); ++i) r.c[i] = s * a.c[i];
  return r;
}

Elem element_mul(const NumberField& K, const Elem& a, const Elem& b) {
  if (a.n() != K.n || b.n() != K.n) throw std::invalid_argument("element coordinate length mismatch");
  Elem r(K.n);
  for (int k = 0; k < K.n; ++k) {
    if (a.c[k].is_zero()) continue;
    for (int l = 0; l < K.n; ++l) {
      if (b.c[l].is_zero()) continue;
      Rat f = a.c[k] * b.c[l];
      const auto& w = K.mult[k][l];
      for (int m = 0; m < K.n; ++m)
        if (!w[m].is_zero()) r.c[m] += f * w[m];
    }
  }
  return r;
}

Elem element_pow(const NumberField& K, const Elem& a, int e) {
  Elem r = K.one();
  Elem b = a;
  while (e > 0) {
    if (e & 1) r = element_mul(K, r, b);
    e >>= 1;
    if (e) b = element_mul(K, b, b);
  }
  return r;
}

Elem element_inv(const NumberField& K, const Elem& a) {
  if (a.is_zero()) throw std::domain_error("inverse of zero");
  RatMat inv = mul_matrix(K, a).inverse();
  return Elem(inv.apply(K.one_coords));
}

RatMat mul_matrix(const NumberField& K, const Elem& a) {
  RatMat m(K.n, K.n);
  for (int k = 0; k < K.n; ++k) {
    Elem wk(K.n);
    wk.c[k] = Rat(1);
    Elem col = element_mul(K, a, wk);
    for (int i = 0; i < K.n; ++i) m(i, k) = col.c[i];
  }
  return m;
}

Rat trace(const NumberField& K, const Elem& a) {
  Rat t;
  for (int k = 0; k < K.n; ++k) t += a.c[k] * K.basis_traces[k];
  return t;
}

Rat norm(const NumberField& K, const Elem& a) { return mul_matrix(K, a).det(); }

Rat house(const Elem& a) {
  Rat h;
  for (auto& x : a.c) h = std::max(h, x.abs());
  return h;
}

std::complex<double> character(const NumberField& K, const Elem& a) {
  Rat t = trace(K, a).mod1();
  double ang = 2.0 * std::numbers::pi * t.to_double();
  return {std::cos(ang), std::sin(ang)};
}

TraceNorm trace_norm(const NumberField& K, const Elem& a) {
  return {trace(K, a), norm(K, a), house(a), character(K, a)};
}

IdealLattice unit_ideal(const NumberField& K) {
  IdealLattice l;
  l.hnf.assign(K.n, ZVec(K.n, 0));
  for (int i = 0; i < K.n; ++i) l.hnf[i][i] = 1;
  l.norm = 1;
  return l;
}

namespace {

// Sublattice {b in Z^n : A_c b = 0 mod L for all c}, via kernel enumeration
// modulo L. L^n stays tiny at the scales this library targets.
IdealLattice kernel_lattice(int n, i64 L, const std::vector<std::vector<ZVec>>& mats) {
  if (L == 1) {
    IdealLattice l;
    l.hnf.assign(n, ZVec(n, 0));
    for (int i = 0; i < n; ++i) l.hnf[i][i] = 1;
    l.norm = 1;
    return l;
  }
  double total = std::pow(double(L), n);
  if (total > double(kKernelBudget))
    throw std::runtime_error("denominator-ideal kernel enumeration over budget (L=" + std::to_string(L) + ")");
  std::vector<ZVec> gens;
  ZVec b(n, 0);
  while (true) {
    bool in_kernel = true;
    for (const auto& A : mats) {
      for (int i = 0; i < n && in_kernel; ++i) {
        i128 acc = 0;
        for (int j = 0; j < n; ++j) acc += i128(A[i][j]) * b[j];
        if (acc % L != 0) in_kernel = false;
      }
      if (!in_kernel) break;
    }
    if (in_kernel) {
      bool zero = std::all_of(b.begin(), b.end(), [](i64 x) { return x == 0; });
      if (!zero) gens.push_back(b);
    }
    int j = n - 1;
    while (j >= 0) {
      if (++b[j] < L) break;
      b[j] = 0;
      --j;
    }
    if (j < 0) break;
  }
  for (int i = 0; i < n; ++i) {
    ZVec e(n, 0);
    e[i] = L;
    gens.push_back(e);
  }
  IdealLattice l;
  l.hnf = hnf_rows(std::move(gens), n);
  l.norm = hnf_det(l.hnf);
  return l;
}

}  // namespace

IdealLattice denominator_ideal(const NumberField& K, std::span<const Elem> gamma) {
  int n = K.n;
  i64 L = 1;
  std::vector<std::vector<ZVec>> mats;
  std::vector<RatMat> rat_mats;
  rat_mats.reserve(gamma.size());
  for (const auto& g : gamma) {
    RatMat M = mul_matrix(K, g);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) L = lcm64(L, M(i, j).den());
    rat_mats.push_back(std::move(M));
  }
  for (const auto& M : rat_mats) {
    std::vector<ZVec> A(n, ZVec(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Rat scaled = M(i, j) * Rat(L);
        A[i][j] = scaled.num();  // integral by construction of L
      }
    mats.push_back(std::move(A));
  }
  return kernel_lattice(n, L, mats);
}

IdealLattice ideal_mul(const NumberField& K, const IdealLattice& a, const IdealLattice& b) {
  if (!K.ideal_is_ring) throw std::runtime_error("ideal arithmetic requires the basis to span the ring");
  std::vector<ZVec> gens;
  for (const auto& ra : a.hnf)
    for (const auto& rb : b.hnf) {
      Elem ea = K.from_ints(ra), eb = K.from_ints(rb);
      Elem prod = element_mul(K, ea, eb);
      ZVec v(K.n);
      for (int i = 0; i < K.n; ++i) {
        if (!prod.c[i].is_integer()) throw std::runtime_error("ideal product left the lattice");
        v[i] = prod.c[i].num();
      }
      gens.push_back(std::move(v));
    }
  IdealLattice l;
  l.hnf = hnf_rows(std::move(gens), K.n);
  l.norm = hnf_det(l.hnf);
  return l;
}

IdealLattice ideal_pow(const NumberField& K, const IdealLattice& a, int e) {
  IdealLattice r = unit_ideal(K);
  for (int i = 0; i < e; ++i) r = ideal_mul(K, r, a);
  return r;
}

std::vector<PrimeIdeal> primes_above(const NumberField& K, i64 p) {
  if (!K.monogenic)
    throw std::runtime_error("prime splitting requires a power-basis field");
  auto fac = fp::factor(fp::reduce(K.min_poly, p), p);

  // Dedekind's criterion: reject p when the power basis is not maximal at p.
  {
    fp::Poly g_star = {1};
    for (auto& [g, m] : fac) g_star = fp::mul(g_star, g, p);
    fp::Poly f_bar = fp::reduce(K.min_poly, p);
    fp::Poly h_star = fp::quot(f_bar, g_star, p);
    std::vector<i64> gh = zmul(lift_centered(g_star, p), lift_centered(h_star, p));
    std::vector<i64> F(std::max(gh.size(), K.min_poly.size()), 0);
    for (size_t i = 0; i < gh.size(); ++i) F[i] += gh[i];
    for (size_t i = 0; i < K.min_poly.size(); ++i) F[i] -= K.min_poly[i];
    for (auto& c : F) {
      if (c % p != 0) throw std::logic_error("Dedekind lift failed");
      c /= p;
    }
    fp::Poly Fb = fp::reduce(F, p);
    fp::Poly g1 = fp::gcd(Fb, g_star, p);
    fp::Poly g2 = fp::gcd(g1, h_star, p);
    if (fp::deg(g2) > 0)
      throw std::runtime_error("unsupported prime " + std::to_string(p) +
                               ": it divides the index of the power basis in the maximal order");
  }

  std::vector<PrimeIdeal> out;
  int n = K.n;
  for (auto& [g, mult] : fac) {
    PrimeIdeal pi;
    pi.p = p;
    pi.e = mult;
    pi.f = fp::deg(g);
    std::vector<ZVec> gens;
    for (int k = 0; k < n; ++k) {
      ZVec row(n, 0);
      row[k] = p;
      gens.push_back(row);
    }
    // g(theta) * omega_k for all k.
    Elem gt(n);
    {
      // Evaluate g at theta through the power coordinates (deg g <= n).
      Elem theta(n);
      if (n > 1) theta.c[1] = Rat(1);
      else theta.c[0] = Rat(-K.min_poly[0]);
      Elem acc = K.zero();
      for (int i = fp::deg(g); i >= 0; --i) {
        acc = element_mul(K, acc, theta);
        acc.c[0] += Rat(g[i]);
      }
      gt = acc;
    }
    for (int k = 0; k < n; ++k) {
      Elem wk(n);
      wk.c[k] = Rat(1);
      Elem prod = element_mul(K, gt, wk);
      ZVec v(n);
      for (int i = 0; i < n; ++i) v[i] = prod.c[i].num();
      gens.push_back(std::move(v));
    }
    pi.lat.hnf = hnf_rows(std::move(gens), n);
    pi.lat.norm = hnf_det(pi.lat.hnf);
    i64 expect = 1;
    for (int i = 0; i < pi.f; ++i) expect = narrow(i128(expect) * p, "primes_above");
    if (pi.lat.norm != expect) throw std::logic_error("prime ideal norm mismatch");
    out.push_back(std::move(pi));
  }
  int efsum = 0;
  for (auto& pi : out) efsum += pi.e * pi.f;
  if (efsum != n) throw std::logic_error("sum e_i f_i != n");
  std::sort(out.begin(), out.end(), [](const PrimeIdeal& a, const PrimeIdeal& b) {
    return a.lat.hnf < b.lat.hnf;
  });
  return out;
}

std::vector<IdealFactorization> ideals_up_to(const NumberField& K, i64 bound) {
  std::vector<PrimeIdeal> primes;
  for (i64 p = 2; p <= bound; ++p) {
    bool is_p = true;
    for (i64 d = 2; d * d <= p; ++d)
      if (p % d == 0) is_p = false;
    if (!is_p) continue;
    for (auto& pi : primes_above(K, p))
      if (pi.lat.norm <= bound) primes.push_back(pi);
  }
  std::vector<IdealFactorization> out;
  IdealFactorization unit;
  unit.lat = unit_ideal(K);
  unit.norm = 1;
  out.push_back(unit);
  // Depth-first products over the prime list with a norm budget.
  std::function<void(size_t, IdealFactorization)> rec = [&](size_t idx, IdealFactorization cur) {
    for (size_t i = idx; i < primes.size(); ++i) {
      if (i128(cur.norm) * primes[i].lat.norm > bound) continue;
      IdealFactorization next = cur;
      next.lat = ideal_mul(K, next.lat, primes[i].lat);
      next.norm = narrow(i128(next.norm) * primes[i].lat.norm, "ideals_up_to");
      next.factors.emplace_back(primes[i], 1);
      while (true) {
        out.push_back(next);
        rec(i + 1, next);
        if (i128(next.norm) * primes[i].lat.norm > bound) break;
        next.lat = ideal_mul(K, next.lat, primes[i].lat);
        next.norm = narrow(i128(next.norm) * primes[i].lat.norm, "ideals_up_to");
        next.factors.back().second += 1;
      }
    }
  };
  rec(0, unit);
  std::sort(out.begin(), out.end(), [](const IdealFactorization& a, const IdealFactorization& b) {
    if (a.norm != b.norm) return a.norm < b.norm;
    return a.lat.hnf < b.lat.hnf;
  });
  return out;
}

std::vector<Elem> residue_system(const NumberField& K, const IdealLattice& a, ResidueMode mode) {
  int n = K.n;
  if (mode == ResidueMode::quotient_of_n) {
    auto cosets = hnf_cosets(a.hnf);
    std::vector<Elem> out;
    out.reserve(cosets.size());
    for (auto& c : cosets) out.push_back(K.from_ints(c));
    return out;
  }
  // fractional_in_R: points of n a^{-1} / n inside [0,1)^n. Solve for
  // Y in [0,N)^n with M_r Y = 0 mod N for every basis row r of a.
  i64 N = a.norm;
  if (N == 1) return {K.zero()};
  double total = std::pow(double(N), n);
  if (total > double(kKernelBudget))
    throw std::runtime_error("fractional residue enumeration over budget (norm=" + std::to_string(N) + ")");
  std::vector<std::vector<ZVec>> mats;
  for (const auto& r : a.hnf) {
    RatMat M = mul_matrix(K, K.from_ints(r));
    std::vector<ZVec> A(n, ZVec(n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        Rat e = M(i, j);
        if (!e.is_integer()) throw std::runtime_error("fractional residues need an integral multiplication table");
        A[i][j] = e.num();
      }
    mats.push_back(std::move(A));
  }
  std::vector<Elem> out;
  ZVec Y(n, 0);
  while (true) {
    bool ok = true;
    for (const auto& A : mats) {
      for (int i = 0; i < n && ok; ++i) {
        i128 acc = 0;
        for (int j = 0; j < n; ++j) acc += i128(A[i][j]) * Y[j];
        if (acc % N != 0) ok = false;
      }
      if (!ok) break;
    }
    if (ok) {
      Elem e(n);
      for (int i = 0; i < n; ++i) e.c[i] = Rat(Y[i], N);
      out.push_back(std::move(e));
    }
    int j = n - 1;
    while (j >= 0) {
      if (++Y[j] < N) break;
      Y[j] = 0;
      --j;
    }
    if (j < 0) break;
  }
  if (i64(out.size()) != N) throw std::logic_error("fractional residue count mismatch");
  return out;
}

std::vector<double> vmul(const NumberField& K, std::span<const double> a, std::span<const double> b) {
  int n = K.n;
  std::vector<double> r(n, 0.0);
  for (int k = 0; k < n; ++k) {
    if (a[k] == 0.0) continue;
    for (int l = 0; l < n; ++l) {
      if (b[l] == 0.0) continue;
      double f = a[k] * b[l];
      const double* w = &K.mult_d[(size_t(k) * n + l) * n];
      for (int m = 0; m < n; ++m) r[m] += f * w[m];
    }
  }
  return r;
}

}  // namespace circlelab
