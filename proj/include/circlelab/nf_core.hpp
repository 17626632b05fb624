#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "circlelab/lattice.hpp"
#include "circlelab/linalg.hpp"
#include "circlelab/rational.hpp"

namespace circlelab {

/// Element of K (or of V = K (x) R with rational coordinates) written in the
/// fixed Z-basis omega_1..omega_n of the reference lattice n.
struct Elem {
  std::vector<Rat> c;

  Elem() = default;
  explicit Elem(int n) : c(n) {}
  explicit Elem(std::vector<Rat> v) : c(std::move(v)) {}
  int n() const { return int(c.size()); }
  bool is_zero() const {
    for (auto& x : c)
      if (!x.is_zero()) return false;
    return true;
  }
  bool is_integral() const {
    for (auto& x : c)
      if (!x.is_integer()) return false;
    return true;
  }
  bool operator==(const Elem& o) const { return c == o.c; }
};

/// Integral lattice a*n inside n = Z^n (omega coordinates), in row HNF.
/// For the default n = O_K this is just the ideal itself.
struct IdealLattice {
  std::vector<ZVec> hnf;
  i64 norm = 1;

  bool operator==(const IdealLattice& o) const { return hnf == o.hnf; }
  bool contains(const Elem& e) const;
};

struct PrimeIdeal {
  IdealLattice lat;
  i64 p = 0;
  int e = 1;  // ramification index
  int f = 1;  // residue degree
};

struct NumberField {
  int n = 1;
  std::vector<i64> min_poly;  // monic, ascending coefficients
  // mult[k][l] = omega coordinates of omega_k * omega_l
  std::vector<std::vector<std::vector<Rat>>> mult;
  std::vector<Rat> basis_traces;  // Tr(omega_k)
  RatMat trace_matrix;            // (Tr(omega_l omega_k))_{l,k}
  RatMat trace_matrix_inv;
  i64 disc_n = 0;  // det of the trace matrix
  std::vector<Rat> one_coords;
  bool monogenic = true;
  bool ideal_is_ring = true;  // the basis omega spans O_K itself

  // Archimedean embeddings: emb[v][k] = sigma_v(omega_k), refined at
  // 53 + emb_extra_bits bits; emb_residual is the measured defect.
  std::vector<std::vector<std::complex<double>>> emb;
  int emb_extra_bits = 64;
  double emb_residual = 0.0;

  std::vector<double> mult_d;  // mult tensor as doubles, flattened n*n*n

  Elem zero() const { return Elem(n); }
  Elem one() const { return Elem(one_coords); }
  Elem from_ints(std::span<const i64> v) const {
    Elem e(n);
    for (int i = 0; i < n; ++i) e.c[i] = Rat(v[i]);
    return e;
  }
};

struct TraceNorm {
  Rat trace;
  Rat norm;
  Rat house;  // max |coordinate|
  std::complex<double> character;
};

struct FieldOptions {
  int emb_extra_bits = 64;
  int irreducibility_prime_bound = 200;
};

/// Builds K = Q[x]/(min_poly) on the power basis of Z[theta], with n = O_K.
NumberField field_from_poly(const std::vector<i64>& min_poly, const FieldOptions& opt = {});

/// Builds a field from an explicit basis multiplication table (for rings that
/// are not given by a power basis). mult[k][l][m] in row-major order.
NumberField field_from_tables(int n, const std::vector<std::vector<std::vector<Rat>>>& mult,
                              const FieldOptions& opt = {});

Elem add(const Elem& a, const Elem& b);
Elem sub(const Elem& a, const Elem& b);
Elem neg(const Elem& a);
Elem scale(const Rat& s, const Elem& a);
Elem element_mul(const NumberField& K, const Elem& a, const Elem& b);
Elem element_pow(const NumberField& K, const Elem& a, int e);
Elem element_inv(const NumberField& K, const Elem& a);

/// Matrix of multiplication by a on omega coordinates.
RatMat mul_matrix(const NumberField& K, const Elem& a);

Rat trace(const NumberField& K, const Elem& a);
Rat norm(const NumberField& K, const Elem& a);
Rat house(const Elem& a);
TraceNorm trace_norm(const NumberField& K, const Elem& a);

/// e(Tr(a)) from the exact rational trace.
std::complex<double> character(const NumberField& K, const Elem& a);

/// Denominator ideal of a tuple: {beta in O_K : beta*gamma_c in n for all c},
/// returned scaled to n. Exact; kernel extracted modulo the coordinate lcm.
IdealLattice denominator_ideal(const NumberField& K, std::span<const Elem> gamma);

IdealLattice unit_ideal(const NumberField& K);
IdealLattice ideal_mul(const NumberField& K, const IdealLattice& a, const IdealLattice& b);
IdealLattice ideal_pow(const NumberField& K, const IdealLattice& a, int e);

/// Splitting of a rational prime through the factorization of min_poly mod p.
/// Rejects primes where the power basis is not maximal (index divisors).
std::vector<PrimeIdeal> primes_above(const NumberField& K, i64 p);

struct IdealFactorization {
  IdealLattice lat;
  i64 norm = 1;
  std::vector<std::pair<PrimeIdeal, int>> factors;  // (prime, exponent)
};

/// All integral ideals of norm <= bound, each with its prime factorization,
/// sorted by (norm, basis). Needs the power basis for prime splitting.
std::vector<IdealFactorization> ideals_up_to(const NumberField& K, i64 bound);

enum class ResidueMode { quotient_of_n, fractional_in_R };

/// quotient_of_n: representatives of n / (a*n), integral coordinates.
/// fractional_in_R: the norm(a) points of n a^{-1}/n inside [0,1)^n.
std::vector<Elem> residue_system(const NumberField& K, const IdealLattice& a, ResidueMode mode);

/// Elements of K as a real vector space: double coordinates. Used by the
/// analytic layer; multiplication reuses the exact table.
std::vector<double> vmul(const NumberField& K, std::span<const double> a, std::span<const double> b);

}  // namespace circlelab
