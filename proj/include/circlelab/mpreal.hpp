#pragma once

#include <mpfr.h>

#include <complex>
#include <utility>
#include <vector>

#include "circlelab/rational.hpp"

namespace circlelab {

/// Thin RAII wrapper over an mpfr_t at a fixed precision. Only the operations
/// the embedding code needs.
class MpReal {
 public:
  explicit MpReal(mpfr_prec_t prec = 128) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  MpReal(const MpReal& o) { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_set(v_, o.v_, MPFR_RNDN); }
  MpReal(MpReal&& o) noexcept { mpfr_init2(v_, mpfr_get_prec(o.v_)); mpfr_swap(v_, o.v_); }
  MpReal& operator=(MpReal o) { mpfr_swap(v_, o.v_); return *this; }
  ~MpReal() { mpfr_clear(v_); }

  static MpReal from_double(double x, mpfr_prec_t prec) {
    MpReal r(prec);
    mpfr_set_d(r.v_, x, MPFR_RNDN);
    return r;
  }
  static MpReal from_i64(i64 x, mpfr_prec_t prec) {
    MpReal r(prec);
    mpfr_set_sj(r.v_, x, MPFR_RNDN);
    return r;
  }

  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

  friend MpReal operator+(const MpReal& a, const MpReal& b) {
    MpReal r(a.prec()); mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
  }
  friend MpReal operator-(const MpReal& a, const MpReal& b) {
    MpReal r(a.prec()); mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
  }
  friend MpReal operator*(const MpReal& a, const MpReal& b) {
    MpReal r(a.prec()); mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
  }
  friend MpReal operator/(const MpReal& a, const MpReal& b) {
    MpReal r(a.prec()); mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN); return r;
  }
  MpReal operator-() const { MpReal r(prec()); mpfr_neg(r.v_, v_, MPFR_RNDN); return r; }
  MpReal abs() const { MpReal r(prec()); mpfr_abs(r.v_, v_, MPFR_RNDN); return r; }
  bool operator<(const MpReal& o) const { return mpfr_cmp(v_, o.v_) < 0; }

 private:
  mpfr_t v_;
};

struct MpComplex {
  MpReal re, im;

  MpComplex(mpfr_prec_t prec = 128) : re(prec), im(prec) {}
  MpComplex(MpReal r, MpReal i) : re(std::move(r)), im(std::move(i)) {}

  static MpComplex from_std(std::complex<double> z, mpfr_prec_t prec) {
    return {MpReal::from_double(z.real(), prec), MpReal::from_double(z.imag(), prec)};
  }
  std::complex<double> to_std() const { return {re.to_double(), im.to_double()}; }

  friend MpComplex operator+(const MpComplex& a, const MpComplex& b) { return {a.re + b.re, a.im + b.im}; }
  friend MpComplex operator-(const MpComplex& a, const MpComplex& b) { return {a.re - b.re, a.im - b.im}; }
  friend MpComplex operator*(const MpComplex& a, const MpComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend MpComplex operator/(const MpComplex& a, const MpComplex& b) {
    MpReal d = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
  }
  MpReal abs2() const { return re * re + im * im; }
};

/// All complex roots of a monic integer polynomial (ascending coefficients),
/// by Durand-Kerner iteration carried out at the requested precision.
/// Returns roots plus the largest |p(root)| observed at the end.
inline std::pair<std::vector<MpComplex>, double> poly_roots_mp(const std::vector<i64>& coeffs,
                                                               mpfr_prec_t prec) {
  int n = int(coeffs.size()) - 1;
  if (n < 1 || coeffs[n] != 1) throw std::invalid_argument("poly_roots_mp: monic polynomial required");
  std::vector<MpComplex> c(n + 1, MpComplex(prec));
  for (int i = 0; i <= n; ++i) c[i] = MpComplex(MpReal::from_i64(coeffs[i], prec), MpReal::from_i64(0, prec));

  auto eval = [&](const MpComplex& z) {
    MpComplex acc = c[n];
    for (int i = n - 1; i >= 0; --i) acc = acc * z + c[i];
    return acc;
  };

  // Cauchy-style radius keeps the start circle outside no root.
  double radius = 1.0;
  for (int i = 0; i < n; ++i) radius = std::max(radius, 2.0 * std::pow(std::abs(double(coeffs[i])), 1.0 / (n - i)));

  std::vector<MpComplex> z;
  for (int k = 0; k < n; ++k) {
    double ang = 2.0 * M_PI * (k + 0.25) / n;
    z.push_back(MpComplex::from_std(std::polar(radius * 0.8, ang), prec));
  }

  int iters = 64 + int(prec);  // generous; each sweep is cheap at these degrees
  for (int it = 0; it < iters; ++it) {
    for (int k = 0; k < n; ++k) {
      MpComplex denom(MpReal::from_i64(1, prec), MpReal::from_i64(0, prec));
      for (int j = 0; j < n; ++j)
        if (j != k) denom = denom * (z[k] - z[j]);
      z[k] = z[k] - eval(z[k]) / denom;
    }
  }

  double resid = 0.0;
  for (int k = 0; k < n; ++k) resid = std::max(resid, std::sqrt(eval(z[k]).abs2().to_double()));
  return {std::move(z), resid};
}

}  // namespace circlelab
