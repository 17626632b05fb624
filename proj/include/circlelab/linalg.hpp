#pragma once

#include <vector>
#include <stdexcept>

#include "circlelab/rational.hpp"

namespace circlelab {

/// Dense rational matrix, row-major. Sizes here are the field degree, so tiny.
class RatMat {
 public:
  RatMat() : r_(0), c_(0) {}
  RatMat(int r, int c) : r_(r), c_(c), a_(size_t(r) * c) {}

  static RatMat identity(int n) {
    RatMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = Rat(1);
    return m;
  }

  int rows() const { return r_; }
  int cols() const { return c_; }
  Rat& operator()(int i, int j) { return a_[size_t(i) * c_ + j]; }
  const Rat& operator()(int i, int j) const { return a_[size_t(i) * c_ + j]; }

  friend RatMat operator*(const RatMat& x, const RatMat& y) {
    if (x.c_ != y.r_) throw std::invalid_argument("matrix size mismatch");
    RatMat z(x.r_, y.c_);
    for (int i = 0; i < x.r_; ++i)
      for (int k = 0; k < x.c_; ++k) {
        if (x(i, k).is_zero()) continue;
        for (int j = 0; j < y.c_; ++j) z(i, j) += x(i, k) * y(k, j);
      }
    return z;
  }

  std::vector<Rat> apply(const std::vector<Rat>& v) const {
    if (int(v.size()) != c_) throw std::invalid_argument("matrix/vector size mismatch");
    std::vector<Rat> out(r_);
    for (int i = 0; i < r_; ++i)
      for (int j = 0; j < c_; ++j) out[i] += (*this)(i, j) * v[j];
    return out;
  }

  Rat det() const {
    if (r_ != c_) throw std::invalid_argument("determinant of non-square matrix");
    RatMat m = *this;
    Rat d(1);
    for (int col = 0; col < c_; ++col) {
      int piv = -1;
      for (int i = col; i < r_; ++i)
        if (!m(i, col).is_zero()) { piv = i; break; }
      if (piv < 0) return Rat(0);
      if (piv != col) {
        for (int j = 0; j < c_; ++j) std::swap(m(piv, j), m(col, j));
        d = -d;
      }
      d *= m(col, col);
      Rat inv = Rat(1) / m(col, col);
      for (int i = col + 1; i < r_; ++i) {
        if (m(i, col).is_zero()) continue;
        Rat f = m(i, col) * inv;
        for (int j = col; j < c_; ++j) m(i, j) -= f * m(col, j);
      }
    }
    return d;
  }

  RatMat inverse() const {
    if (r_ != c_) throw std::invalid_argument("inverse of non-square matrix");
    RatMat m = *this, inv = identity(r_);
    for (int col = 0; col < c_; ++col) {
      int piv = -1;
      for (int i = col; i < r_; ++i)
        if (!m(i, col).is_zero()) { piv = i; break; }
      if (piv < 0) throw std::domain_error("singular matrix");
      for (int j = 0; j < c_; ++j) {
        std::swap(m(piv, j), m(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
      Rat s = Rat(1) / m(col, col);
      for (int j = 0; j < c_; ++j) { m(col, j) *= s; inv(col, j) *= s; }
      for (int i = 0; i < r_; ++i) {
        if (i == col || m(i, col).is_zero()) continue;
        Rat f = m(i, col);
        for (int j = 0; j < c_; ++j) {
          m(i, j) -= f * m(col, j);
          inv(i, j) -= f * inv(col, j);
        }
      }
    }
    return inv;
  }

  Rat trace() const {
    Rat t;
    for (int i = 0; i < r_ && i < c_; ++i) t += (*this)(i, i);
    return t;
  }

 private:
  int r_, c_;
  std::vector<Rat> a_;
};

/// Characteristic polynomial coefficients (monic, ascending) via Faddeev-LeVerrier.
inline std::vector<Rat> char_poly(const RatMat& a) {
  int n = a.rows();
  std::vector<Rat> c(n + 1);
  c[n] = Rat(1);
  RatMat m = RatMat(n, n);
  RatMat acc = RatMat::identity(n);
  for (int k = 1; k <= n; ++k) {
    m = a * acc;
    Rat ck = -(m.trace() / Rat(k));
    c[n - k] = ck;
    acc = m;
    for (int i = 0; i < n; ++i) acc(i, i) += ck;
  }
  return c;
}

}  // namespace circlelab
