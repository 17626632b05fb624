#pragma once

#include <optional>
#include <span>
#include <vector>

#include "circlelab/rational.hpp"

namespace circlelab {

using ZVec = std::vector<i64>;

/// Row Hermite normal form of the lattice spanned by the given rows:
/// upper triangular, positive diagonal, entries above each pivot reduced into
/// [0, pivot). Throws if the rows do not span a full-rank lattice in Z^n.
inline std::vector<ZVec> hnf_rows(std::vector<ZVec> rows, int n) {
  for (auto& r : rows)
    if (int(r.size()) != n) throw std::invalid_argument("hnf: row length mismatch");
  std::vector<ZVec> basis;
  for (int col = 0; col < n; ++col) {
    // Euclid on the entries of this column across remaining generator rows.
    int live = -1;
    while (true) {
      live = -1;
      for (size_t i = 0; i < rows.size(); ++i)
        if (rows[i][col] != 0 && (live < 0 || std::llabs(rows[i][col]) < std::llabs(rows[live][col])))
          live = int(i);
      if (live < 0) break;
      bool reduced_all = true;
      for (size_t i = 0; i < rows.size(); ++i) {
        if (int(i) == live || rows[i][col] == 0) continue;
        i64 q = rows[i][col] / rows[live][col];
        if (q != 0)
          for (int j = 0; j < n; ++j)
            rows[i][j] = narrow(i128(rows[i][j]) - i128(q) * rows[live][j], "hnf");
        if (rows[i][col] != 0) reduced_all = false;
      }
      if (reduced_all) break;
    }
    if (live < 0) throw std::domain_error("hnf: generators have rank < n");
    ZVec pivot = rows[live];
    rows.erase(rows.begin() + live);
    if (pivot[col] < 0)
      for (auto& x : pivot) x = -x;
    basis.push_back(std::move(pivot));
  }
  // Reduce above-diagonal entries.
  for (int j = int(basis.size()) - 1; j >= 0; --j) {
    i64 d = basis[j][j];
    for (int i = 0; i < j; ++i) {
      i64 q = basis[i][j] / d;
      if (basis[i][j] - q * d < 0) q -= 1;  // floored quotient
      if (q != 0)
        for (int k = 0; k < n; ++k)
          basis[i][k] = narrow(i128(basis[i][k]) - i128(q) * basis[j][k], "hnf");
    }
  }
  return basis;
}

inline i64 hnf_det(const std::vector<ZVec>& h) {
  i128 d = 1;
  for (size_t i = 0; i < h.size(); ++i) d *= h[i][i];
  return narrow(d, "hnf_det");
}

/// Membership of v in the lattice with HNF row basis h (back substitution).
inline bool hnf_contains(const std::vector<ZVec>& h, std::span<const i64> v) {
  int n = int(h.size());
  std::vector<i64> rem(v.begin(), v.end());
  for (int j = n - 1; j >= 0; --j) {
    if (rem[j] % h[j][j] != 0) return false;
    i64 y = rem[j] / h[j][j];
    if (y != 0)
      for (int k = 0; k < n; ++k) rem[k] = narrow(i128(rem[k]) - i128(y) * h[j][k], "hnf_contains");
  }
  for (i64 x : rem)
    if (x != 0) return false;
  return true;
}

/// Canonical representative of v modulo the lattice: all coordinates land in
/// [0, h[j][j]) after sweeping rows from the last pivot down.
inline ZVec hnf_reduce(const std::vector<ZVec>& h, std::span<const i64> v) {
  int n = int(h.size());
  ZVec r(v.begin(), v.end());
  for (int j = n - 1; j >= 0; --j) {
    i64 d = h[j][j];
    i64 q = r[j] / d;
    if (r[j] - q * d < 0) q -= 1;
    if (q != 0)
      for (int k = 0; k < n; ++k) r[k] = narrow(i128(r[k]) - i128(q) * h[j][k], "hnf_reduce");
  }
  return r;
}

inline bool hnf_equal(const std::vector<ZVec>& a, const std::vector<ZVec>& b) { return a == b; }

/// All canonical coset representatives of Z^n modulo the lattice (det many).
inline std::vector<ZVec> hnf_cosets(const std::vector<ZVec>& h) {
  int n = int(h.size());
  i64 total = hnf_det(h);
  std::vector<ZVec> out;
  out.reserve(size_t(total));
  ZVec cur(n, 0);
  while (true) {
    out.push_back(cur);
    int j = n - 1;
    while (j >= 0) {
      if (++cur[j] < h[j][j]) break;
      cur[j] = 0;
      --j;
    }
    if (j < 0) break;
  }
  if (i64(out.size()) != total) throw std::logic_error("coset enumeration mismatch");
  return out;
}

/// Flat index of a canonical representative, mixed radix over the diagonal.
inline i64 hnf_coset_index(const std::vector<ZVec>& h, std::span<const i64> canon) {
  i64 idx = 0;
  for (size_t j = 0; j < h.size(); ++j) idx = narrow(i128(idx) * h[j][j] + canon[j], "coset_index");
  return idx;
}

/// Diagonalization of Z^n / rowspan(B): unimodular row and column operations
/// bring B to diagonal form; the tracked column matrix F maps ambient
/// coordinates so that the quotient becomes a product of cyclic groups:
/// x mod L  <->  (x * F) mod diag, componentwise.
struct QuotientShape {
  std::vector<i64> diag;  // positive cyclic orders
  std::vector<ZVec> F;    // n x n unimodular, applied as row-vector times F
};

inline QuotientShape diagonalize_quotient(std::vector<ZVec> B, int n) {
  std::vector<ZVec> F(n, ZVec(n, 0));
  for (int i = 0; i < n; ++i) F[i][i] = 1;

  auto col_sub = [&](int dst, int src, i64 q) {  // col_dst -= q * col_src
    for (int i = 0; i < n; ++i) B[i][dst] = narrow(i128(B[i][dst]) - i128(q) * B[i][src], "snf");
    for (int i = 0; i < n; ++i) F[i][dst] = narrow(i128(F[i][dst]) - i128(q) * F[i][src], "snf");
  };
  auto col_swap = [&](int a, int b) {
    for (int i = 0; i < n; ++i) std::swap(B[i][a], B[i][b]);
    for (int i = 0; i < n; ++i) std::swap(F[i][a], F[i][b]);
  };
  auto row_sub = [&](int dst, int src, i64 q) {
    for (int j = 0; j < n; ++j) B[dst][j] = narrow(i128(B[dst][j]) - i128(q) * B[src][j], "snf");
  };

  for (int k = 0; k < n; ++k) {
    while (true) {
      int pi = -1, pj = -1;
      i64 best = 0;
      for (int i = k; i < n; ++i)
        for (int j = k; j < n; ++j)
          if (B[i][j] != 0 && (pi < 0 || std::llabs(B[i][j]) < best)) {
            best = std::llabs(B[i][j]);
            pi = i;
            pj = j;
          }
      if (pi < 0) throw std::domain_error("quotient of a rank-deficient lattice");
      std::swap(B[pi], B[k]);
      if (pj != k) col_swap(pj, k);
      bool clean = true;
      for (int i = k + 1; i < n; ++i) {
        i64 q = B[i][k] / B[k][k];
        if (q != 0) row_sub(i, k, q);
        if (B[i][k] != 0) clean = false;
      }
      for (int j = k + 1; j < n; ++j) {
        i64 q = B[k][j] / B[k][k];
        if (q != 0) col_sub(j, k, q);
        if (B[k][j] != 0) clean = false;
      }
      if (clean) break;
    }
  }
  QuotientShape qs;
  qs.F = std::move(F);
  for (int i = 0; i < n; ++i) qs.diag.push_back(std::llabs(B[i][i]));
  return qs;
}

}  // namespace circlelab
