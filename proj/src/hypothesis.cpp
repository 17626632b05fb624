#include "circlelab/hypothesis.hpp"

#include <cmath>

#include "circlelab/polymod.hpp"

namespace circlelab {

namespace {

void fill_corollary(const PolySystem& sys, HypothesisReport& rep,
                    const std::optional<std::map<int, int>>& B) {
  int D = sys.D;
  rep.u.assign(D + 2, 0);
  for (int d = D; d >= 1; --d) {
    i64 term = narrow(i128(1) << (d - 1), "u_d");
    term = narrow(i128(term) * (d - 1) * sys.t[d], "u_d");
    rep.u[d] = narrow(i128(rep.u[d + 1]) + term, "u_d");
  }
  std::vector<int> dset = sys.delta;
  dset.insert(dset.begin(), 0);
  rep.s0 = 0;
  for (int d : dset) {
    i64 pow2 = d >= 1 ? narrow(i128(1) << (d - 1), "s0") : 0;  // unused when Dd = 0
    i64 val = 0;
    if (sys.Dd[d] != 0) val = narrow(i128(sys.Dd[d]) * (pow2 + rep.u[d + 1]), "s0");
    val = narrow(i128(val) + rep.u[d + 1], "s0");
    for (int j = d + 1; j <= D; ++j) val = narrow(i128(val) + i128(rep.u[j]) * sys.t[j], "s0");
    rep.s0_of[d] = val;
    rep.s0 = std::max(rep.s0, val);
  }
  if (B) {
    i64 bmax = INT64_MIN;
    for (int d : sys.delta) {
      auto it = B->find(d);
      if (it == B->end()) throw std::invalid_argument("missing B_d for d = " + std::to_string(d));
      bmax = std::max<i64>(bmax, it->second);
    }
    rep.B_max = bmax;
    rep.simplified_condition = (i64(sys.s) > bmax + rep.s0);
  }
  if (sys.degree_sum >= 2) {
    i128 rhs = i128(sys.degree_sum - 1) << sys.degree_sum;
    rep.s0_display_bound = (i128(rep.s0) + sys.T - 1 <= rhs);
  }
}

}  // namespace

HypothesisReport check_main_hypothesis(const PolySystem& sys, const std::map<int, int>& B) {
  HypothesisReport rep;
  int D = sys.D, s = sys.s;

  auto B_of = [&](int d) -> int {
    if (sys.t[d] == 0) return 0;  // convention outside Delta
    auto it = B.find(d);
    if (it == B.end()) throw std::invalid_argument("missing B_d for d = " + std::to_string(d));
    return it->second;
  };
  for (int d = 1; d <= D; ++d) {
    int b = B_of(d);
    rep.B[d] = b;
    if (b >= s)
      throw std::invalid_argument("B_" + std::to_string(d) + " = " + std::to_string(b) +
                                  " >= s = " + std::to_string(s) +
                                  "; the standing assumption B_d < s fails");
  }

  auto s_vals_for = [&](const std::map<int, int>& Bm) {
    std::map<int, Rat> sv;
    sv[D + 1] = Rat(0);
    for (int d = D; d >= 1; --d) {
      int b = Bm.count(d) ? Bm.at(d) : 0;
      Rat term = sys.t[d] == 0
                     ? Rat(0)
                     : Rat(narrow(i128(1) << (d - 1), "s_d") * (d - 1) * sys.t[d], s - b);
      sv[d] = sv[d + 1] + term;
    }
    return sv;
  };
  rep.s_vals = s_vals_for(rep.B);

  std::vector<int> dset = sys.delta;
  dset.insert(dset.begin(), 0);

  auto lhs_for = [&](const std::map<int, Rat>& sv, const std::map<int, int>& Bm) {
    std::map<int, Rat> lhs;
    for (int d : dset) {
      Rat v;
      Rat s_next = sv.at(d + 1);
      if (sys.Dd[d] != 0) {
        int b = Bm.count(d) ? Bm.at(d) : 0;
        Rat pow2 = Rat(narrow(i128(1) << (d - 1), "lhs"));
        v += Rat(sys.Dd[d]) * (pow2 / Rat(s - b) + s_next);
      }
      v += s_next;
      for (int j = d + 1; j <= D; ++j) v += sv.at(j) * Rat(sys.t[j]);
      lhs[d] = v;
    }
    return lhs;
  };
  rep.lhs = lhs_for(rep.s_vals, rep.B);

  rep.satisfied = true;
  Rat max_lhs;
  for (auto& [d, v] : rep.lhs) {
    bool ok = v < Rat(1);
    rep.satisfied_d[d] = ok;
    rep.satisfied = rep.satisfied && ok;
    max_lhs = std::max(max_lhs, v);
  }
  rep.margin = Rat(1) - max_lhs;

  // Alternative with empty loci treated as 0-dimensional.
  bool any_negative = false;
  for (auto& [d, b] : rep.B) any_negative = any_negative || b < 0;
  if (any_negative) {
    std::map<int, int> Bc = rep.B;
    for (auto& [d, b] : Bc) b = std::max(b, 0);
    auto svc = s_vals_for(Bc);
    rep.lhs_conservative = lhs_for(svc, Bc);
    bool sat = true;
    for (auto& [d, v] : *rep.lhs_conservative) sat = sat && (v < Rat(1));
    rep.satisfied_conservative = sat;
  }

  if (int(sys.delta.size()) == 1) {
    int d = sys.delta[0];
    i128 rhs = i128(sys.t[d]) * (sys.t[d] + 1) * (d - 1) * (i128(1) << (d - 1));
    rep.single_degree_condition = (i128(s) - rep.B.at(d) > rhs);
  }

  fill_corollary(sys, rep, std::map<int, int>(rep.B));
  return rep;
}

HypothesisReport corollary_bounds(const PolySystem& sys, const std::optional<std::map<int, int>>& B) {
  HypothesisReport rep;
  fill_corollary(sys, rep, B);
  return rep;
}

BdEstimate estimate_Bd(const NumberField& K, const PolySystem& sys, int d, BdMethod method,
                       std::optional<int> user_value, std::vector<i64> primes, i64 budget) {
  if (sys.t[d] == 0) throw std::invalid_argument("degree d is not present in the system");
  if (method == BdMethod::user_override) {
    if (!user_value) throw std::invalid_argument("user_override needs a value");
    return {*user_value, "asserted", {}};
  }

  // Degree-one primes give a reduction map O -> F_q through a root of the
  // minimal polynomial.
  if (primes.empty()) primes = {3, 5, 7, 11, 13, 17, 19, 23};
  std::vector<i64> good;
  std::vector<i64> roots;
  for (i64 q : primes) {
    auto red = fp::reduce(K.min_poly, q);
    if (fp::deg(red) != K.n) continue;
    std::optional<i64> root;
    for (i64 r = 0; r < q; ++r) {
      i64 v = 0;
      for (int i = fp::deg(red); i >= 0; --i) v = fp::mod(v * r + red[size_t(i)], q);
      if (v == 0) { root = r; break; }
    }
    if (!root) continue;
    double cost = std::pow(double(q), sys.s);
    if (cost > double(budget)) continue;
    good.push_back(q);
    roots.push_back(*root);
    if (good.size() >= 3) break;
  }
  if (good.size() < 2)
    throw std::runtime_error("no usable degree-one primes for the finite-field dimension fit");

  int td = sys.t[d];
  BdEstimate est;
  for (size_t qi = 0; qi < good.size(); ++qi) {
    i64 q = good[qi], root = roots[qi];
    // Reduce all partial derivatives of the degree-d leading forms mod q.
    // Entry (i, v) of the Jacobian as a flat integer-coefficient polynomial.
    std::vector<std::vector<PolyZ>> jac(td, std::vector<PolyZ>(sys.s));
    for (int i = 0; i < td; ++i)
      for (int v = 0; v < sys.s; ++v) {
        PolyE der = sys.forms[d][i].derivative(v, &K);
        PolyZ red(sys.s);
        for (auto& term : der.terms) {
          // coordinate vector -> residue via the chosen root
          i64 acc = 0, rp = 1;
          for (int k = 0; k < K.n; ++k) {
            if (!term.c.c[k].is_integer())
              throw std::invalid_argument("finite-field reduction needs integral coefficients");
            acc = fp::mod(acc + fp::mod(term.c.c[k].num(), q) * rp, q);
            rp = fp::mod(rp * root, q);
          }
          if (acc != 0) red.add_term(term.e, acc);
        }
        red.normalize();
        jac[i][v] = std::move(red);
      }

    i64 count = 0;
    std::vector<i64> x(sys.s, 0);
    std::vector<std::vector<i64>> mat(td, std::vector<i64>(sys.s));
    while (true) {
      for (int i = 0; i < td; ++i)
        for (int v = 0; v < sys.s; ++v) {
          i64 acc = 0;
          for (auto& term : jac[i][v].terms) {
            i64 m = term.c;
            for (int w = 0; w < sys.s; ++w)
              for (int e = 0; e < term.e[w]; ++e) m = fp::mod(m * x[w], q);
            acc = fp::mod(acc + m, q);
          }
          mat[i][v] = acc;
        }
      // rank over F_q
      int rank = 0;
      auto m = mat;
      for (int col = 0; col < sys.s && rank < td; ++col) {
        int piv = -1;
        for (int i = rank; i < td; ++i)
          if (m[i][col] != 0) { piv = i; break; }
        if (piv < 0) continue;
        std::swap(m[piv], m[rank]);
        i64 inv = fp::invmod(m[rank][col], q);
        for (int j = 0; j < sys.s; ++j) m[rank][j] = fp::mod(m[rank][j] * inv, q);
        for (int i = 0; i < td; ++i) {
          if (i == rank || m[i][col] == 0) continue;
          i64 f = m[i][col];
          for (int j = 0; j < sys.s; ++j) m[i][j] = fp::mod(m[i][j] - f * m[rank][j], q);
        }
        ++rank;
      }
      if (rank < td) ++count;

      int j = sys.s - 1;
      while (j >= 0) {
        if (++x[size_t(j)] < q) break;
        x[size_t(j)] = 0;
        --j;
      }
      if (j < 0) break;
    }
    est.counts.emplace_back(q, count);
  }

  bool all_zero = true;
  for (auto& [q, c] : est.counts) all_zero = all_zero && (c == 0);
  if (all_zero) {
    est.B = -1;
    est.confidence = "exact-empty";
    return est;
  }
  for (auto& [q, c] : est.counts)
    if (c == 0) throw std::runtime_error("inconclusive finite-field counts (mixed zero/nonzero); supply B_d");

  std::vector<double> exps;
  for (size_t i = 0; i + 1 < est.counts.size(); ++i) {
    auto [q1, c1] = est.counts[i];
    auto [q2, c2] = est.counts[i + 1];
    exps.push_back(std::log(double(c2) / double(c1)) / std::log(double(q2) / double(q1)));
  }
  double e = exps.back();
  int rounded = int(std::lround(e));
  for (double x : exps)
    if (std::lround(x) != rounded || std::abs(x - std::lround(x)) > 0.35)
      throw std::runtime_error("inconclusive finite-field growth exponents; supply B_d via user_override");
  est.B = rounded;
  est.confidence = "fitted";
  return est;
}

}  // namespace circlelab
