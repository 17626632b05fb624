#pragma once

#include <optional>
#include <string>
#include <tuple>
#include <utility>

#include "circlelab/poly.hpp"

namespace circlelab {

/// System G_{d,i} of polynomials over the ring, grouped and indexed by degree.
struct PolySystem {
  int s = 0;  // variables
  int D = 0;  // top degree
  std::vector<int> t;                     // t[d], d = 1..D (t[0] unused)
  std::vector<std::vector<PolyE>> polys;  // polys[d][i]
  std::vector<std::vector<PolyE>> forms;  // leading degree-d parts F_{d,i}
  std::vector<int> delta;                 // degrees d with t_d >= 1
  int T = 0;

  std::vector<int> Dd;  // Dd[d] = t_1 + 2 t_2 + ... + d t_d, d = 0..D
  int degree_sum = 0;   // Dd[D]

  std::vector<std::pair<int, int>> flat;  // flat index -> (d, i)

  const PolyE& poly(int fi) const { return polys[flat[fi].first][flat[fi].second]; }
  const PolyE& form(int fi) const { return forms[flat[fi].first][flat[fi].second]; }
};

/// Weil restriction: nT integer polynomials in ns variables. Variable X_{i,j}
/// (field variable i, coordinate j) sits at flat position i*n + j.
struct WeilSystem {
  int n = 1, s = 0, T = 0;
  std::vector<PolyZ> star;        // index = fi * n + j for fi over flat (d,i)
  std::vector<PolyZ> star_forms;  // degree-d parts
  std::vector<std::tuple<int, int, int>> index;  // (d, i, j) per star poly

  int ns() const { return n * s; }
};

struct BoxRegion {
  // One [a, b] per real coordinate (ns of them), inside [-1, 1].
  std::vector<std::pair<Rat, Rat>> bounds;

  static BoxRegion cube(int ns) {
    BoxRegion r;
    r.bounds.assign(ns, {Rat(-1), Rat(1)});
    return r;
  }
  void validate() const;
  double volume() const {
    double v = 1.0;
    for (auto& [a, b] : bounds) v *= (b - a).to_double();
    return v;
  }
};

struct ParseOptions {
  std::optional<std::vector<int>> declared_profile;  // t_1..t_D
  std::optional<int> declared_s;
};

/// Text grammar: variables x1..xs; coefficients are integers or bracketed
/// coordinate vectors "[a,b,...]"; operators + - * ^; polynomials separated
/// by ';'.
PolySystem parse_system(const NumberField& K, const std::string& text, const ParseOptions& opt = {});

/// Symmetric multilinear polar form by inclusion-exclusion over slot subsets:
/// evaluates F(x_1 | ... | x_d) with F(x|...|x) = d! F(x).
Elem polar_eval(const NumberField& K, const PolyE& form, std::span<const std::vector<Elem>> slots);

WeilSystem weil_restrict(const NumberField& K, const PolySystem& sys);

/// Values of every G_{d,i} at the point, in flat order; when a modulus is
/// given the coordinates are reduced to canonical representatives.
std::vector<Elem> evaluate(const NumberField& K, const PolySystem& sys, std::span<const Elem> x,
                           const IdealLattice* modulus = nullptr);

/// Additive split into single-variable parts: G = sum_i g_i(x_i) + const.
/// Present only when every monomial touches at most one variable.
struct VariableSplit {
  bool separable = false;
  std::string offending;                        // monomial that breaks it
  std::vector<std::vector<PolyE>> per_var;      // [var][flat poly] univariate parts
  std::vector<Elem> constants;                  // [flat poly]
};
VariableSplit variable_split(const NumberField& K, const PolySystem& sys);

/// Same split on the Weil system, grouped by field variable (n coordinates
/// per group).
struct GroupSplit {
  bool separable = false;
  std::string offending;
  std::vector<std::vector<PolyZ>> per_group;  // [var][star index] parts
  std::vector<i64> constants;                 // [star index]
};
GroupSplit group_split(const WeilSystem& ws);

}  // namespace circlelab
