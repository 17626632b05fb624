#include "circlelab/polysys.hpp"

#include <cctype>
#include <map>
#include <sstream>

namespace circlelab {

void BoxRegion::validate() const {
  for (auto& [a, b] : bounds) {
    if (a > b) throw std::invalid_argument("box interval with a > b");
    if (a < Rat(-1) || b > Rat(1)) throw std::invalid_argument("box must lie within [-1,1]^(ns)");
  }
}

namespace {

class Parser {
 public:
  Parser(const NumberField& K, std::string_view text, int nvars)
      : K_(K), s_(text), nvars_(nvars) {}

  PolyE parse_poly() {
    PolyE p = parse_expr();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing input");
    return p;
  }

  static int scan_max_var(std::string_view text) {
    int mx = 0;
    for (size_t i = 0; i + 1 < text.size(); ++i) {
      if (text[i] == 'x' && std::isdigit(static_cast<unsigned char>(text[i + 1]))) {
        int v = 0;
        size_t j = i + 1;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) v = v * 10 + (text[j++] - '0');
        mx = std::max(mx, v);
      }
    }
    return mx;
  }

 private:
  [[noreturn]] void fail(const std::string& why) {
    throw std::invalid_argument("system parse error at position " + std::to_string(pos_) + ": " + why);
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  i64 parse_int() {
    skip_ws();
    bool neg = eat('-');
    if (!neg) eat('+');
    skip_ws();
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) fail("integer expected");
    i64 v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
      v = narrow(i128(v) * 10 + (s_[pos_++] - '0'), "parse_int");
    return neg ? -v : v;
  }

  PolyE parse_expr() {
    PolyE acc(nvars_);
    bool neg = false;
    if (peek() == '-') { eat('-'); neg = true; }
    else if (peek() == '+') eat('+');
    PolyE t = parse_term();
    acc = neg ? t.negated() : t;
    while (true) {
      char c = peek();
      if (c == '+') { eat('+'); acc = acc.plus(parse_term(), &K_); }
      else if (c == '-') { eat('-'); acc = acc.minus(parse_term(), &K_); }
      else break;
    }
    return acc;
  }

  PolyE parse_term() {
    PolyE acc = parse_factor();
    while (true) {
      char c = peek();
      if (c == '*') { eat('*'); acc = acc.times(parse_factor(), &K_); }
      else break;
    }
    return acc;
  }

  PolyE parse_factor() {
    PolyE base = parse_atom();
    if (peek() == '^') {
      eat('^');
      i64 e = parse_int();
      if (e < 0) fail("negative exponent");
      base = base.pow(int(e), K_.one(), &K_);
    }
    return base;
  }

  PolyE parse_atom() {
    char c = peek();
    if (c == '(') {
      eat('(');
      PolyE p = parse_expr();
      if (!eat(')')) fail("')' expected");
      return p;
    }
    if (c == '[') {
      eat('[');
      Elem e(K_.n);
      for (int j = 0; j < K_.n; ++j) {
        e.c[j] = Rat(parse_int());
        if (j + 1 < K_.n && !eat(',')) fail("',' expected in coefficient vector");
      }
      if (!eat(']')) fail("']' expected (coefficient vectors carry exactly n entries)");
      return PolyE::constant(nvars_, e);
    }
    if (c == 'x') {
      ++pos_;
      i64 idx = parse_int();
      if (idx < 1 || idx > nvars_) fail("variable index out of range");
      PolyE p(nvars_);
      std::vector<int> e(nvars_, 0);
      e[size_t(idx - 1)] = 1;
      p.add_term(std::move(e), K_.one());
      return p;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+') {
      i64 v = parse_int();
      return PolyE::constant(nvars_, scale(Rat(v), K_.one()));
    }
    fail("unexpected character");
  }

  const NumberField& K_;
  std::string_view s_;
  size_t pos_ = 0;
  int nvars_;
};

std::string monomial_str(const std::vector<int>& e) {
  std::string s;
  for (size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += "x" + std::to_string(i + 1);
    if (e[i] > 1) s += "^" + std::to_string(e[i]);
  }
  return s.empty() ? "1" : s;
}

}  // namespace

PolySystem parse_system(const NumberField& K, const std::string& text, const ParseOptions& opt) {
  std::vector<std::string> chunks;
  {
    std::string cur;
    for (char c : text) {
      if (c == ';') {
        chunks.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    if (!cur.empty()) chunks.push_back(cur);
  }
  std::erase_if(chunks, [](const std::string& c) {
    return c.find_first_not_of(" \t\r\n") == std::string::npos;
  });
  if (chunks.empty()) throw std::invalid_argument("empty system");

  int s = opt.declared_s.value_or(0);
  for (auto& c : chunks) s = std::max(s, Parser::scan_max_var(c));
  if (s <= 0) throw std::invalid_argument("system has no variables");

  std::map<int, std::vector<PolyE>> by_degree;
  for (auto& c : chunks) {
    Parser p(K, c, s);
    PolyE poly = p.parse_poly();
    int d = poly.total_degree();
    if (d < 1) throw std::invalid_argument("polynomial of degree < 1 in system: '" + c + "'");
    if (poly.degree_part(d).is_zero()) throw std::invalid_argument("zero leading form");
    by_degree[d].push_back(std::move(poly));
  }

  PolySystem sys;
  sys.s = s;
  sys.D = by_degree.rbegin()->first;
  if (opt.declared_profile) {
    const auto& tp = *opt.declared_profile;
    int declared_D = int(tp.size());
    std::vector<int> actual(declared_D + 1, 0);
    for (auto& [d, v] : by_degree) {
      if (d > declared_D) throw std::invalid_argument("degree mismatch: polynomial of degree " +
                                                      std::to_string(d) + " exceeds declared profile");
      actual[d] = int(v.size());
    }
    for (int d = 1; d <= declared_D; ++d)
      if (actual[d] != tp[size_t(d - 1)])
        throw std::invalid_argument("degree mismatch: declared t_" + std::to_string(d) + " = " +
                                    std::to_string(tp[size_t(d - 1)]) + ", found " + std::to_string(actual[d]));
    if (tp.empty() || tp.back() < 1)
      throw std::invalid_argument("declared profile has t_D = 0; the top degree slot must be nonempty");
    sys.D = declared_D;
  }

  sys.t.assign(sys.D + 1, 0);
  sys.polys.assign(sys.D + 1, {});
  sys.forms.assign(sys.D + 1, {});
  for (auto& [d, v] : by_degree) {
    sys.t[d] = int(v.size());
    for (auto& p : v) {
      sys.forms[d].push_back(p.degree_part(d));
      sys.polys[d].push_back(std::move(p));
    }
  }
  sys.Dd.assign(sys.D + 1, 0);
  for (int d = 1; d <= sys.D; ++d) {
    sys.Dd[d] = sys.Dd[d - 1] + d * sys.t[d];
    if (sys.t[d] >= 1) sys.delta.push_back(d);
    sys.T += sys.t[d];
    for (int i = 0; i < sys.t[d]; ++i) sys.flat.emplace_back(d, i);
  }
  sys.degree_sum = sys.Dd[sys.D];
  return sys;
}

Elem polar_eval(const NumberField& K, const PolyE& form, std::span<const std::vector<Elem>> slots) {
  int d = form.total_degree();
  if (form.is_zero()) return K.zero();
  if (form.degree_part(d).terms.size() != form.terms.size())
    throw std::invalid_argument("polar form of a non-homogeneous polynomial");
  if (int(slots.size()) != d) throw std::invalid_argument("polar evaluation needs exactly deg(F) slots");
  int s = form.nv;
  for (auto& slot : slots)
    if (int(slot.size()) != s) throw std::invalid_argument("polar slot dimension mismatch");

  Elem acc = K.zero();
  for (unsigned mask = 1; mask < (1u << d); ++mask) {
    std::vector<Elem> x(s, Elem(K.n));
    int bits = 0;
    for (int i = 0; i < d; ++i)
      if (mask & (1u << i)) {
        ++bits;
        for (int v = 0; v < s; ++v) x[v] = add(x[v], slots[i][v]);
      }
    Elem val = form.eval(std::span<const Elem>(x), &K);
    if ((d - bits) % 2 == 1) val = neg(val);
    acc = add(acc, val);
  }
  return acc;
}

WeilSystem weil_restrict(const NumberField& K, const PolySystem& sys) {
  WeilSystem ws;
  ws.n = K.n;
  ws.s = sys.s;
  ws.T = sys.T;
  int n = K.n, ns = n * sys.s;

  // Generic coordinates: x_i = sum_j X_{i,j} omega_j as PolyE in ns vars.
  std::vector<PolyE> generic(sys.s, PolyE(ns));
  for (int i = 0; i < sys.s; ++i)
    for (int j = 0; j < n; ++j) {
      std::vector<int> e(ns, 0);
      e[size_t(i) * n + j] = 1;
      Elem wj(n);
      wj.c[j] = Rat(1);
      generic[i].add_term(std::move(e), wj);
    }

  for (auto& [d, i] : sys.flat) {
    const PolyE& G = sys.polys[d][i];
    // Substitute into ns variables.
    PolyE lifted(ns);
    for (auto& term : G.terms) {
      PolyE m = PolyE::constant(ns, term.c);
      for (int v = 0; v < sys.s; ++v)
        if (term.e[v] > 0) m = m.times(generic[v].pow(term.e[v], K.one(), &K), &K);
      lifted = lifted.plus(m, &K);
    }
    for (int j = 0; j < n; ++j) {
      PolyZ star(ns);
      for (auto& term : lifted.terms) {
        Rat tr;
        for (int k = 0; k < n; ++k) tr += term.c.c[k] * K.trace_matrix(j, k);
        if (tr.is_zero()) continue;
        if (!tr.is_integer())
          throw std::invalid_argument("Weil restriction produced a non-integer coefficient; "
                                      "system coefficients must be integral coordinate vectors");
        star.add_term(term.e, tr.num());
      }
      star.normalize();
      ws.star_forms.push_back(star.degree_part(d));
      ws.star.push_back(std::move(star));
      ws.index.emplace_back(d, i, j);
    }
  }
  return ws;
}

std::vector<Elem> evaluate(const NumberField& K, const PolySystem& sys, std::span<const Elem> x,
                           const IdealLattice* modulus) {
  if (int(x.size()) != sys.s) throw std::invalid_argument("evaluation point dimension mismatch");
  std::vector<Elem> out;
  out.reserve(sys.flat.size());
  for (auto& [d, i] : sys.flat) {
    Elem v = sys.polys[d][i].eval(x, &K);
    if (modulus) {
      if (!v.is_integral()) throw std::invalid_argument("cannot reduce a non-integral value");
      ZVec zi(K.n);
      for (int k = 0; k < K.n; ++k) zi[k] = v.c[k].num();
      out.push_back(K.from_ints(hnf_reduce(modulus->hnf, zi)));
    } else {
      out.push_back(std::move(v));
    }
  }
  return out;
}

VariableSplit variable_split(const NumberField& K, const PolySystem& sys) {
  VariableSplit vs;
  vs.per_var.assign(sys.s, std::vector<PolyE>(sys.flat.size(), PolyE(sys.s)));
  vs.constants.assign(sys.flat.size(), Elem(K.n));
  for (size_t fi = 0; fi < sys.flat.size(); ++fi) {
    auto [d, i] = sys.flat[fi];
    for (auto& term : sys.polys[d][i].terms) {
      int touched = -1, count = 0;
      for (int v = 0; v < sys.s; ++v)
        if (term.e[v] > 0) {
          touched = v;
          ++count;
        }
      if (count > 1) {
        vs.separable = false;
        vs.offending = monomial_str(term.e);
        return vs;
      }
      if (count == 0)
        vs.constants[fi] = add(vs.constants[fi], term.c);
      else
        vs.per_var[touched][fi].terms.push_back(term);
    }
  }
  vs.separable = true;
  return vs;
}

GroupSplit group_split(const WeilSystem& ws) {
  GroupSplit gs;
  int n = ws.n;
  gs.per_group.assign(ws.s, std::vector<PolyZ>(ws.star.size(), PolyZ(ws.ns())));
  gs.constants.assign(ws.star.size(), 0);
  for (size_t si = 0; si < ws.star.size(); ++si) {
    for (auto& term : ws.star[si].terms) {
      int group = -1;
      bool multi = false;
      for (int v = 0; v < ws.ns(); ++v)
        if (term.e[v] > 0) {
          int g = v / n;
          if (group < 0) group = g;
          else if (group != g) multi = true;
        }
      if (multi) {
        gs.separable = false;
        gs.offending = monomial_str(term.e);
        return gs;
      }
      if (group < 0)
        gs.constants[si] = narrow(i128(gs.constants[si]) + term.c, "group_split");
      else
        gs.per_group[group][si].terms.push_back(term);
    }
  }
  gs.separable = true;
  return gs;
}

}  // namespace circlelab
