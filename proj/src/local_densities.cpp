#include "circlelab/local_densities.hpp"

#include <cmath>
#include <numbers>

#include "circlelab/parallel.hpp"

namespace circlelab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Integer trace pairing: Tr(gamma * mu) = (a^T Omega mu) / L for gamma with
// coordinates a/L and integral mu. Returns the numerator mod L.
struct PhasePairing {
  i64 L = 1;
  std::vector<std::vector<i64>> w;  // per flat poly: row vector a^T Omega mod L

  PhasePairing(const NumberField& K, std::span<const Elem> gamma, i64 conductor) : L(conductor) {
    int n = K.n;
    for (const auto& g : gamma) {
      std::vector<i64> a(n), row(n, 0);
      for (int k = 0; k < n; ++k) {
        Rat scaled = g.c[k] * Rat(L);
        if (!scaled.is_integer()) throw std::logic_error("conductor does not clear the denominators");
        a[k] = scaled.num();
      }
      for (int l = 0; l < n; ++l) {
        i128 acc = 0;
        for (int k = 0; k < n; ++k) {
          Rat om = K.trace_matrix(k, l);
          if (!om.is_integer()) throw std::invalid_argument("integral trace matrix required");
          acc += i128(a[k]) * om.num();
        }
        row[l] = i64(((acc % L) + L) % L);
      }
      w.push_back(std::move(row));
    }
  }

  i64 contrib(size_t flat, std::span<const i64> mu) const {
    i128 acc = 0;
    for (size_t l = 0; l < mu.size(); ++l) acc += i128(w[flat][l]) * mu[l];
    return i64(((acc % L) + L) % L);
  }
};

std::vector<i64> elem_ints(const Elem& e) {
  std::vector<i64> v(size_t(e.n()));
  for (int i = 0; i < e.n(); ++i) {
    if (!e.c[i].is_integer()) throw std::logic_error("integral element expected");
    v[size_t(i)] = e.c[i].num();
  }
  return v;
}

// Precomputed per-variable values of the single-variable parts at every
// representative of the quotient.
struct LevelValues {
  i64 m = 1;                      // quotient size
  std::vector<Elem> reps;         // canonical representatives
  // vals[var][rep * flat_count + flat] = integer coords of g_{flat,var}(rep)
  std::vector<std::vector<std::vector<i64>>> vals;
  std::vector<std::vector<i64>> const_vals;  // [flat] coords of the constant part
};

LevelValues build_level_values(const NumberField& K, const PolySystem& sys, const VariableSplit& split,
                               const IdealLattice& lat) {
  LevelValues lv;
  lv.reps = residue_system(K, lat, ResidueMode::quotient_of_n);
  lv.m = i64(lv.reps.size());
  size_t nf = sys.flat.size();
  lv.vals.assign(size_t(sys.s), {});
  for (int var = 0; var < sys.s; ++var) {
    auto& tbl = lv.vals[size_t(var)];
    tbl.assign(lv.reps.size() * nf, {});
    for (size_t r = 0; r < lv.reps.size(); ++r) {
      std::vector<Elem> point(size_t(sys.s), Elem(K.n));
      point[size_t(var)] = lv.reps[r];
      for (size_t fi = 0; fi < nf; ++fi) {
        Elem v = split.per_var[size_t(var)][fi].eval(std::span<const Elem>(point), &K);
        tbl[r * nf + fi] = elem_ints(v);
      }
    }
  }
  for (size_t fi = 0; fi < nf; ++fi) lv.const_vals.push_back(elem_ints(split.constants[fi]));
  return lv;
}

// dst[x (+) shift] += src[x] over the product of cyclic groups with the given
// digit sizes (strides right-to-left).
void shifted_add(std::vector<i128>& dst, const std::vector<i128>& src, const std::vector<i64>& dims,
                 const std::vector<i64>& strides, const std::vector<i64>& shift) {
  int nd = int(dims.size());
  std::vector<i64> digit(size_t(nd), 0), ddig(size_t(nd));
  i64 dst_idx = 0;
  for (int k = 0; k < nd; ++k) {
    ddig[size_t(k)] = ((shift[size_t(k)] % dims[size_t(k)]) + dims[size_t(k)]) % dims[size_t(k)];
    dst_idx += ddig[size_t(k)] * strides[size_t(k)];
  }
  size_t R = src.size();
  for (size_t s_i = 0; s_i < R;) {
    dst[size_t(dst_idx)] += src[s_i];
    ++s_i;
    int k = nd - 1;
    while (k >= 0) {
      if (++digit[size_t(k)] < dims[size_t(k)]) {
        if (++ddig[size_t(k)] == dims[size_t(k)]) {
          ddig[size_t(k)] = 0;
          dst_idx -= (dims[size_t(k)] - 1) * strides[size_t(k)];
        } else {
          dst_idx += strides[size_t(k)];
        }
        break;
      }
      digit[size_t(k)] = 0;
      i64 target = ((shift[size_t(k)] % dims[size_t(k)]) + dims[size_t(k)]) % dims[size_t(k)];
      dst_idx += (target - ddig[size_t(k)]) * strides[size_t(k)];
      ddig[size_t(k)] = target;
      --k;
    }
    if (k < 0) break;
  }
}

struct QuotientCtx {
  QuotientShape shape;
  std::vector<i64> dims;     // SNF digits repeated per flat-poly component
  std::vector<i64> strides;  // right-to-left
  i64 cells = 1;
  int n = 1;
  size_t nf = 1;

  QuotientCtx(const NumberField& K, const IdealLattice& lat, size_t flat_count) {
    n = K.n;
    nf = flat_count;
    shape = diagonalize_quotient(lat.hnf, n);
    for (size_t fi = 0; fi < nf; ++fi)
      for (int k = 0; k < n; ++k) dims.push_back(shape.diag[size_t(k)]);
    strides.assign(dims.size(), 1);
    for (int k = int(dims.size()) - 2; k >= 0; --k)
      strides[size_t(k)] = narrow(i128(strides[size_t(k + 1)]) * dims[size_t(k + 1)], "quotient cells");
    cells = narrow(i128(strides[0]) * dims[0], "quotient cells");
  }

  // SNF digits of one element's integer coordinates.
  void digits_of(std::span<const i64> x, std::span<i64> out) const {
    for (int j = 0; j < n; ++j) {
      i128 acc = 0;
      for (int i = 0; i < n; ++i) acc += i128(x[size_t(i)]) * shape.F[size_t(i)][size_t(j)];
      i64 d = shape.diag[size_t(j)];
      out[size_t(j)] = i64(((acc % d) + d) % d);
    }
  }
};

// Exact solution counts rho[j'] for j' = 0..depth of the system modulo the
// prime-power lattices, by per-variable distribution convolution (separable)
// or plain enumeration.
std::vector<i64> rho_counts(const NumberField& K, const PolySystem& sys, const VariableSplit& split,
                            const std::vector<IdealLattice>& levels, const DensityOptions& opt) {
  std::vector<i64> rho{1};
  for (size_t j = 1; j < levels.size(); ++j) {
    const IdealLattice& lat = levels[j];
    i64 m = lat.norm;
    size_t nf = sys.flat.size();
    if (split.separable) {
      double cost = double(m) * double(m) * sys.s;
      double cells_est = std::pow(double(m), double(nf));
      if (cost > double(opt.convolution_budget) || cells_est > double(1LL << 26)) break;
      QuotientCtx q(K, lat, nf);
      LevelValues lv = build_level_values(K, sys, split, lat);

      std::vector<i128> acc(size_t(q.cells), 0);
      {
        std::vector<i64> shift(q.dims.size(), 0);
        i64 idx = 0;
        std::vector<i64> dig(size_t(q.n));
        for (size_t fi = 0; fi < nf; ++fi) {
          q.digits_of(lv.const_vals[fi], dig);
          for (int k = 0; k < q.n; ++k) idx += dig[size_t(k)] * q.strides[fi * q.n + size_t(k)];
        }
        acc[size_t(idx)] = 1;
      }
      std::vector<i128> next(size_t(q.cells));
      std::vector<i64> shift(q.dims.size());
      std::vector<i64> dig(size_t(q.n));
      for (int var = 0; var < sys.s; ++var) {
        std::fill(next.begin(), next.end(), i128(0));
        for (i64 r = 0; r < lv.m; ++r) {
          for (size_t fi = 0; fi < nf; ++fi) {
            q.digits_of(lv.vals[size_t(var)][size_t(r) * nf + fi], dig);
            for (int k = 0; k < q.n; ++k) shift[fi * size_t(q.n) + size_t(k)] = dig[size_t(k)];
          }
          shifted_add(next, acc, q.dims, q.strides, shift);
        }
        std::swap(acc, next);
      }
      rho.push_back(narrow(acc[0], "rho"));
    } else {
      double points = std::pow(double(m), double(sys.s));
      if (points > double(opt.enumeration_budget)) break;
      auto reps = residue_system(K, lat, ResidueMode::quotient_of_n);
      std::vector<size_t> idx(size_t(sys.s), 0);
      std::vector<Elem> x(size_t(sys.s), Elem(K.n));
      for (int v = 0; v < sys.s; ++v) x[size_t(v)] = reps[0];
      i64 count = 0;
      while (true) {
        auto vals = evaluate(K, sys, x, &lat);
        bool zero = true;
        for (auto& v : vals) zero = zero && v.is_zero();
        if (zero) ++count;
        int v = sys.s - 1;
        while (v >= 0) {
          if (++idx[size_t(v)] < reps.size()) {
            x[size_t(v)] = reps[idx[size_t(v)]];
            break;
          }
          idx[size_t(v)] = 0;
          x[size_t(v)] = reps[0];
          --v;
        }
        if (v < 0) break;
      }
      rho.push_back(count);
    }
  }
  return rho;
}

struct SigmaLevelSums {
  std::vector<std::complex<double>> level;  // sum over exact-level tuples of Sigma(gamma)
  std::vector<std::optional<CycloSum>> level_exact;
};

// Character-sum side: for each level j' <= depth, the sum of Sigma(gamma)
// over tuples gamma with denominator ideal exactly the j'-th power.
SigmaLevelSums sigma_level_sums(const NumberField& K, const PolySystem& sys, const VariableSplit& split,
                                const std::vector<IdealLattice>& levels, const DensityOptions& opt,
                                int threads) {
  SigmaLevelSums out;
  out.level.assign(levels.size(), {0.0, 0.0});
  out.level_exact.assign(levels.size(), std::nullopt);
  out.level[0] = {1.0, 0.0};
  if (levels.empty()) return out;
  {
    CycloSum one(1);
    one.add_phase(0, 1);
    out.level_exact[0] = one;
  }
  if (!split.separable) return out;  // the float route below is per-variable

  size_t nf = sys.flat.size();
  for (size_t j = 1; j < levels.size(); ++j) {
    const IdealLattice& lat = levels[j];
    i64 m = lat.norm;
    if (m > opt.sigma_float_cutoff) break;
    double tuple_count = std::pow(double(m), double(nf));
    if (tuple_count * double(m) * sys.s > 4.0 * double(opt.convolution_budget)) break;

    LevelValues lv = build_level_values(K, sys, split, lat);
    auto frac = residue_system(K, lat, ResidueMode::fractional_in_R);
    // exact level of each fractional point: smallest j' with point * levels[j'] integral
    auto level_of = [&](const Elem& y) -> size_t {
      for (size_t jj = 0; jj + 1 < j; ++jj) {
        bool integral = true;
        for (const auto& row : levels[jj].hnf) {
          Elem prod = element_mul(K, y, K.from_ints(row));
          if (!prod.is_integral()) {
            integral = false;
            break;
          }
        }
        if (integral) return jj;
      }
      return j;
    };
    std::vector<size_t> plevel(frac.size());
    for (size_t i = 0; i < frac.size(); ++i) plevel[i] = level_of(frac[i]);

    bool exact_ok = m <= opt.cyclotomic_cutoff;
    // Enumerate tuples over nf components; keep those whose max level is j.
    std::vector<size_t> tidx(nf, 0);
    i64 tuples = 1;
    for (size_t fi = 0; fi < nf; ++fi) tuples = narrow(i128(tuples) * i64(frac.size()), "sigma tuples");

    std::vector<std::complex<double>> partial(size_t(tuples), {0.0, 0.0});
    std::vector<CycloSum> partial_exact;
    if (exact_ok) partial_exact.assign(size_t(tuples), CycloSum(m));
    std::vector<char> used(size_t(tuples), 0);

    // Phase table for the float route.
    std::vector<std::complex<double>> root(size_t(m));
    for (i64 k = 0; k < m; ++k)
      root[size_t(k)] = {std::cos(kTwoPi * double(k) / double(m)), std::sin(kTwoPi * double(k) / double(m))};

    run_chunks(tuples, threads, [&](long long tflat) {
      // decode tuple
      std::vector<size_t> comp(nf);
      long long rem = tflat;
      for (size_t fi = nf; fi-- > 0;) {
        comp[fi] = size_t(rem % i64(frac.size()));
        rem /= i64(frac.size());
      }
      size_t max_level = 0;
      for (size_t fi = 0; fi < nf; ++fi) max_level = std::max(max_level, plevel[comp[fi]]);
      if (max_level != j) return;
      used[size_t(tflat)] = 1;

      std::vector<Elem> gamma;
      for (size_t fi = 0; fi < nf; ++fi) gamma.push_back(frac[comp[fi]]);
      PhasePairing pp(K, gamma, m);

      // constant phase
      i64 cphase = 0;
      for (size_t fi = 0; fi < nf; ++fi) cphase = (cphase + pp.contrib(fi, lv.const_vals[fi])) % m;

      if (exact_ok) {
        CycloSum prod(m);
        prod.add_phase(cphase, 1);
        for (int var = 0; var < sys.s; ++var) {
          CycloSum h(m);
          for (i64 r = 0; r < lv.m; ++r) {
            i64 ph = 0;
            for (size_t fi = 0; fi < nf; ++fi) ph = (ph + pp.contrib(fi, lv.vals[size_t(var)][size_t(r) * nf + fi])) % m;
            h.add_phase(ph, 1);
          }
          prod = prod.convolved(h);
        }
        partial_exact[size_t(tflat)] = prod;
        partial[size_t(tflat)] = prod.value();
      } else {
        std::complex<double> prod = root[size_t(cphase)];
        for (int var = 0; var < sys.s; ++var) {
          KahanComplex ks;
          for (i64 r = 0; r < lv.m; ++r) {
            i64 ph = 0;
            for (size_t fi = 0; fi < nf; ++fi) ph = (ph + pp.contrib(fi, lv.vals[size_t(var)][size_t(r) * nf + fi])) % m;
            ks.add(root[size_t(ph)]);
          }
          prod *= ks.value();
        }
        partial[size_t(tflat)] = prod;
      }
    });

    KahanComplex total;
    CycloSum total_exact(m);
    for (i64 tf = 0; tf < tuples; ++tf) {
      if (!used[size_t(tf)]) continue;
      total.add(partial[size_t(tf)]);
      if (exact_ok) total_exact.accumulate(partial_exact[size_t(tf)]);
    }
    out.level[j] = total.value();
    if (exact_ok) out.level_exact[j] = total_exact;
  }
  return out;
}

}  // namespace

SigmaValue complete_sum_sigma(const NumberField& K, const PolySystem& sys,
                              std::span<const Elem> gamma, const SigmaOptions& opt) {
  if (int(gamma.size()) != sys.T) throw std::invalid_argument("gamma must have one component per polynomial");
  IdealLattice a = denominator_ideal(K, gamma);
  i64 m = a.norm;
  // conductor: lcm of coordinate denominators (divides the norm)
  i64 L = 1;
  for (const auto& g : gamma)
    for (auto& c : g.c) L = lcm64(L, c.den());

  SigmaValue sv;
  sv.conductor = L;
  double points = std::pow(double(m), double(sys.s));
  sv.terms = points <= 9.0e18 ? i64(points) : INT64_MAX;

  VariableSplit split = variable_split(K, sys);
  PhasePairing pp(K, gamma, L);

  if (split.separable) {
    LevelValues lv = build_level_values(K, sys, split, a);
    i64 cphase = 0;
    for (size_t fi = 0; fi < sys.flat.size(); ++fi) cphase = (cphase + pp.contrib(fi, lv.const_vals[fi])) % L;
    if (L <= opt.cyclotomic_cutoff) {
      CycloSum prod(L);
      prod.add_phase(cphase, 1);
      for (int var = 0; var < sys.s; ++var) {
        CycloSum h(L);
        for (i64 r = 0; r < lv.m; ++r) {
          i64 ph = 0;
          for (size_t fi = 0; fi < sys.flat.size(); ++fi)
            ph = (ph + pp.contrib(fi, lv.vals[size_t(var)][size_t(r) * sys.flat.size() + fi])) % L;
          h.add_phase(ph, 1);
        }
        prod = prod.convolved(h);
      }
      sv.exact = prod;
      sv.value = prod.value();
    } else {
      std::vector<std::complex<double>> root(size_t(L));
      for (i64 k = 0; k < L; ++k)
        root[size_t(k)] = {std::cos(kTwoPi * double(k) / double(L)), std::sin(kTwoPi * double(k) / double(L))};
      std::complex<double> prod = root[size_t(cphase)];
      for (int var = 0; var < sys.s; ++var) {
        KahanComplex ks;
        for (i64 r = 0; r < lv.m; ++r) {
          i64 ph = 0;
          for (size_t fi = 0; fi < sys.flat.size(); ++fi)
            ph = (ph + pp.contrib(fi, lv.vals[size_t(var)][size_t(r) * sys.flat.size() + fi])) % L;
          ks.add(root[size_t(ph)]);
        }
        prod *= ks.value();
      }
      sv.value = prod;
    }
    return sv;
  }

  if (points > double(opt.enumeration_budget))
    throw std::runtime_error("complete character sum budget exceeded (quotient too large)");
  auto reps = residue_system(K, a, ResidueMode::quotient_of_n);
  CycloSum hist(L);
  std::vector<size_t> idx(size_t(sys.s), 0);
  std::vector<Elem> x(size_t(sys.s), reps[0]);
  while (true) {
    auto vals = evaluate(K, sys, x);
    i64 ph = 0;
    for (size_t fi = 0; fi < vals.size(); ++fi) ph = (ph + pp.contrib(fi, elem_ints(vals[fi]))) % L;
    hist.add_phase(ph, 1);
    int v = sys.s - 1;
    while (v >= 0) {
      if (++idx[size_t(v)] < reps.size()) {
        x[size_t(v)] = reps[idx[size_t(v)]];
        break;
      }
      idx[size_t(v)] = 0;
      x[size_t(v)] = reps[0];
      --v;
    }
    if (v < 0) break;
  }
  sv.value = hist.value();
  if (L <= opt.cyclotomic_cutoff) sv.exact = hist;
  return sv;
}

LocalFactor local_density(const NumberField& K, const PolySystem& sys, const PrimeIdeal& prime,
                          const DensityOptions& opt) {
  LocalFactor lf;
  lf.p = prime.p;
  lf.prime_norm = prime.lat.norm;

  // Level lattices: powers of the prime.
  std::vector<IdealLattice> levels{unit_ideal(K)};
  for (int j = 1; j <= opt.depth; ++j) levels.push_back(ideal_mul(K, levels.back(), prime.lat));

  VariableSplit split = variable_split(K, sys);
  std::vector<i64> rho = rho_counts(K, sys, split, levels, opt);
  lf.depth = int(rho.size()) - 1;
  lf.rho = rho;
  for (int j = 0; j <= lf.depth; ++j) {
    Rat denom = Rat(lf.prime_norm).pow(j * (sys.s - sys.T));
    lf.counting.push_back(Rat(rho[size_t(j)]) / denom);
  }
  lf.stabilized = lf.depth >= 1 &&
                  std::abs((lf.counting[size_t(lf.depth)] - lf.counting[size_t(lf.depth - 1)]).to_double()) <
                      opt.stabilization_tol;

  // Character-sum route with exact verification at small conductors.
  levels.resize(size_t(lf.depth) + 1);
  SigmaLevelSums sls = sigma_level_sums(K, sys, split, levels, opt, 0);
  int sigma_depth = 0;
  for (size_t j = 1; j < levels.size(); ++j) {
    i64 m = levels[j].norm;
    if (!split.separable || m > opt.sigma_float_cutoff) break;
    double tuple_count = std::pow(double(m), double(sys.flat.size()));
    if (tuple_count * double(m) * sys.s > 4.0 * double(opt.convolution_budget)) break;
    sigma_depth = int(j);
  }
  if (sigma_depth >= 1) {
    lf.sigma_available = true;
    std::complex<double> acc = {1.0, 0.0};
    lf.sigma_route.push_back(acc);
    for (int j = 1; j <= sigma_depth; ++j) {
      double scale = std::pow(double(lf.prime_norm), -double(j) * sys.s);
      acc += sls.level[size_t(j)] * scale;
      lf.sigma_route.push_back(acc);
    }
    int jc = std::min(sigma_depth, lf.depth);
    lf.agreement = std::abs(lf.sigma_route[size_t(jc)] - std::complex<double>(lf.counting[size_t(jc)].to_double(), 0.0));

    // Exact identity at the deepest level where the histograms exist:
    // sum_{j'<=j} Np^{(j-j')s} C_{j'} == rho_j * Np^{jT}.
    int je = 0;
    for (int j = 1; j <= jc; ++j)
      if (sls.level_exact[size_t(j)].has_value()) je = j;
    if (je >= 1) {
      i64 conductor = levels[size_t(je)].norm;
      CycloSum total(conductor);
      bool liftable = true;
      for (int j2 = 0; j2 <= je; ++j2) {
        if (!sls.level_exact[size_t(j2)]) { liftable = false; break; }
        const CycloSum& cs = *sls.level_exact[size_t(j2)];
        if (conductor % cs.m != 0) { liftable = false; break; }
        CycloSum lifted = cs.lifted(conductor);
        i128 scale = 1;
        for (int t = 0; t < (je - j2) * sys.s; ++t) scale *= lf.prime_norm;
        lifted.scale(scale);
        total.accumulate(lifted);
      }
      if (liftable) {
        auto exact = total.exact_integer();
        i128 rhs = rho[size_t(je)];
        for (int t = 0; t < je * sys.T; ++t) rhs *= lf.prime_norm;
        lf.exact_match = exact.has_value() && *exact == rhs;
      }
    }
  }
  return lf;
}

DensityReport singular_series(const NumberField& K, const PolySystem& sys, const SeriesOptions& opt) {
  DensityReport rep;
  rep.H = opt.H;
  rep.prime_cutoff = opt.prime_cutoff;
  rep.hypothesis_ok = opt.hypothesis_ok;

  // Euler factors for all primes of norm <= cutoff, depth extended so that
  // every prime power of norm <= H is covered.
  std::vector<PrimeIdeal> primes;
  for (i64 p = 2; p <= opt.prime_cutoff; ++p) {
    bool is_p = true;
    for (i64 d = 2; d * d <= p; ++d)
      if (p % d == 0) is_p = false;
    if (!is_p) continue;
    for (auto& pi : primes_above(K, p))
      if (pi.lat.norm <= opt.prime_cutoff) primes.push_back(pi);
  }
  std::sort(primes.begin(), primes.end(),
            [](const PrimeIdeal& a, const PrimeIdeal& b) { return a.lat.hnf < b.lat.hnf; });

  rep.factors.resize(primes.size());
  run_chunks(i64(primes.size()), opt.threads, [&](long long i) {
    DensityOptions d = opt.density;
    int need = 0;
    i64 pw = 1;
    while (pw <= opt.H) {
      pw = narrow(i128(pw) * primes[size_t(i)].lat.norm, "series depth");
      if (pw <= opt.H) ++need;
    }
    d.depth = std::max(d.depth, need);
    rep.factors[size_t(i)] = local_density(K, sys, primes[size_t(i)], d);
  });

  double product = 1.0;
  for (auto& f : rep.factors) product *= f.counting.back().to_double();
  rep.euler_product = product;

  // gamma-side: all arc centres of denominator norm <= H.
  auto ideals = ideals_up_to(K, opt.H);
  struct PerIdeal {
    double re = 0, im = 0;
    std::optional<CycloSum> exact;
    i64 norm = 1;
  };
  std::vector<PerIdeal> per_ideal(ideals.size());
  run_chunks(i64(ideals.size()), opt.threads, [&](long long ii) {
    const auto& id = ideals[size_t(ii)];
    PerIdeal pi;
    pi.norm = id.norm;
    auto frac = residue_system(K, id.lat, ResidueMode::fractional_in_R);
    size_t nf = sys.flat.size();
    i64 tuples = 1;
    for (size_t fi = 0; fi < nf; ++fi) tuples = narrow(i128(tuples) * i64(frac.size()), "series tuples");
    KahanComplex sum;
    bool exact_ok = id.norm <= opt.sigma.cyclotomic_cutoff;
    CycloSum exact(id.norm);
    for (i64 tf = 0; tf < tuples; ++tf) {
      std::vector<Elem> gamma;
      long long rem = tf;
      for (size_t fi = nf; fi-- > 0;) {
        gamma.insert(gamma.begin(), frac[size_t(rem % i64(frac.size()))]);
        rem /= i64(frac.size());
      }
      IdealLattice dg = denominator_ideal(K, gamma);
      if (!(dg == id.lat)) continue;
      SigmaValue sv = complete_sum_sigma(K, sys, gamma, opt.sigma);
      sum.add(sv.value);
      if (exact_ok && sv.exact && id.norm % sv.exact->m == 0)
        exact.accumulate(sv.exact->lifted(id.norm));
      else
        exact_ok = false;
    }
    pi.re = sum.value().real();
    pi.im = sum.value().imag();
    if (exact_ok) pi.exact = exact;
    per_ideal[size_t(ii)] = std::move(pi);
  });

  // Factor lookup for the support-matched product.
  auto factor_of = [&](const PrimeIdeal& p) -> const LocalFactor* {
    for (size_t i = 0; i < primes.size(); ++i)
      if (primes[size_t(i)].lat.hnf == p.lat.hnf) return &rep.factors[size_t(i)];
    return nullptr;
  };

  KahanSum gsum, gsum_im, matched;
  bool exact_all = true;
  std::vector<std::pair<double, double>> sweep;
  std::vector<i64> marks;
  for (i64 h = 2; h <= opt.H; h *= 2) marks.push_back(h);
  if (marks.empty() || marks.back() != opt.H) marks.push_back(opt.H);
  size_t mark_at = 0;

  for (size_t ii = 0; ii < ideals.size(); ++ii) {
    const auto& id = ideals[size_t(ii)];
    while (mark_at < marks.size() && id.norm > marks[mark_at]) {
      sweep.emplace_back(double(marks[mark_at]), gsum.value());
      ++mark_at;
    }
    double scale = std::pow(double(id.norm), -double(sys.s));
    gsum.add(per_ideal[ii].re * scale);
    gsum_im.add(per_ideal[ii].im * scale);

    // Support-matched Euler term: product of per-prime increments.
    Rat g(1);
    bool have = true;
    for (auto& [p, e] : id.factors) {
      const LocalFactor* f = factor_of(p);
      if (!f || f->depth < e) {
        have = false;
        break;
      }
      Rat inc = f->counting[size_t(e)] - f->counting[size_t(e - 1)];
      g = g * inc;
    }
    if (have) matched.add(g.to_double());
    else exact_all = false;

    // Exact identity: sum over exact-denominator tuples == N^s * g.
    if (have && per_ideal[ii].exact) {
      auto lhs = per_ideal[ii].exact->exact_integer();
      Rat rhs = g * Rat(id.norm).pow(sys.s);
      if (!lhs || !rhs.is_integer() || *lhs != i128(rhs.num())) exact_all = false;
    } else {
      exact_all = false;
    }
  }
  while (mark_at < marks.size()) {
    sweep.emplace_back(double(marks[mark_at]), gsum.value());
    ++mark_at;
  }

  rep.gamma_sum = gsum.value();
  rep.gamma_sum_imag = gsum_im.value();
  rep.support_matched = matched.value();
  rep.agreement_delta = std::abs(rep.gamma_sum - rep.support_matched);
  rep.exact_match = exact_all;
  rep.H_sweep = sweep;

  // Tail behaviour from successive sweep increments.
  std::vector<std::pair<double, double>> pts;
  for (size_t i = 0; i + 1 < sweep.size(); ++i) {
    double inc = std::abs(sweep[i + 1].second - sweep[i].second);
    if (inc > 0) pts.emplace_back(std::log2(sweep[i + 1].first), std::log2(inc));
  }
  if (pts.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto& [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double nn = double(pts.size());
    rep.tail_fit = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  } else {
    rep.tail_fit = -99.0;  // increments vanished; series already stable
  }
  return rep;
}

}  // namespace circlelab
