#include "circlelab/archimedean.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "circlelab/parallel.hpp"
#include "circlelab/rng.hpp"

namespace circlelab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct GLRule {
  std::vector<double> x, w;  // on [-1, 1]
};

const GLRule& gauss_legendre(int k) {
  static std::map<int, GLRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  GLRule rule;
  rule.x.resize(size_t(k));
  rule.w.resize(size_t(k));
  for (int i = 0; i < k; ++i) {
    // Newton from the Chebyshev initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (k + 0.5));
    for (int it2 = 0; it2 < 100; ++it2) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= k; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      double dp = k * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= k; ++j) {
      double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    double dp = k * (x * p1 - p0) / (x * x - 1.0);
    rule.x[size_t(i)] = x;
    rule.w[size_t(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(k, std::move(rule)).first->second;
}

// Weighted phase polynomial: sum over star polys of gamma[idx] * poly.
PolyD weighted_phase(const std::vector<PolyZ>& polys, std::span<const double> gamma, int nv) {
  PolyD acc(nv);
  for (size_t i = 0; i < polys.size(); ++i) {
    if (gamma[i] == 0.0) continue;
    for (auto& t : polys[i].terms) acc.add_term(t.e, gamma[i] * double(t.c));
  }
  acc.normalize();
  return acc;
}

// Tensor Gauss-Legendre of e(phase(X)) over the sub-box of the listed
// coordinates, at the given per-axis order.
std::complex<double> tensor_quad(const PolyD& phase, const BoxRegion& box,
                                 const std::vector<int>& coords, int nodes) {
  const GLRule& rule = gauss_legendre(nodes);
  int m = int(coords.size());
  std::vector<double> x(size_t(phase.nv), 0.0);
  std::vector<int> idx(size_t(m), 0);
  KahanComplex acc;
  std::vector<double> mid(size_t(m)), half(size_t(m));
  for (int i = 0; i < m; ++i) {
    auto [a, b] = box.bounds[size_t(coords[size_t(i)])];
    mid[size_t(i)] = (a + b).to_double() / 2.0;
    half[size_t(i)] = (b - a).to_double() / 2.0;
  }
  while (true) {
    double wt = 1.0;
    for (int i = 0; i < m; ++i) {
      x[size_t(coords[size_t(i)])] = mid[size_t(i)] + half[size_t(i)] * rule.x[size_t(idx[size_t(i)])];
      wt *= half[size_t(i)] * rule.w[size_t(idx[size_t(i)])];
    }
    double ph = 0.0;
    for (auto& t : phase.terms) {
      double mval = t.c;
      for (int v = 0; v < phase.nv; ++v)
        for (int e = 0; e < t.e[v]; ++e) mval *= x[size_t(v)];
      ph += mval;
    }
    acc.add(std::complex<double>(wt * std::cos(kTwoPi * ph), wt * std::sin(kTwoPi * ph)));
    int k = m - 1;
    while (k >= 0) {
      if (++idx[size_t(k)] < nodes) break;
      idx[size_t(k)] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return acc.value();
}

}  // namespace

JValue eval_J(const NumberField& K, const WeilSystem& ws, std::span<const double> gamma,
              const BoxRegion& box, const QuadratureSpec& spec) {
  if (int(gamma.size()) != int(ws.star_forms.size()))
    throw std::invalid_argument("gamma must carry one weight per restricted form");
  if (int(box.bounds.size()) != ws.ns()) throw std::invalid_argument("box dimension mismatch");
  int n = ws.n;

  double gnorm = 0.0;
  for (double g : gamma) gnorm = std::max(gnorm, std::abs(g));
  int nodes = spec.inner_base_nodes + spec.inner_osc_nodes * int(std::ceil(gnorm));

  // Separability of the restricted forms across field-variable groups.
  bool separable = true;
  for (auto& f : ws.star_forms)
    for (auto& t : f.terms) {
      int group = -1;
      for (int c = 0; c < ws.ns(); ++c)
        if (t.e[c] > 0) {
          if (group == -1) group = c / n;
          else if (group != c / n) separable = false;
        }
    }

  if (separable) {
    // Per-variable factor integrals, cached by the weighted sub-polynomial.
    std::map<std::vector<std::pair<std::vector<int>, double>>, std::pair<std::complex<double>, double>> cache;
    std::complex<double> prod = 1.0;
    double err = 0.0;
    for (int var = 0; var < ws.s; ++var) {
      PolyD sub(ws.ns());
      for (size_t fi = 0; fi < ws.star_forms.size(); ++fi) {
        if (gamma[fi] == 0.0) continue;
        for (auto& t : ws.star_forms[fi].terms) {
          bool mine = false;
          for (int j = 0; j < n; ++j) mine = mine || t.e[size_t(var * n + j)] > 0;
          if (mine) sub.add_term(t.e, gamma[fi] * double(t.c));
        }
      }
      sub.normalize();
      // signature: shift exponents to variable 0's block
      std::vector<std::pair<std::vector<int>, double>> sig;
      for (auto& t : sub.terms) {
        std::vector<int> e(size_t(n), 0);
        for (int j = 0; j < n; ++j) e[size_t(j)] = t.e[size_t(var * n + j)];
        sig.emplace_back(std::move(e), t.c);
      }
      // include the variable's own box in the signature comparison
      for (int j = 0; j < n; ++j) {
        auto [a, b] = box.bounds[size_t(var * n + j)];
        sig.emplace_back(std::vector<int>{-1 - j}, a.to_double());
        sig.emplace_back(std::vector<int>{-1 - j}, b.to_double());
      }
      auto it = cache.find(sig);
      std::complex<double> val;
      double verr;
      if (it != cache.end()) {
        val = it->second.first;
        verr = it->second.second;
      } else {
        std::vector<int> coords;
        for (int j = 0; j < n; ++j) coords.push_back(var * n + j);
        std::complex<double> v1 = tensor_quad(sub, box, coords, nodes);
        std::complex<double> v2 = tensor_quad(sub, box, coords, 2 * nodes);
        val = v2;
        verr = std::abs(v2 - v1);
        cache.emplace(std::move(sig), std::make_pair(val, verr));
      }
      // relative error propagation through the product
      err += verr;
      prod *= val;
    }
    return {prod, err};
  }

  // Full tensor grid with a budget guard.
  double cost = std::pow(double(2 * nodes), ws.ns());
  if (cost > double(spec.tensor_budget))
    throw std::runtime_error("oscillatory quadrature tensor budget exceeded");
  PolyD phase(ws.ns());
  for (size_t fi = 0; fi < ws.star_forms.size(); ++fi)
    for (auto& t : ws.star_forms[fi].terms)
      if (gamma[fi] != 0.0) phase.add_term(t.e, gamma[fi] * double(t.c));
  phase.normalize();
  std::vector<int> coords;
  for (int c = 0; c < ws.ns(); ++c) coords.push_back(c);
  std::complex<double> v1 = tensor_quad(phase, box, coords, nodes);
  std::complex<double> v2 = tensor_quad(phase, box, coords, 2 * nodes);
  return {v2, std::abs(v2 - v1)};
  (void)K;
  (void)gs;
}

std::vector<DensityEstimate> real_density(const NumberField& K, const WeilSystem& ws,
                                          const BoxRegion& box, double epsilon, i64 samples,
                                          std::uint64_t seed, int threads) {
  (void)K;
  int nv = ws.ns();
  if (int(box.bounds.size()) != nv) throw std::invalid_argument("box dimension mismatch");
  std::vector<double> lo(size_t(nv)), hi(size_t(nv));
  for (int c = 0; c < nv; ++c) {
    lo[size_t(c)] = box.bounds[size_t(c)].first.to_double();
    hi[size_t(c)] = box.bounds[size_t(c)].second.to_double();
  }
  CounterRng rng(seed);
  const double eps[3] = {epsilon, epsilon / 2.0, epsilon / 4.0};

  constexpr i64 kBatch = 1 << 16;
  i64 batches = (samples + kBatch - 1) / kBatch;
  std::vector<std::array<i64, 3>> hits(size_t(batches), {0, 0, 0});
  run_chunks(batches, threads, [&](long long b) {
    std::array<i64, 3> h{0, 0, 0};
    std::vector<double> x(size_t(nv));
    i64 from = b * kBatch, to = std::min(samples, from + kBatch);
    for (i64 s = from; s < to; ++s) {
      for (int c = 0; c < nv; ++c)
        x[size_t(c)] = rng.uniform(std::uint64_t(s) * nv + c, lo[size_t(c)], hi[size_t(c)]);
      double worst = 0.0;
      for (auto& f : ws.star_forms) worst = std::max(worst, std::abs(eval_d(f, x)));
      for (int k = 0; k < 3; ++k)
        if (worst <= eps[k]) ++h[size_t(k)];
    }
    hits[size_t(b)] = h;
  });
  std::array<i64, 3> total{0, 0, 0};
  for (auto& h : hits)
    for (int k = 0; k < 3; ++k) total[size_t(k)] += h[size_t(k)];

  double vol = box.volume();
  int nT = int(ws.star_forms.size());
  std::vector<DensityEstimate> out;
  for (int k = 0; k < 3; ++k) {
    DensityEstimate de;
    de.epsilon = eps[k];
    de.hits = total[size_t(k)];
    de.samples = samples;
    double scale = vol / std::pow(2.0 * eps[k], nT);
    double p = double(total[size_t(k)]) / double(samples);
    de.value = p * scale;
    if (total[size_t(k)] == 0) {
      de.ci_low = 0.0;
      de.ci_high = 3.0 / double(samples) * scale;
    } else {
      double half = 1.96 * std::sqrt(p * (1.0 - p) / double(samples));
      de.ci_low = std::max(0.0, (p - half)) * scale;
      de.ci_high = (p + half) * scale;
    }
    out.push_back(de);
  }
  return out;
}

IntegralReport singular_integral(const NumberField& K, const PolySystem& sys, const WeilSystem& ws,
                                 const BoxRegion& box, const IntegralOptions& opt) {
  (void)sys;
  IntegralReport rep;
  rep.H = opt.H;
  int nT = int(ws.star_forms.size());
  double H = opt.H;

  if (nT <= 2) {
    // Panel decomposition of the largest domain; each panel lands in the
    // smallest dyadic level that contains it, so one pass yields the sweep.
    std::vector<double> levels;
    if (nT == 1)
      levels = {H, 2 * H, 4 * H};
    else
      levels = {H / 4, H / 2, H};  // outer cost grows fast with nT
    double Hmax = levels.back();

    int per_unit = std::max(1, opt.quad.outer_nodes_per_unit / 4);
    i64 panels_axis = std::max<i64>(2, i64(std::ceil(2.0 * Hmax * per_unit / 4.0)));
    double panel_w = 2.0 * Hmax / double(panels_axis);
    i64 total_panels = 1;
    for (int d = 0; d < nT; ++d) total_panels *= panels_axis;

    int order = std::max(4, opt.quad.outer_nodes_per_unit / per_unit);
    const GLRule& rule = gauss_legendre(order);

    std::vector<KahanComplex> level_sum(levels.size());
    std::vector<KahanSum> level_err(levels.size());
    std::vector<std::vector<std::complex<double>>> panel_vals(size_t(total_panels));
    std::vector<double> panel_err(size_t(total_panels), 0.0);
    std::vector<int> panel_level(size_t(total_panels), -1);

    run_chunks(total_panels, opt.threads, [&](long long pidx) {
      // decode panel corner
      std::vector<i64> pidxs(size_t(nT));
      long long rem = pidx;
      for (int d = nT - 1; d >= 0; --d) {
        pidxs[size_t(d)] = rem % panels_axis;
        rem /= panels_axis;
      }
      std::vector<double> a(size_t(nT)), b(size_t(nT));
      double far = 0.0;
      for (int d = 0; d < nT; ++d) {
        a[size_t(d)] = -Hmax + panel_w * double(pidxs[size_t(d)]);
        b[size_t(d)] = a[size_t(d)] + panel_w;
        far = std::max(far, std::max(std::abs(a[size_t(d)]), std::abs(b[size_t(d)])));
      }
      int lvl = -1;
      for (size_t li = 0; li < levels.size(); ++li)
        if (far <= levels[li] + 1e-12) {
          lvl = int(li);
          break;
        }
      panel_level[size_t(pidx)] = lvl;
      if (lvl < 0) return;  // corner outside the largest level (cannot happen)

      KahanComplex acc;
      KahanSum errsum;
      std::vector<int> idx(size_t(nT), 0);
      std::vector<double> g(size_t(nT));
      while (true) {
        double wt = 1.0;
        for (int d = 0; d < nT; ++d) {
          double midp = 0.5 * (a[size_t(d)] + b[size_t(d)]);
          double halfw = 0.5 * (b[size_t(d)] - a[size_t(d)]);
          g[size_t(d)] = midp + halfw * rule.x[size_t(idx[size_t(d)])];
          wt *= halfw * rule.w[size_t(idx[size_t(d)])];
        }
        JValue jv = eval_J(K, ws, g, box, opt.quad);
        acc.add(wt * jv.value);
        errsum.add(std::abs(wt) * jv.error_estimate);
        int k = nT - 1;
        while (k >= 0) {
          if (++idx[size_t(k)] < order) break;
          idx[size_t(k)] = 0;
          --k;
        }
        if (k < 0) break;
      }
      panel_vals[size_t(pidx)] = {acc.value()};
      panel_err[size_t(pidx)] = errsum.value();
    });

    for (i64 p = 0; p < total_panels; ++p) {
      if (panel_level[size_t(p)] < 0 || panel_vals[size_t(p)].empty()) continue;
      level_sum[size_t(panel_level[size_t(p)])].add(panel_vals[size_t(p)][0]);
      level_err[size_t(panel_level[size_t(p)])].add(panel_err[size_t(p)]);
    }
    std::complex<double> run = 0.0;
    double err = 0.0;
    for (size_t li = 0; li < levels.size(); ++li) {
      run += level_sum[li].value();
      err += level_err[li].value();
      rep.JH_sweep.emplace_back(levels[li], run.real());
      if (std::abs(levels[li] - H) < 1e-9) {
        rep.JH = run.real();
        rep.JH_imag = run.imag();
        rep.quad_error = err;
      }
    }
  } else {
    // Monte Carlo over the outer box.
    rep.mc_fallback = true;
    CounterRng rng(opt.seed ^ 0xabcdef12345ULL);
    i64 N = opt.quad.mc_samples;
    KahanSum acc, acc2;
    std::vector<double> g(size_t(nT));
    for (i64 si = 0; si < N; ++si) {
      for (int d = 0; d < nT; ++d) g[size_t(d)] = rng.uniform(std::uint64_t(si) * nT + d, -H, H);
      double re = eval_J(K, ws, g, box, opt.quad).value.real();
      acc.add(re);
      acc2.add(re * re);
    }
    double vol = std::pow(2.0 * H, nT);
    double mean = acc.value() / double(N);
    double var = std::max(0.0, acc2.value() / double(N) - mean * mean);
    rep.JH = mean * vol;
    rep.mc_stderr = vol * std::sqrt(var / double(N));
    rep.JH_sweep.emplace_back(H, rep.JH);
  }

  // Tail slope from the sweep increments.
  std::vector<std::pair<double, double>> pts;
  for (size_t i = 0; i + 1 < rep.JH_sweep.size(); ++i) {
    double inc = std::abs(rep.JH_sweep[i + 1].second - rep.JH_sweep[i].second);
    if (inc > 0) pts.emplace_back(std::log2(rep.JH_sweep[i + 1].first), std::log2(inc));
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
    rep.tail_fit = -99.0;
  }

  rep.density = real_density(K, ws, box, opt.density_epsilon, opt.density_samples, opt.seed, opt.threads);
  return rep;
}

}  // namespace circlelab
