#pragma once

#include <complex>

#include "circlelab/polysys.hpp"

namespace circlelab {

struct QuadratureSpec {
  int inner_base_nodes = 32;   // per-axis nodes for the oscillatory box integral
  int inner_osc_nodes = 2;     // extra nodes per unit of |gamma|
  int outer_nodes_per_unit = 12;
  i64 tensor_budget = 200'000'000;
  int mc_samples = 200'000;   // outer Monte Carlo fallback beyond 2 outer dims
};

struct JValue {
  std::complex<double> value;
  double error_estimate = 0.0;  // node-doubling defect
};

/// Oscillatory box integral of e(sum gamma . F*(X)) over the box; gamma is
/// the flat (d,i,j) weight vector of length nT.
JValue eval_J(const NumberField& K, const WeilSystem& ws, std::span<const double> gamma,
              const BoxRegion& box, const QuadratureSpec& spec = {});

struct DensityEstimate {
  double value = 0.0;
  double ci_low = 0.0, ci_high = 0.0;
  double epsilon = 0.0;
  i64 hits = 0;
  i64 samples = 0;
};

/// Monte Carlo estimate of vol{X in box : |F*(X)| <= eps for all forms} /
/// (2 eps)^{nT}, with a nested eps sweep {eps, eps/2, eps/4}.
std::vector<DensityEstimate> real_density(const NumberField& K, const WeilSystem& ws,
                                          const BoxRegion& box, double epsilon, i64 samples,
                                          std::uint64_t seed, int threads = 0);

struct IntegralReport {
  double H = 0.0;
  std::vector<std::pair<double, double>> JH_sweep;  // (H', truncated integral)
  double JH = 0.0;          // value at the requested H
  double JH_imag = 0.0;     // should vanish by conjugate symmetry
  double quad_error = 0.0;  // accumulated node-doubling defect
  double tail_fit = 0.0;    // log2 slope of sweep increments
  bool mc_fallback = false;
  double mc_stderr = 0.0;
  std::vector<DensityEstimate> density;  // cross-estimator attachment
};

struct IntegralOptions {
  double H = 8.0;
  QuadratureSpec quad;
  double density_epsilon = 0.05;
  i64 density_samples = 10'000'000;
  std::uint64_t seed = 1;
  int threads = 0;
};

/// Truncated frequency-side integral with a dyadic sweep plus the real-density
/// cross-check. Outer dimension nT <= 2 runs tensor panels; beyond that a
/// Monte Carlo fallback kicks in with a reported standard error.
IntegralReport singular_integral(const NumberField& K, const PolySystem& sys, const WeilSystem& ws,
                                 const BoxRegion& box, const IntegralOptions& opt = {});

}  // namespace circlelab
