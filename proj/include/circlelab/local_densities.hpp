#pragma once

#include <complex>
#include <map>
#include <optional>

#include "circlelab/cyclotomic.hpp"
#include "circlelab/polysys.hpp"

namespace circlelab {

struct SigmaOptions {
  i64 enumeration_budget = 200'000'000;  // quotient points visited
  i64 cyclotomic_cutoff = 2048;          // exact bookkeeping up to this conductor
};

struct SigmaValue {
  std::complex<double> value;
  i64 conductor = 1;
  std::optional<CycloSum> exact;  // phase histogram when the conductor is small
  i64 terms = 0;                  // quotient points summed
};

/// Complete character sum over (n / a_gamma n)^s with exact rational phases.
SigmaValue complete_sum_sigma(const NumberField& K, const PolySystem& sys,
                              std::span<const Elem> gamma, const SigmaOptions& opt = {});

struct LocalFactor {
  i64 p = 0;
  i64 prime_norm = 1;
  int depth = 0;                 // deepest level actually computed
  std::vector<i64> rho;          // rho[j], j = 0..depth (rho[0] = 1)
  std::vector<Rat> counting;     // depth-j factor rho_j / Np^{j(s-T)}
  std::vector<std::complex<double>> sigma_route;  // same partial sums via character sums
  bool sigma_available = false;
  bool exact_match = false;      // cyclotomic identity verified exactly
  double agreement = 0.0;        // |counting - sigma| at the deepest level
  bool stabilized = false;       // last increment below tolerance
};

struct DensityOptions {
  int depth = 4;
  i64 convolution_budget = 600'000'000;  // ~ m^2 * s work cap per level
  i64 enumeration_budget = 100'000'000;  // used by the non-separable path
  i64 cyclotomic_cutoff = 2048;
  i64 sigma_float_cutoff = 20000;        // run the float character route up to this modulus
  double stabilization_tol = 1e-9;
};

/// Euler-side data at one prime: solution counts modulo prime powers and the
/// character-sum route, cross-checked against each other.
LocalFactor local_density(const NumberField& K, const PolySystem& sys, const PrimeIdeal& prime,
                          const DensityOptions& opt = {});

struct DensityReport {
  double gamma_sum = 0.0;       // sum over arc centres of Sigma(gamma)/Na^s, norm <= H
  double gamma_sum_imag = 0.0;  // conjugate-pairing leftover, should vanish
  double euler_product = 0.0;   // truncated product over primes up to the cutoff
  double support_matched = 0.0; // Euler data restricted to ideals of norm <= H
  double agreement_delta = 0.0; // |gamma_sum - support_matched|
  bool exact_match = false;     // the support-matched identity verified exactly
  std::vector<LocalFactor> factors;
  std::vector<std::pair<double, double>> H_sweep;  // (H, gamma_sum(H))
  double tail_fit = 0.0;        // log2 slope of successive sweep increments
  bool hypothesis_ok = true;    // caller-provided; false marks the report exploratory
  i64 H = 0;
  i64 prime_cutoff = 0;
};

struct SeriesOptions {
  i64 H = 16;
  i64 prime_cutoff = 100;
  DensityOptions density;
  SigmaOptions sigma;
  int threads = 0;
  bool hypothesis_ok = true;
};

DensityReport singular_series(const NumberField& K, const PolySystem& sys, const SeriesOptions& opt = {});

}  // namespace circlelab
