#pragma once

#include <map>
#include <optional>

#include "circlelab/polysys.hpp"

namespace circlelab {

struct HypothesisReport {
  std::map<int, int> B;       // d -> B_d as used (convention: 0 outside Delta)
  std::map<int, Rat> s_vals;  // s_d for d = 1..D+1
  std::map<int, Rat> lhs;     // left side of the main inequality, d in Delta u {0}
  std::map<int, bool> satisfied_d;
  bool satisfied = false;
  Rat margin;  // 1 - max lhs

  // Alternative evaluation with empty loci bumped to dimension 0.
  std::optional<std::map<int, Rat>> lhs_conservative;
  std::optional<bool> satisfied_conservative;

  // Single-degree reduction: s - B_D > t_D (t_D + 1) (D-1) 2^{D-1}.
  std::optional<bool> single_degree_condition;

  // Simplified sufficient bounds.
  std::vector<i64> u;          // u_d for d = 1..D+1 (index 0 unused)
  std::map<int, i64> s0_of;    // d in Delta u {0}
  i64 s0 = 0;
  std::optional<i64> B_max;
  std::optional<bool> simplified_condition;  // s > B_max + s0
  std::optional<bool> s0_display_bound;      // s0 + T - 1 <= (degree_sum - 1) 2^{degree_sum}
};

struct BdEstimate {
  int B = 0;
  std::string confidence;  // "asserted" | "fitted" | "exact-empty"
  std::vector<std::pair<i64, i64>> counts;  // (q, #points) pairs used for the fit
};

enum class BdMethod { user_override, finite_field_dimension };

/// Dimension of the rank-deficiency locus of the degree-d Jacobian of leading
/// forms, estimated from point counts over residue fields F_q at degree-one
/// primes q (or taken on faith from the caller).
BdEstimate estimate_Bd(const NumberField& K, const PolySystem& sys, int d, BdMethod method,
                       std::optional<int> user_value = std::nullopt,
                       std::vector<i64> primes = {}, i64 budget = 50'000'000);

/// Evaluates the main convergence inequality for every d in Delta u {0},
/// plus the single-degree reduction and the simplified bounds.
HypothesisReport check_main_hypothesis(const PolySystem& sys, const std::map<int, int>& B);

/// The u_d / s0 bookkeeping alone (no B required).
HypothesisReport corollary_bounds(const PolySystem& sys, const std::optional<std::map<int, int>>& B = {});

}  // namespace circlelab
