#pragma once

#include <optional>

#include "circlelab/polysys.hpp"

namespace circlelab {

enum class CountEngine { direct, mitm };

struct CountJob {
  const NumberField* K = nullptr;
  const PolySystem* sys = nullptr;
  const WeilSystem* ws = nullptr;
  BoxRegion box;  // ns bounds
  Rat P = Rat(1);
  CountEngine engine = CountEngine::direct;
  // Bipartition of the field variables (0-based) for the mitm engine.
  std::optional<std::pair<std::vector<int>, std::vector<int>>> split;
  i64 budget = 1'000'000'000;
  int threads = 0;
};

/// Integer coordinate ranges of the scaled box, closed bounds.
struct ScaledBox {
  std::vector<i64> lo, hi;
  i128 points() const {
    i128 t = 1;
    for (size_t i = 0; i < lo.size(); ++i) {
      if (hi[i] < lo[i]) return 0;
      t *= (hi[i] - lo[i] + 1);
    }
    return t;
  }
};
ScaledBox scale_box(const BoxRegion& box, const Rat& P);

/// Exhaustive count of common zeros over the lattice points of the scaled box.
i64 count_direct(const CountJob& job);

/// Meet-in-the-middle count: tabulate the value tuple of the left half and
/// match the negated right half. Requires an additively separable split.
i64 count_mitm(const CountJob& job);

/// Points of bounded height on the rank-deficiency locus of the polar-form
/// matrix in degree d: tuples (x_1..x_{d-1}) with every |x_i| <= P and
/// rank (F_{d,i}(x_1|...|x_{d-1}|v_j))_{i,j} < t_d.
i64 count_singular_multilinear(const NumberField& K, const PolySystem& sys, int d, const Rat& P,
                               i64 budget = 200'000'000);

}  // namespace circlelab
