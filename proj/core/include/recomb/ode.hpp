#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "recomb/distribution.hpp"
#include "recomb/kernel.hpp"
#include "recomb/recombination.hpp"

namespace recomb {

struct StepDiagnostics {
  double t = 0.0;
  double mass_defect = 0.0;
  double max_marginal_drift = 0.0;
  double tv_to_pi = 0.0;
  double relative_entropy_to_pi = 0.0;
};

struct SolveTrace {
  std::vector<double> times;
  std::vector<Distribution> states;
  std::vector<StepDiagnostics> diagnostics;

  const Distribution& final_state() const { return states.back(); }
};

struct EvolveOptions {
  static constexpr double kMaxStep = 0.05;
  double dt = 0.01;
  /// Record every `record_stride`-th step; the final time is always recorded.
  std::size_t record_stride = 1;
  double invariant_tolerance = 1e-9;
};

/// Classical RK4 for dp/dt = Q(p) - p on a uniform grid of ceil(t_end/dt)
/// steps ending exactly at t_end. Mass and single-site marginals are checked
/// at every recorded point.
SolveTrace evolve(const Distribution& p0, const RecombinationMeasure& nu, double t_end, EvolveOptions options = {});
/// Final state only.
Distribution evolve_to(const Distribution& p0, const RecombinationMeasure& nu, double t_end, double dt = 0.01);

/// Q^(f, g) = f o g - (|f| g + |g| f) / 2, with |f| the total mass.
Signed qhat(const CollisionOperator& op, std::span<const double> f, std::span<const double> g);
Signed qhat(const SpaceShape& shape, std::span<const double> f, std::span<const double> g,
            const RecombinationMeasure& nu);

/// h_t solving dh/dt = 2 Q^(q_t, h_t), with q_t co-integrated from q0 on the same RK4 grid.
Signed linearized_evolve(const Distribution& q0, std::span<const double> h0, const RecombinationMeasure& nu, double t,
                         double dt = 0.01);

}  // namespace recomb
