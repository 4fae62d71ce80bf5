#pragma once

#include <cstddef>
#include <vector>

#include "recomb/distribution.hpp"

namespace recomb {

int hamming(const SpaceShape& shape, std::size_t a, std::size_t b);

/// Optimal coupling over support(p) x support(q) for the Hamming cost.
struct TransportPlan {
  std::vector<std::size_t> sources;  // support of p
  std::vector<std::size_t> targets;  // support of q
  std::vector<double> flow;          // row-major sources x targets
  double cost = 0.0;

  double at(std::size_t i, std::size_t j) const { return flow[i * targets.size() + j]; }
};

/// Successive shortest paths with Dijkstra and node potentials.
TransportPlan optimal_transport(const Distribution& p, const Distribution& q);

/// W(p, q) for the Hamming ground cost. Raises an invariant violation if
/// tv <= W <= n tv fails beyond 1e-12.
double wasserstein(const Distribution& p, const Distribution& q);

}  // namespace recomb
