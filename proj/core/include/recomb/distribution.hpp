#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "recomb/space.hpp"

namespace recomb {

/// Signed dense array over a configuration space (perturbations, kernel outputs).
using Signed = std::vector<double>;

/// Dense probability vector over a SpaceShape.
class Distribution {
 public:
  Distribution() = default;
  /// Validates: sum within 1e-12 of 1, entries >= -1e-15. Entries in [-1e-15, 0)
  /// are clamped to zero and the vector renormalized.
  Distribution(SpaceShape shape, std::vector<double> probs);

  static Distribution uniform(const SpaceShape& shape);
  static Distribution point(const SpaceShape& shape, std::size_t config);
  /// Product measure; marginals[i] has q_i + 1 entries.
  static Distribution product(const SpaceShape& shape, const std::vector<std::vector<double>>& marginals);
  /// Normalizes non-negative weights.
  static Distribution from_weights(const SpaceShape& shape, std::vector<double> weights);

  const SpaceShape& shape() const { return shape_; }
  std::size_t size() const { return probs_.size(); }
  const std::vector<double>& probs() const { return probs_; }
  double operator[](std::size_t config) const { return probs_[config]; }

  std::vector<double> site_marginal(int site) const;
  std::vector<std::vector<double>> site_marginals() const;
  /// The stationary product measure with the single-site marginals of this law.
  Distribution product_of_marginals() const;

 private:
  SpaceShape shape_;
  std::vector<double> probs_;
};

/// Marginal on the sites of A, as a distribution over shape.restrict(A).
Distribution marginal(const Distribution& p, SubsetMask A);
/// pA (on restrict(A)) tensored with pAc (on restrict(A^c)), on `full`.
Distribution tensor(const SpaceShape& full, SubsetMask A, const Distribution& pA, const Distribution& pAc);

/// Marginal of a signed array over shape.
Signed marginal_signed(const SpaceShape& shape, std::span<const double> f, SubsetMask A);
double total_mass(std::span<const double> f);

/// Maximum absolute difference between the single-site marginals of two arrays.
double max_marginal_drift(const SpaceShape& shape, std::span<const double> a, std::span<const double> b);

}  // namespace recomb
