#pragma once

#include <cstddef>
#include <vector>

#include "recomb/distribution.hpp"
#include "recomb/kernel.hpp"

namespace recomb {

/// Memoized Wild recursion p^(k) = 1/(k-1) sum_{j=1}^{k-1} p^(j) o p^(k-j).
class WildExpansion {
 public:
  static constexpr std::size_t kMaxTerms = 10000;

  WildExpansion(const Distribution& p0, const RecombinationMeasure& nu);

  /// p^(k) for k >= 1.
  const Signed& term(std::size_t k);
  Distribution term_distribution(std::size_t k);
  std::size_t computed() const { return terms_.size(); }

 private:
  SpaceShape shape_;
  CollisionOperator op_;
  std::vector<Signed> terms_;  // terms_[k-1] = p^(k)
};

Distribution wild_term(const Distribution& p0, const RecombinationMeasure& nu, std::size_t k);

struct WildSum {
  Distribution p;
  std::size_t terms = 0;  // truncation depth K
  double tail = 0.0;      // (1 - e^{-t})^K, the discarded weight
};

/// Smallest K with (1 - e^{-t})^K <= tol.
std::size_t wild_truncation(double t, double tol);
/// Truncated and renormalized Wild sum at time t.
WildSum wild_sum(const Distribution& p0, const RecombinationMeasure& nu, double t, double tol);

}  // namespace recomb
