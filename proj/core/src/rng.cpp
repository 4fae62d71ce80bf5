#include "recomb/rng.hpp"

#include <algorithm>

#include "recomb/error.hpp"

namespace recomb {

DiscreteSampler::DiscreteSampler(std::span<const double> weights) : cumulative_(weights.size()) {
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    require(weights[i] >= 0.0, "core-model", "negative sampling weight");
    total += weights[i];
    cumulative_[i] = total;
  }
  require(total > 0.0, "core-model", "sampling weights sum to zero");
}

std::size_t DiscreteSampler::operator()(Rng& rng) const {
  const double u = rng.uniform() * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) --it;
  return static_cast<std::size_t>(it - cumulative_.begin());
}

}  // namespace recomb
