#include "recomb/distribution.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "recomb/csv.hpp"
#include "recomb/error.hpp"

namespace recomb {

Distribution::Distribution(SpaceShape shape, std::vector<double> probs)
    : shape_(std::move(shape)), probs_(std::move(probs)) {
  require(probs_.size() == shape_.size(), "core-model",
          "probability vector has " + std::to_string(probs_.size()) + " entries, shape needs " +
              std::to_string(shape_.size()));
  bool clamped = false;
  for (double& x : probs_) {
    if (!std::isfinite(x)) fail(Error::Kind::invariant_violation, "core-model", "non-finite probability");
    if (x < -1e-15)
      fail(Error::Kind::invariant_violation, "core-model", "negative probability " + std::to_string(x));
    if (x < 0.0) {
      x = 0.0;
      clamped = true;
    }
  }
  const double sum = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  if (std::abs(sum - 1.0) > 1e-12)
    fail(Error::Kind::invariant_violation, "core-model", "probabilities sum to " + format_double(sum));
  if (clamped)
    for (double& x : probs_) x /= sum;
}

Distribution Distribution::uniform(const SpaceShape& shape) {
  return Distribution(shape, std::vector<double>(shape.size(), 1.0 / static_cast<double>(shape.size())));
}

Distribution Distribution::point(const SpaceShape& shape, std::size_t config) {
  require(config < shape.size(), "core-model", "configuration index out of range");
  std::vector<double> probs(shape.size(), 0.0);
  probs[config] = 1.0;
  return Distribution(shape, std::move(probs));
}

Distribution Distribution::product(const SpaceShape& shape, const std::vector<std::vector<double>>& marginals) {
  require(static_cast<int>(marginals.size()) == shape.sites(), "core-model", "one marginal per site required");
  for (int i = 0; i < shape.sites(); ++i)
    require(static_cast<int>(marginals[static_cast<std::size_t>(i)].size()) == shape.radix(i), "core-model",
            "marginal length mismatch at site " + std::to_string(i));
  std::vector<double> probs(shape.size());
  for (std::size_t c = 0; c < shape.size(); ++c) {
    double w = 1.0;
    for (int i = 0; i < shape.sites(); ++i)
      w *= marginals[static_cast<std::size_t>(i)][static_cast<std::size_t>(shape.letter(c, i))];
    probs[c] = w;
  }
  const double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
  for (double& x : probs) x /= sum;
  return Distribution(shape, std::move(probs));
}

Distribution Distribution::from_weights(const SpaceShape& shape, std::vector<double> weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  require(sum > 0.0, "core-model", "weights sum to zero");
  for (double& x : weights) {
    require(x >= 0.0, "core-model", "negative weight");
    x /= sum;
  }
  return Distribution(shape, std::move(weights));
}

std::vector<double> Distribution::site_marginal(int site) const {
  std::vector<double> m(static_cast<std::size_t>(shape_.radix(site)), 0.0);
  for (std::size_t c = 0; c < probs_.size(); ++c) m[static_cast<std::size_t>(shape_.letter(c, site))] += probs_[c];
  return m;
}

std::vector<std::vector<double>> Distribution::site_marginals() const {
  std::vector<std::vector<double>> out;
  out.reserve(static_cast<std::size_t>(shape_.sites()));
  for (int i = 0; i < shape_.sites(); ++i) out.push_back(site_marginal(i));
  return out;
}

Distribution Distribution::product_of_marginals() const { return product(shape_, site_marginals()); }

Signed marginal_signed(const SpaceShape& shape, std::span<const double> f, SubsetMask A) {
  const SpaceShape sub = shape.restrict(A);
  Signed out(sub.size(), 0.0);
  const auto table = shape.projection_table(A);
  for (std::size_t c = 0; c < f.size(); ++c) out[table[c]] += f[c];
  return out;
}

Distribution marginal(const Distribution& p, SubsetMask A) {
  require(A.subset_of(p.shape().all_sites()), "core-model", "subset has sites outside the shape");
  Signed m = marginal_signed(p.shape(), p.probs(), A);
  const double sum = std::accumulate(m.begin(), m.end(), 0.0);
  for (double& x : m) x /= sum;
  return Distribution(p.shape().restrict(A), std::move(m));
}

Distribution tensor(const SpaceShape& full, SubsetMask A, const Distribution& pA, const Distribution& pAc) {
  const SubsetMask Ac = A.complement(full.sites());
  require(pA.shape() == full.restrict(A) && pAc.shape() == full.restrict(Ac), "core-model",
          "tensor factors do not match the complementary sub-shapes");
  const auto ta = full.projection_table(A);
  const auto tc = full.projection_table(Ac);
  std::vector<double> probs(full.size());
  for (std::size_t c = 0; c < full.size(); ++c) probs[c] = pA[ta[c]] * pAc[tc[c]];
  return Distribution(full, std::move(probs));
}

double total_mass(std::span<const double> f) { return std::accumulate(f.begin(), f.end(), 0.0); }

double max_marginal_drift(const SpaceShape& shape, std::span<const double> a, std::span<const double> b) {
  double worst = 0.0;
  for (int i = 0; i < shape.sites(); ++i) {
    std::vector<double> d(static_cast<std::size_t>(shape.radix(i)), 0.0);
    for (std::size_t c = 0; c < a.size(); ++c) d[static_cast<std::size_t>(shape.letter(c, i))] += a[c] - b[c];
    for (double x : d) worst = std::max(worst, std::abs(x));
  }
  return worst;
}

}  // namespace recomb
