#include "recomb/wild.hpp"

#include <cmath>
#include <string>

#include "recomb/error.hpp"

namespace recomb {

WildExpansion::WildExpansion(const Distribution& p0, const RecombinationMeasure& nu)
    : shape_(p0.shape()), op_(p0.shape(), nu) {
  terms_.push_back(p0.probs());
}

const Signed& WildExpansion::term(std::size_t k) {
  require(k >= 1, "nonlinear-solver", "Wild terms are indexed from 1");
  if (k > kMaxTerms) fail(Error::Kind::cap_exceeded, "nonlinear-solver", "Wild term index above 10^4");
  while (terms_.size() < k) {
    const std::size_t m = terms_.size() + 1;
    Signed acc(shape_.size(), 0.0);
    // Commutativity pairs j with m - j; the middle term appears once.
    for (std::size_t j = 1; 2 * j <= m; ++j) {
      const Signed c = op_.convolve(terms_[j - 1], terms_[m - j - 1]);
      const double w = (2 * j == m) ? 1.0 : 2.0;
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * c[i];
    }
    const double inv = 1.0 / static_cast<double>(m - 1);
    for (double& x : acc) x *= inv;
    terms_.push_back(std::move(acc));
  }
  return terms_[k - 1];
}

Distribution WildExpansion::term_distribution(std::size_t k) {
  Signed p = term(k);
  const double s = total_mass(p);
  for (double& x : p) x /= s;
  return Distribution(shape_, std::move(p));
}

Distribution wild_term(const Distribution& p0, const RecombinationMeasure& nu, std::size_t k) {
  WildExpansion w(p0, nu);
  return w.term_distribution(k);
}

std::size_t wild_truncation(double t, double tol) {
  require(tol > 0.0 && tol < 1.0, "nonlinear-solver", "Wild tolerance must lie in (0, 1)");
  require(t >= 0.0 && std::isfinite(t), "nonlinear-solver", "time must be finite and non-negative");
  const double base = -std::expm1(-t);
  if (base <= 0.0) return 1;
  std::size_t K = 1;
  double tail = base;
  while (tail > tol) {
    ++K;
    tail *= base;
    if (K > WildExpansion::kMaxTerms)
      fail(Error::Kind::cap_exceeded, "nonlinear-solver",
           "Wild truncation needs more than 10^4 terms at t=" + std::to_string(t));
  }
  return K;
}

WildSum wild_sum(const Distribution& p0, const RecombinationMeasure& nu, double t, double tol) {
  const std::size_t K = wild_truncation(t, tol);
  WildExpansion w(p0, nu);
  const double base = -std::expm1(-t);
  const double e = std::exp(-t);
  Signed acc(p0.size(), 0.0);
  double weight = e;
  double total = 0.0;
  for (std::size_t k = 1; k <= K; ++k) {
    const Signed& term = w.term(k);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += weight * term[i];
    total += weight;
    weight *= base;
  }
  for (double& x : acc) x /= total;
  WildSum out{Distribution(p0.shape(), std::move(acc)), K, std::pow(base, static_cast<double>(K))};
  return out;
}

}  // namespace recomb
