#include "recomb/information.hpp"

#include <cmath>
#include <limits>

#include "recomb/error.hpp"

namespace recomb {

double rel_entropy(std::span<const double> p, std::span<const double> q) {
  require(p.size() == q.size(), "analysis", "relative entropy of arrays with different lengths");
  double h = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    h += p[i] * std::log(p[i] / q[i]);
  }
  return std::max(h, 0.0);
}

double rel_entropy(const Distribution& p, const Distribution& q) {
  require(p.shape() == q.shape(), "analysis", "relative entropy across shapes");
  return rel_entropy(p.probs(), q.probs());
}

double tv(std::span<const double> p, std::span<const double> q) {
  require(p.size() == q.size(), "analysis", "total variation of arrays with different lengths");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return 0.5 * s;
}

double tv(const Distribution& p, const Distribution& q) {
  require(p.shape() == q.shape(), "analysis", "total variation across shapes");
  return tv(p.probs(), q.probs());
}

double ent(std::span<const double> f, std::span<const double> mu) {
  require(f.size() == mu.size(), "analysis", "entropy of arrays with different lengths");
  double m = 0.0;
  double flogf = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    require(f[i] >= 0.0, "analysis", "entropy of a negative function");
    m += mu[i] * f[i];
    if (f[i] > 0.0) flogf += mu[i] * f[i] * std::log(f[i]);
  }
  if (m <= 0.0) return 0.0;
  return std::max(flogf - m * std::log(m), 0.0);
}

double ent_uniform(std::span<const double> f) {
  const double w = 1.0 / static_cast<double>(f.size());
  double m = 0.0;
  double flogf = 0.0;
  for (double x : f) {
    require(x >= 0.0, "analysis", "entropy of a negative function");
    m += w * x;
    if (x > 0.0) flogf += w * x * std::log(x);
  }
  if (m <= 0.0) return 0.0;
  return std::max(flogf - m * std::log(m), 0.0);
}

}  // namespace recomb
