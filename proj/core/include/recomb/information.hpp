#pragma once

#include <span>

#include "recomb/distribution.hpp"

namespace recomb {

/// H(p | q) = sum p log(p / q) with 0 log 0 = 0; +infinity when p is not
/// absolutely continuous with respect to q.
double rel_entropy(std::span<const double> p, std::span<const double> q);
double rel_entropy(const Distribution& p, const Distribution& q);

/// Total variation: half the l1 distance.
double tv(std::span<const double> p, std::span<const double> q);
double tv(const Distribution& p, const Distribution& q);

/// Ent_mu(f) = mu(f log f) - mu(f) log mu(f) for f >= 0.
double ent(std::span<const double> f, std::span<const double> mu);
/// Entropy of f under the uniform law on its index set.
double ent_uniform(std::span<const double> f);

}  // namespace recomb
