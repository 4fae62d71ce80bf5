#pragma once

#include "recomb/distribution.hpp"
#include "recomb/recombination.hpp"

namespace recomb {

/// Entropy production of the nonlinear flow at p, d/dt H(p_t | pi) at t = 0:
/// -sum_A nu(A) pi[(f^A f^{A^c} - f) log(f^A f^{A^c} / f)] with f = p / pi.
/// Non-positive. Throws if p vanishes where some p_A (x) p_{A^c} does not.
double fisher_nonlinear(const Distribution& p, const RecombinationMeasure& nu);

}  // namespace recomb
