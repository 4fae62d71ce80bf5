#pragma once

#include <cstdint>
#include <vector>

#include "recomb/distribution.hpp"

namespace recomb {

/// A probability on {0,1}^K listed by its atoms.
struct LatticeAtom {
  std::vector<std::uint8_t> xi;
  double p = 0.0;
};

/// Pushforward of p under xi_{i,x}(sigma) = 1(sigma_i = x), x = 1..q_i,
/// with coordinates ordered (site, letter).
struct InducedMeasure {
  int K = 0;
  std::vector<LatticeAtom> atoms;
  std::vector<double> mean;
  std::vector<double> covariance;  // row-major K x K
  bool irreducible = false;

  double cov(int a, int b) const { return covariance[static_cast<std::size_t>(a * K + b)]; }
};

/// Builds mean, covariance and the irreducibility flag from raw atoms
/// (duplicates merged, zero weights dropped).
InducedMeasure make_lattice_measure(int K, std::vector<LatticeAtom> atoms);

InducedMeasure induce(const Distribution& p);

/// The xi vector of a configuration.
std::vector<std::uint8_t> induced_point(const SpaceShape& shape, std::size_t config);

/// For each coordinate, some supported xi stays supported after flipping that coordinate.
bool lattice_irreducible(int K, const std::vector<LatticeAtom>& atoms);

/// For every (i, x >= 1) some chi has both chi with sigma_i = x and with sigma_i = 0 in the support.
bool is_irreducible(const Distribution& p);

}  // namespace recomb
