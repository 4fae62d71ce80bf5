#include "recomb/induced.hpp"

#include <cmath>
#include <map>
#include <set>

#include "recomb/error.hpp"

namespace recomb {

std::vector<std::uint8_t> induced_point(const SpaceShape& shape, std::size_t config) {
  std::vector<std::uint8_t> xi(static_cast<std::size_t>(shape.induced_dim()), 0);
  std::size_t offset = 0;
  for (int i = 0; i < shape.sites(); ++i) {
    const int x = shape.letter(config, i);
    if (x >= 1) xi[offset + static_cast<std::size_t>(x - 1)] = 1;
    offset += static_cast<std::size_t>(shape.max_letter(i));
  }
  return xi;
}

bool lattice_irreducible(int K, const std::vector<LatticeAtom>& atoms) {
  std::set<std::vector<std::uint8_t>> support;
  for (const auto& a : atoms)
    if (a.p > 0.0) support.insert(a.xi);
  for (int c = 0; c < K; ++c) {
    bool found = false;
    for (const auto& xi : support) {
      auto flipped = xi;
      flipped[static_cast<std::size_t>(c)] ^= 1U;
      if (support.count(flipped)) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

InducedMeasure make_lattice_measure(int K, std::vector<LatticeAtom> atoms) {
  require(K >= 1, "lclt", "lattice dimension must be positive");
  std::map<std::vector<std::uint8_t>, double> merged;
  for (auto& a : atoms) {
    require(static_cast<int>(a.xi.size()) == K, "lclt", "lattice atom has the wrong dimension");
    require(a.p >= 0.0, "lclt", "negative lattice atom weight");
    if (a.p > 0.0) merged[a.xi] += a.p;
  }
  InducedMeasure mu;
  mu.K = K;
  double total = 0.0;
  for (auto& [xi, p] : merged) {
    mu.atoms.push_back({xi, p});
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-12, "lclt", "lattice measure does not sum to 1");
  const auto k = static_cast<std::size_t>(K);
  mu.mean.assign(k, 0.0);
  for (const auto& a : mu.atoms)
    for (std::size_t c = 0; c < k; ++c) mu.mean[c] += a.p * a.xi[c];
  mu.covariance.assign(k * k, 0.0);
  for (const auto& a : mu.atoms)
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t c = 0; c < k; ++c)
        mu.covariance[r * k + c] += a.p * (a.xi[r] - mu.mean[r]) * (a.xi[c] - mu.mean[c]);
  mu.irreducible = lattice_irreducible(K, mu.atoms);
  return mu;
}

InducedMeasure induce(const Distribution& p) {
  std::vector<LatticeAtom> atoms;
  for (std::size_t c = 0; c < p.size(); ++c)
    if (p[c] > 0.0) atoms.push_back({induced_point(p.shape(), c), p[c]});
  return make_lattice_measure(p.shape().induced_dim(), std::move(atoms));
}

bool is_irreducible(const Distribution& p) {
  const SpaceShape& shape = p.shape();
  for (int i = 0; i < shape.sites(); ++i) {
    for (int x = 1; x <= shape.max_letter(i); ++x) {
      bool found = false;
      for (std::size_t c = 0; c < p.size() && !found; ++c) {
        if (shape.letter(c, i) != 0 || p[c] <= 0.0) continue;
        const std::size_t moved = c + static_cast<std::size_t>(x) * shape.stride(i);
        found = p[moved] > 0.0;
      }
      if (!found) return false;
    }
  }
  return true;
}

}  // namespace recomb
