#include "recomb/recombination.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "recomb/error.hpp"

namespace recomb {

namespace {

void check_sites(int n) {
  require(n >= 1 && n <= SpaceShape::kMaxSites, "core-model", "site count out of range: " + std::to_string(n));
}

}  // namespace

RecombinationMeasure::RecombinationMeasure(Kind kind, int n, std::vector<Atom> atoms)
    : kind_(kind), n_(n), atoms_(std::move(atoms)) {
  if (!atoms_.empty()) {
    std::vector<double> w;
    w.reserve(atoms_.size());
    for (const Atom& a : atoms_) w.push_back(a.p);
    sampler_ = DiscreteSampler(w);
  }
  derive_constants();
  if (strictly_separating() && !separating())
    fail(Error::Kind::invariant_violation, "core-model", "strictly separating measure fails to separate");
}

RecombinationMeasure RecombinationMeasure::uniform_crossover(int n) {
  check_sites(n);
  return RecombinationMeasure(Kind::uniform, n, {});
}

RecombinationMeasure RecombinationMeasure::one_point(int n) {
  check_sites(n);
  std::vector<Atom> atoms;
  for (int i = 0; i <= n; ++i) atoms.push_back({SubsetMask::full(i), 1.0 / (n + 1)});
  return RecombinationMeasure(Kind::one_point, n, std::move(atoms));
}

RecombinationMeasure RecombinationMeasure::single_site(int n) {
  check_sites(n);
  std::vector<Atom> atoms;
  for (int i = 0; i < n; ++i) atoms.push_back({SubsetMask::single(i), 1.0 / n});
  return RecombinationMeasure(Kind::single_site, n, std::move(atoms));
}

RecombinationMeasure RecombinationMeasure::custom(int n, std::vector<Atom> atoms) {
  check_sites(n);
  std::map<std::uint64_t, double> merged;
  double total = 0.0;
  for (const Atom& a : atoms) {
    require(a.mask.subset_of(SubsetMask::full(n)), "core-model", "atom mask has bits beyond site count");
    require(a.p >= 0.0 && std::isfinite(a.p), "core-model", "atom weight must be non-negative");
    merged[a.mask.bits] += a.p;
    total += a.p;
  }
  require(std::abs(total - 1.0) <= 1e-12, "core-model", "atom weights sum to " + std::to_string(total));
  std::vector<Atom> out;
  for (const auto& [bits, p] : merged)
    if (p > 0.0) out.push_back({SubsetMask(bits), p});
  return RecombinationMeasure(Kind::custom, n, std::move(out));
}

std::vector<Atom> RecombinationMeasure::atoms() const {
  if (!implicit()) {
    std::vector<Atom> out = atoms_;
    std::sort(out.begin(), out.end(), [](const Atom& a, const Atom& b) { return a.mask.bits < b.mask.bits; });
    return out;
  }
  if (n_ > kMaxEnumerableUniform)
    fail(Error::Kind::cap_exceeded, "core-model", "uniform crossover atoms are enumerable only for n <= 16");
  const std::uint64_t count = std::uint64_t{1} << n_;
  const double w = std::ldexp(1.0, -n_);
  std::vector<Atom> out;
  out.reserve(count);
  for (std::uint64_t m = 0; m < count; ++m) out.push_back({SubsetMask(m), w});
  return out;
}

double RecombinationMeasure::weight(SubsetMask A) const {
  if (!A.subset_of(SubsetMask::full(n_))) return 0.0;
  if (implicit()) return std::ldexp(1.0, -n_);
  for (const Atom& a : atoms_)
    if (a.mask == A) return a.p;
  return 0.0;
}

SubsetMask RecombinationMeasure::sample(Rng& rng) const {
  if (implicit()) return SubsetMask(rng() & SubsetMask::full(n_).bits);
  return atoms_[sampler_(rng)].mask;
}

SubsetMask RecombinationMeasure::sample_symmetrized(Rng& rng) const {
  if (implicit()) return sample(rng);
  const SubsetMask A = sample(rng);
  return (rng() >> 63) ? A.complement(n_) : A;
}

void RecombinationMeasure::derive_constants() {
  if (implicit()) {
    r_ = n_ >= 2 ? 0.5 : 0.0;
    gamma_ = 0.5;
    delta_ = std::ldexp(1.0, -n_);
    return;
  }
  r_ = 0.0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) {
      double same = 0.0;
      for (const Atom& a : atoms_)
        if (a.mask.contains(i) == a.mask.contains(j)) same += a.p;
      r_ = std::max(r_, same);
    }
  std::map<std::uint64_t, double> lookup;
  for (const Atom& a : atoms_) lookup[a.mask.bits] = a.p;
  gamma_ = 1.0;
  delta_ = 1.0;
  for (int i = 0; i < n_; ++i) {
    double cover = 0.0;
    double best = 0.0;
    for (const Atom& a : atoms_) {
      if (!a.mask.contains(i)) continue;
      cover += a.p;
      const auto it = lookup.find(a.mask.without(i).bits);
      if (it != lookup.end()) best = std::max(best, std::min(a.p, it->second));
    }
    gamma_ = std::min(gamma_, cover);
    delta_ = std::min(delta_, best);
  }
}

std::string RecombinationMeasure::kind_name() const {
  switch (kind_) {
    case Kind::uniform: return "uniform";
    case Kind::one_point: return "onepoint";
    case Kind::single_site: return "singlesite";
    case Kind::custom: return "custom";
  }
  return "custom";
}

}  // namespace recomb
