#pragma once

#include <string>
#include <utility>
#include <vector>

#include "recomb/rng.hpp"
#include "recomb/space.hpp"

namespace recomb {

struct Atom {
  SubsetMask mask;
  double p = 0.0;
};

/// Probability measure nu on subsets of the n sites. Uniform crossover is kept
/// implicit (n fair coin flips) and enumerated only when n <= 16.
class RecombinationMeasure {
 public:
  enum class Kind { uniform, one_point, single_site, custom };
  static constexpr int kMaxEnumerableUniform = 16;

  static RecombinationMeasure uniform_crossover(int n);
  /// Weight 1/(n+1) on each prefix {0..i-1}, i = 0..n (including the empty set).
  static RecombinationMeasure one_point(int n);
  /// Uniform on the n singletons.
  static RecombinationMeasure single_site(int n);
  /// Duplicate masks are merged; zero weights dropped; weights must sum to 1 within 1e-12.
  static RecombinationMeasure custom(int n, std::vector<Atom> atoms);

  Kind kind() const { return kind_; }
  int sites() const { return n_; }
  bool implicit() const { return kind_ == Kind::uniform; }

  /// Atoms sorted by mask. Throws for implicit uniform crossover with n > 16.
  std::vector<Atom> atoms() const;
  double weight(SubsetMask A) const;

  SubsetMask sample(Rng& rng) const;
  /// Sample from the symmetrized law (nu(A) + nu(A^c)) / 2.
  SubsetMask sample_symmetrized(Rng& rng) const;

  /// r(nu): the largest probability that a pair of distinct sites ends up on the same side.
  double non_separation() const { return r_; }
  double separation_gap() const { return 1.0 - r_; }
  /// gamma(nu) = min_i sum_{A containing i} nu(A).
  double coverage() const { return gamma_; }
  /// delta(nu) = min_i max_{A containing i} min(nu(A), nu(A \ {i})).
  double strict_witness() const { return delta_; }
  bool separating() const { return r_ < 1.0; }
  bool strictly_separating() const { return delta_ > 0.0; }

  std::string kind_name() const;

 private:
  RecombinationMeasure(Kind kind, int n, std::vector<Atom> atoms);
  void derive_constants();

  Kind kind_ = Kind::custom;
  int n_ = 0;
  std::vector<Atom> atoms_;  // empty for implicit uniform crossover
  DiscreteSampler sampler_;
  double r_ = 0.0;
  double gamma_ = 0.0;
  double delta_ = 0.0;
};

}  // namespace recomb
