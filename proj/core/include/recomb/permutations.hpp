#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "recomb/recombination.hpp"
#include "recomb/rng.hpp"
#include "recomb/space.hpp"

namespace recomb {

/// S_N^n: n-tuples of permutations of N particle labels, enumerated exactly.
/// Column i of a state is a permutation eta_i, with eta_i(j) the label of
/// particle j at site i. States are mixed-radix over permutation ranks.
class PermutationTupleSpace {
 public:
  static constexpr int kMaxParticles = 6;
  static constexpr std::size_t kMaxStates = 2000000;

  PermutationTupleSpace(int N, int n);

  int particles() const { return N_; }
  int sites() const { return n_; }
  std::size_t size() const { return size_; }
  std::size_t perm_count() const { return perms_.size(); }
  const std::vector<int>& permutation(std::size_t rank) const { return perms_[rank]; }
  std::size_t rank(std::span<const int> perm) const;

  std::size_t digit(std::size_t state, int site) const { return (state / power_[static_cast<std::size_t>(site)]) % perms_.size(); }
  /// Rank of perm(a) o perm(b).
  std::size_t compose(std::size_t a, std::size_t b) const { return compose_[a * perms_.size() + b]; }
  /// Rank of the transposition of positions j < l.
  std::size_t transposition(int j, int l) const;

  /// eta^{j,l,A}: particles j and l exchange their A-columns.
  std::size_t exchange(std::size_t state, int j, int l, SubsetMask A) const;
  /// (tau eta)_A eta_{A^c}, with (tau eta)(j) = eta(tau(j)).
  std::size_t relabel(std::size_t state, std::size_t tau, SubsetMask A) const;

 private:
  int N_;
  int n_;
  std::size_t size_;
  std::vector<std::vector<int>> perms_;
  std::vector<std::size_t> compose_;
  std::vector<std::size_t> power_;
};

/// Functions on S_N^n are dense arrays indexed by state; expectations are
/// under the uniform law.
double mean(std::span<const double> f);

struct DirichletEntropy {
  double dirichlet = 0.0;
  double entropy = 0.0;
  /// dirichlet / entropy; empty when the entropy is below 1e-12 times the
  /// mean of f, where both terms are dominated by roundoff.
  std::optional<double> ratio;
};

/// Precomputed exchange tables for the GRT Dirichlet form under nu.
class DirichletOperator {
 public:
  DirichletOperator(const PermutationTupleSpace& space, const RecombinationMeasure& nu);

  /// E(f, log f) = (1/(2N)) sum_{j<l} sum_A nu(A) mu[(f^{jlA} - f) log(f^{jlA} / f)], and Ent(f).
  DirichletEntropy evaluate(std::span<const double> f) const;

 private:
  const PermutationTupleSpace& space_;
  std::vector<double> weight_;                   // per (atom, pair)
  std::vector<std::vector<std::uint32_t>> to_;   // per (atom, pair): state -> exchanged state
};

DirichletEntropy dirichlet_mlsi(const PermutationTupleSpace& space, std::span<const double> f,
                                const RecombinationMeasure& nu);

/// Average of f over simultaneous relabelings of all columns.
std::vector<double> symmetrize(const PermutationTupleSpace& space, std::span<const double> f);
/// P_A f(eta) = (1/N!) sum_tau f((tau eta)_A eta_{A^c}).
std::vector<double> project_PA(const PermutationTupleSpace& space, std::span<const double> f, SubsetMask A);
/// Conditional expectation given the A^c columns (each A column averaged independently).
std::vector<double> mu_A(const PermutationTupleSpace& space, std::span<const double> f, SubsetMask A);
/// ent_A(f) = mu_A[f log(f / mu_A f)], a function of the A^c columns.
std::vector<double> ent_A(const PermutationTupleSpace& space, std::span<const double> f, SubsetMask A);
/// phi(A; f) = mu[f log(f / P_A f)].
double phi(const PermutationTupleSpace& space, std::span<const double> f, SubsetMask A);
/// E_A(f, log f) = (1/(2N)) sum_{j<l} mu[(f^{jlA} - f) log(f^{jlA} / f)].
double block_dirichlet(const PermutationTupleSpace& space, std::span<const double> f, SubsetMask A);

/// lhs >= rhs is the certified statement; margin = lhs - rhs.
struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool holds(double tolerance = 1e-12) const { return margin >= -tolerance; }
};

/// sum_A nu(A) mu[ent_A f] >= gamma(nu) ent f.
InequalityCheck shearer_check(const PermutationTupleSpace& space, std::span<const double> f,
                              const RecombinationMeasure& nu);
/// (1/N) sum_{j<l} sum_tau (g(tau^{jl}) - g(tau)) log(g(tau^{jl}) / g(tau)) >= sum_tau g log(g / mean g), g on S_N.
InequalityCheck gq_check(int N, std::span<const double> g);
/// phi(A) + sum_{i in V} phi(A u {i}) >= mu[ent_V f], for V inside A^c and |A| <= n - 1.
InequalityCheck keyphi_check(const PermutationTupleSpace& space, std::span<const double> f, SubsetMask A,
                             SubsetMask V);
/// 2 E_A(f, log f) >= phi(A).
InequalityCheck phia_gq_check(const PermutationTupleSpace& space, std::span<const double> f, SubsetMask A);

/// f = exp(Z) with i.i.d. standard normal Z.
std::vector<double> random_positive(std::size_t size, Rng& rng);

struct MlsiSearch {
  double min_ratio = 0.0;
  std::size_t worst_trial = 0;
  std::size_t trials = 0;
  std::vector<double> worst;
};

struct MlsiSearchOptions {
  std::size_t trials = 10000;
  bool symmetrized = false;
  std::size_t descent_steps = 200;
  double descent_step = 0.05;
};

/// Minimum E/Ent over random positive f, then multiplicative descent from the
/// worst (f <- f exp(step Z), accepted when the ratio decreases). An upper bound
/// on the best MLSI constant.
MlsiSearch mlsi_search(const PermutationTupleSpace& space, const RecombinationMeasure& nu, Rng& rng,
                       const MlsiSearchOptions& options = {});

}  // namespace recomb
