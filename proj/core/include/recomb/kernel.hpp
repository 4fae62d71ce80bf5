#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "recomb/distribution.hpp"
#include "recomb/recombination.hpp"

namespace recomb {

/// Precomputed marginal/tensor plumbing for a fixed (shape, nu) pair.
/// Projection tables are cached when they fit in a few MB, recomputed otherwise.
class CollisionOperator {
 public:
  CollisionOperator(SpaceShape shape, const RecombinationMeasure& nu);

  const SpaceShape& shape() const { return shape_; }
  const std::vector<Atom>& atoms() const { return atoms_; }

  /// f o g = sum_A nu(A) (f_A (x) g_{A^c} + g_A (x) f_{A^c}) / 2, for signed arrays.
  Signed convolve(std::span<const double> f, std::span<const double> g) const;
  /// Q(f) = sum_A nu(A) f_A (x) f_{A^c}.
  Signed kernel(std::span<const double> f) const;
  void kernel_into(std::span<const double> f, std::span<double> out) const;

  /// Calls fn(A-weight, table_A, table_Ac) for each atom.
  template <class Fn>
  void for_each_atom(Fn&& fn) const {
    for (std::size_t a = 0; a < atoms_.size(); ++a) {
      if (cached_) {
        fn(atoms_[a], tables_[2 * a], tables_[2 * a + 1]);
      } else {
        const SubsetMask A = atoms_[a].mask;
        const auto ta = shape_.projection_table(A);
        const auto tc = shape_.projection_table(A.complement(shape_.sites()));
        fn(atoms_[a], ta, tc);
      }
    }
  }

 private:
  SpaceShape shape_;
  std::vector<Atom> atoms_;
  bool cached_ = false;
  std::vector<std::vector<std::uint32_t>> tables_;
};

Distribution collision_kernel(const Distribution& p, const RecombinationMeasure& nu);
Distribution convolve(const Distribution& p, const Distribution& q, const RecombinationMeasure& nu);

}  // namespace recomb
