#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "recomb/distribution.hpp"
#include "recomb/particles.hpp"
#include "recomb/rng.hpp"

namespace recomb {

class LatticeDP;

/// Exact sampler for p^{(x)N} conditioned on the sector of `rho`.
///
/// Small boxes use sequential draws weighted by p(sigma) T_{m}(v - xi(sigma))
/// from a full lattice table. Larger ones draw type counts from an
/// exponentially tilted multinomial whose mean is rho and accept on an exact
/// sector match; the tilt is constant on the sector, so accepted draws have
/// the conditioned law. The site-0 counts are imposed exactly by drawing each
/// site-0 letter class as its own multinomial, which removes one site from
/// the rejection step.
class CanonicalSampler {
 public:
  enum class Method { sequential_dp, tilted_rejection };
  static constexpr std::size_t kSequentialBudget = std::size_t{1} << 23;
  static constexpr std::uint64_t kMaxAttempts = std::uint64_t{1} << 32;

  CanonicalSampler(const Distribution& p, const AdmissibleDensity& rho);
  ~CanonicalSampler();
  CanonicalSampler(CanonicalSampler&&) noexcept;

  ParticleState operator()(Rng& rng) const;
  Method method() const { return method_; }
  /// Rejection attempts consumed so far (tilted method only).
  std::uint64_t attempts() const { return attempts_; }

 private:
  ParticleState sample_sequential(Rng& rng) const;
  ParticleState sample_tilted(Rng& rng) const;

  SpaceShape shape_;
  AdmissibleDensity rho_;
  std::vector<int> target_;
  std::vector<std::size_t> types_;
  std::vector<std::vector<std::uint8_t>> xi_;
  std::vector<double> weight_;  // p for sequential, tilted p for rejection
  std::vector<std::vector<std::size_t>> groups_;  // type indices by site-0 letter
  Method method_;
  std::unique_ptr<LatticeDP> dp_;
  mutable std::uint64_t attempts_ = 0;
};

ParticleState sample_canonical(const Distribution& p, const AdmissibleDensity& rho, Rng& rng);

}  // namespace recomb
