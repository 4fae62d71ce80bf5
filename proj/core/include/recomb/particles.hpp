#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "recomb/distribution.hpp"
#include "recomb/recombination.hpp"
#include "recomb/rng.hpp"

namespace recomb {

/// Per-site letter counts c[i][x], each row summing to N.
struct AdmissibleDensity {
  int N = 0;
  std::vector<std::vector<int>> counts;

  double rho(int site, int letter) const {
    return static_cast<double>(counts[static_cast<std::size_t>(site)][static_cast<std::size_t>(letter)]) / N;
  }
  /// Lattice vector of counts for letters x >= 1, ordered (site, letter).
  std::vector<int> lattice_point() const;
  /// N * sum_{i,x} (rho_{i,x} - pi_{i,x})^2 over letters x >= 1.
  double scaled_deviation(const std::vector<std::vector<double>>& pi) const;

  friend bool operator==(const AdmissibleDensity&, const AdmissibleDensity&) = default;
};

/// N particles, each a configuration of the shape; stored row-major as letters.
class ParticleState {
 public:
  ParticleState(SpaceShape shape, int N);
  /// Rows given as configuration indices.
  ParticleState(SpaceShape shape, const std::vector<std::size_t>& rows);

  const SpaceShape& shape() const { return shape_; }
  int particles() const { return N_; }
  int sites() const { return shape_.sites(); }

  int at(int particle, int site) const { return letters_[index(particle, site)]; }
  void set(int particle, int site, int letter);
  std::size_t row_config(int particle) const;
  void set_row(int particle, std::size_t config);

  AdmissibleDensity density() const;
  bool in_sector(const AdmissibleDensity& rho) const { return density() == rho; }

  /// Swap the A-columns of rows j and l (0-based, j != l).
  void collide(int j, int l, SubsetMask A);

  friend bool operator==(const ParticleState& a, const ParticleState& b) {
    return a.shape_ == b.shape_ && a.letters_ == b.letters_;
  }

 private:
  std::size_t index(int particle, int site) const {
    return static_cast<std::size_t>(particle) * static_cast<std::size_t>(shape_.sites()) +
           static_cast<std::size_t>(site);
  }

  SpaceShape shape_;
  int N_;
  std::vector<int> letters_;
};

struct CollisionEvent {
  double time = 0.0;
  int j = 0;
  int l = 0;
  SubsetMask mask;
};

ParticleState apply_collision(const ParticleState& eta, int j, int l, SubsetMask A);

struct SimulateOptions {
  /// Ascending snapshot times in [0, t_end].
  std::vector<double> snapshot_times;
  bool record_events = false;
};

struct Trajectory {
  std::vector<CollisionEvent> events;
  std::vector<double> snapshot_times;
  std::vector<ParticleState> snapshots;
  std::size_t event_count = 0;
  ParticleState final_state;
};

/// Event-driven simulation: one exponential clock of rate (N-1)/2, a uniform
/// pair j < l and a mask drawn from nu at each event.
Trajectory simulate(const ParticleState& eta0, const RecombinationMeasure& nu, double t_end, Rng& rng,
                    const SimulateOptions& options = {});

/// In-place variant; `observe(k, state)` is called at each snapshot time index k.
std::size_t simulate_observe(ParticleState& eta, const RecombinationMeasure& nu, const std::vector<double>& times,
                             Rng& rng, const std::function<void(std::size_t, const ParticleState&)>& observe);

/// c_{i,x} = floor(N pi_{i,x}) for x >= 1 and c_{i,0} = N - sum_{x>=1} c_{i,x}.
AdmissibleDensity rho_pi(const std::vector<std::vector<double>>& pi, int N);

/// Empirical measure of the rows.
Distribution empirical(const ParticleState& eta);
/// Histogram of `samples` ordered k-tuples of distinct rows, on power_shape(shape, k).
Distribution empirical_k(const ParticleState& eta, int k, Rng& rng, std::size_t samples = 100000);

}  // namespace recomb
