#include "recomb/particles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "recomb/error.hpp"

namespace recomb {

std::vector<int> AdmissibleDensity::lattice_point() const {
  std::vector<int> v;
  for (const auto& row : counts)
    for (std::size_t x = 1; x < row.size(); ++x) v.push_back(row[x]);
  return v;
}

double AdmissibleDensity::scaled_deviation(const std::vector<std::vector<double>>& pi) const {
  double s = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i)
    for (std::size_t x = 1; x < counts[i].size(); ++x) {
      const double d = static_cast<double>(counts[i][x]) / N - pi[i][x];
      s += d * d;
    }
  return N * s;
}

ParticleState::ParticleState(SpaceShape shape, int N)
    : shape_(std::move(shape)), N_(N), letters_(static_cast<std::size_t>(N) * static_cast<std::size_t>(shape_.sites()), 0) {
  require(N >= 1, "particle-gas", "particle count must be positive");
}

ParticleState::ParticleState(SpaceShape shape, const std::vector<std::size_t>& rows)
    : ParticleState(std::move(shape), static_cast<int>(rows.size())) {
  for (int j = 0; j < N_; ++j) set_row(j, rows[static_cast<std::size_t>(j)]);
}

void ParticleState::set(int particle, int site, int letter) {
  require(particle >= 0 && particle < N_ && site >= 0 && site < shape_.sites(), "particle-gas", "index out of range");
  require(letter >= 0 && letter <= shape_.max_letter(site), "particle-gas", "letter outside alphabet");
  letters_[index(particle, site)] = letter;
}

std::size_t ParticleState::row_config(int particle) const {
  std::size_t c = 0;
  for (int s = 0; s < shape_.sites(); ++s) c += static_cast<std::size_t>(at(particle, s)) * shape_.stride(s);
  return c;
}

void ParticleState::set_row(int particle, std::size_t config) {
  require(particle >= 0 && particle < N_ && config < shape_.size(), "particle-gas", "row or configuration out of range");
  for (int s = 0; s < shape_.sites(); ++s) letters_[index(particle, s)] = shape_.letter(config, s);
}

AdmissibleDensity ParticleState::density() const {
  AdmissibleDensity d;
  d.N = N_;
  d.counts.resize(static_cast<std::size_t>(shape_.sites()));
  for (int s = 0; s < shape_.sites(); ++s) {
    auto& row = d.counts[static_cast<std::size_t>(s)];
    row.assign(static_cast<std::size_t>(shape_.radix(s)), 0);
    for (int j = 0; j < N_; ++j) ++row[static_cast<std::size_t>(at(j, s))];
  }
  return d;
}

void ParticleState::collide(int j, int l, SubsetMask A) {
  require(j >= 0 && j < N_ && l >= 0 && l < N_ && j != l, "particle-gas",
          "collision pair (" + std::to_string(j) + ", " + std::to_string(l) + ") invalid for N=" + std::to_string(N_));
  for (int s = 0; s < shape_.sites(); ++s)
    if (A.contains(s)) std::swap(letters_[index(j, s)], letters_[index(l, s)]);
}

ParticleState apply_collision(const ParticleState& eta, int j, int l, SubsetMask A) {
  ParticleState out = eta;
  out.collide(j, l, A);
  return out;
}

namespace {

void draw_pair(int N, Rng& rng, int& j, int& l) {
  j = static_cast<int>(rng.below(static_cast<std::uint64_t>(N)));
  l = static_cast<int>(rng.below(static_cast<std::uint64_t>(N - 1)));
  if (l >= j) ++l;
  if (j > l) std::swap(j, l);
}

void check_times(const std::vector<double>& times) {
  for (std::size_t k = 0; k < times.size(); ++k) {
    require(times[k] >= 0.0 && std::isfinite(times[k]), "particle-gas", "snapshot times must be finite and >= 0");
    require(k == 0 || times[k] >= times[k - 1], "particle-gas", "snapshot times must be ascending");
  }
}

}  // namespace

std::size_t simulate_observe(ParticleState& eta, const RecombinationMeasure& nu, const std::vector<double>& times,
                             Rng& rng, const std::function<void(std::size_t, const ParticleState&)>& observe) {
  require(nu.sites() == eta.sites(), "particle-gas", "measure and state disagree on the site count");
  check_times(times);
  const int N = eta.particles();
  std::size_t events = 0;
  if (N < 2) {
    for (std::size_t k = 0; k < times.size(); ++k) observe(k, eta);
    return 0;
  }
  const double rate = 0.5 * (N - 1);
  double t = rng.exponential(rate);
  for (std::size_t k = 0; k < times.size(); ++k) {
    while (t <= times[k]) {
      int j = 0;
      int l = 0;
      draw_pair(N, rng, j, l);
      eta.collide(j, l, nu.sample(rng));
      ++events;
      t += rng.exponential(rate);
    }
    observe(k, eta);
  }
  return events;
}

Trajectory simulate(const ParticleState& eta0, const RecombinationMeasure& nu, double t_end, Rng& rng,
                    const SimulateOptions& options) {
  require(t_end >= 0.0 && std::isfinite(t_end), "particle-gas", "end time must be finite and non-negative");
  require(nu.sites() == eta0.sites(), "particle-gas", "measure and state disagree on the site count");
  check_times(options.snapshot_times);
  for (double s : options.snapshot_times) require(s <= t_end, "particle-gas", "snapshot time beyond end time");

  Trajectory out{{}, options.snapshot_times, {}, 0, eta0};
  ParticleState& eta = out.final_state;
  const int N = eta.particles();
  const double rate = 0.5 * (N - 1);
  std::size_t next = 0;
  auto flush = [&](double upto) {
    while (next < options.snapshot_times.size() && options.snapshot_times[next] < upto) {
      out.snapshots.push_back(eta);
      ++next;
    }
  };
  if (N >= 2) {
    double t = rng.exponential(rate);
    while (t <= t_end) {
      flush(t);
      int j = 0;
      int l = 0;
      draw_pair(N, rng, j, l);
      const SubsetMask A = nu.sample(rng);
      eta.collide(j, l, A);
      ++out.event_count;
      if (options.record_events) out.events.push_back({t, j, l, A});
      t += rng.exponential(rate);
    }
  }
  flush(std::numeric_limits<double>::infinity());
  return out;
}

AdmissibleDensity rho_pi(const std::vector<std::vector<double>>& pi, int N) {
  require(N >= 1, "particle-gas", "particle count must be positive");
  AdmissibleDensity d;
  d.N = N;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    std::vector<int> row(pi[i].size(), 0);
    int rest = N;
    for (std::size_t x = 1; x < pi[i].size(); ++x) {
      require(pi[i][x] >= 0.0 && pi[i][x] <= 1.0, "particle-gas", "marginal entry outside [0, 1]");
      // The epsilon keeps exact multiples k/N from flooring to k - 1 after rounding.
      row[x] = static_cast<int>(std::floor(N * pi[i][x] + 1e-9));
      rest -= row[x];
    }
    require(rest >= 0, "particle-gas", "marginal rows must sum to 1");
    row[0] = rest;
    d.counts.push_back(std::move(row));
  }
  return d;
}

Distribution empirical(const ParticleState& eta) {
  std::vector<double> w(eta.shape().size(), 0.0);
  for (int j = 0; j < eta.particles(); ++j) w[eta.row_config(j)] += 1.0;
  for (double& x : w) x /= eta.particles();
  return Distribution(eta.shape(), std::move(w));
}

Distribution empirical_k(const ParticleState& eta, int k, Rng& rng, std::size_t samples) {
  require(k >= 1 && k <= eta.particles(), "particle-gas", "tuple size must lie in [1, N]");
  require(samples >= 1, "particle-gas", "at least one tuple sample required");
  const SpaceShape big = power_shape(eta.shape(), k);
  std::vector<double> w(big.size(), 0.0);
  std::vector<int> picked(static_cast<std::size_t>(k));
  const std::size_t block = eta.shape().size();
  for (std::size_t s = 0; s < samples; ++s) {
    std::size_t config = 0;
    std::size_t scale = 1;
    for (int a = 0; a < k; ++a) {
      int j = 0;
      do {
        j = static_cast<int>(rng.below(static_cast<std::uint64_t>(eta.particles())));
      } while (std::find(picked.begin(), picked.begin() + a, j) != picked.begin() + a);
      picked[static_cast<std::size_t>(a)] = j;
      config += eta.row_config(j) * scale;
      scale *= block;
    }
    w[config] += 1.0;
  }
  for (double& x : w) x /= static_cast<double>(samples);
  return Distribution(big, std::move(w));
}

}  // namespace recomb
