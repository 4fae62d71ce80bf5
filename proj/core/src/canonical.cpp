#include "recomb/canonical.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "recomb/error.hpp"
#include "recomb/induced.hpp"
#include "recomb/lattice_dp.hpp"

namespace recomb {

namespace {

/// Tilt theta with E_theta[xi] = target / N, by damped Newton on the convex
/// function log Z(theta) - theta . target / N.
std::vector<double> tilt(const std::vector<std::vector<std::uint8_t>>& xi, const std::vector<double>& p,
                         const std::vector<int>& target, int N) {
  const int K = static_cast<int>(target.size());
  Eigen::VectorXd rho(K);
  for (int c = 0; c < K; ++c) rho(c) = static_cast<double>(target[static_cast<std::size_t>(c)]) / N;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(K);
  auto objective = [&](const Eigen::VectorXd& th, Eigen::VectorXd* grad, Eigen::MatrixXd* hess) {
    std::vector<double> e(p.size());
    double shift = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < p.size(); ++t) {
      double s = std::log(p[t]);
      for (int c = 0; c < K; ++c) s += th(c) * xi[t][static_cast<std::size_t>(c)];
      e[t] = s;
      shift = std::max(shift, s);
    }
    double z = 0.0;
    for (double& s : e) z += (s = std::exp(s - shift));
    if (grad) {
      Eigen::VectorXd mean = Eigen::VectorXd::Zero(K);
      Eigen::MatrixXd second = Eigen::MatrixXd::Zero(K, K);
      for (std::size_t t = 0; t < p.size(); ++t) {
        Eigen::VectorXd x(K);
        for (int c = 0; c < K; ++c) x(c) = xi[t][static_cast<std::size_t>(c)];
        mean += (e[t] / z) * x;
        second += (e[t] / z) * x * x.transpose();
      }
      *grad = mean - rho;
      *hess = second - mean * mean.transpose();
    }
    return shift + std::log(z) - th.dot(rho);
  };
  Eigen::VectorXd grad(K);
  Eigen::MatrixXd hess(K, K);
  double f = objective(theta, &grad, &hess);
  for (int it = 0; it < 200 && grad.norm() > 1e-13; ++it) {
    hess.diagonal().array() += 1e-12;
    const Eigen::VectorXd step = hess.ldlt().solve(-grad);
    double a = 1.0;
    Eigen::VectorXd trial = theta + step;
    double ft = objective(trial, nullptr, nullptr);
    while (!(ft <= f) && a > 1e-10) {
      a *= 0.5;
      trial = theta + a * step;
      ft = objective(trial, nullptr, nullptr);
    }
    if (!(ft <= f)) break;
    theta = trial;
    f = objective(theta, &grad, &hess);
  }
  std::vector<double> out(p.size());
  double total = 0.0;
  for (std::size_t t = 0; t < p.size(); ++t) {
    double s = std::log(p[t]);
    for (int c = 0; c < K; ++c) s += theta(c) * xi[t][static_cast<std::size_t>(c)];
    out[t] = s;
  }
  const double shift = *std::max_element(out.begin(), out.end());
  for (double& s : out) total += (s = std::exp(s - shift));
  for (double& s : out) s /= total;
  return out;
}

}  // namespace

CanonicalSampler::CanonicalSampler(const Distribution& p, const AdmissibleDensity& rho)
    : shape_(p.shape()), rho_(rho), target_(rho.lattice_point()) {
  require(static_cast<int>(rho.counts.size()) == shape_.sites(), "particle-gas", "density has the wrong site count");
  for (int i = 0; i < shape_.sites(); ++i) {
    const auto& row = rho.counts[static_cast<std::size_t>(i)];
    require(static_cast<int>(row.size()) == shape_.radix(i), "particle-gas", "density row has the wrong length");
    int s = 0;
    for (int c : row) {
      require(c >= 0, "particle-gas", "negative letter count");
      s += c;
    }
    require(s == rho.N, "particle-gas", "density counts must sum to N at every site");
  }
  for (std::size_t c = 0; c < p.size(); ++c)
    if (p[c] > 0.0) {
      types_.push_back(c);
      xi_.push_back(induced_point(shape_, c));
      weight_.push_back(p[c]);
    }
  const int K = shape_.induced_dim();
  double box = static_cast<double>(rho.N + 1);
  double side = 1.0;
  for (int c = 0; c < K; ++c) side *= rho.N + 2;
  box *= side;
  if (K <= LatticeDP::kMaxDim && box <= static_cast<double>(kSequentialBudget)) {
    method_ = Method::sequential_dp;
    std::vector<int> all(static_cast<std::size_t>(rho.N + 1));
    for (int m = 0; m <= rho.N; ++m) all[static_cast<std::size_t>(m)] = m;
    dp_ = std::make_unique<LatticeDP>(induce(p), rho.N, all);
    if (!(dp_->prob(rho.N, target_) > 0.0))
      fail(Error::Kind::invalid_argument, "particle-gas", "sector has zero probability under p");
  } else {
    method_ = Method::tilted_rejection;
    weight_ = tilt(xi_, weight_, target_, rho.N);
    groups_.resize(static_cast<std::size_t>(shape_.radix(0)));
    for (std::size_t t = 0; t < types_.size(); ++t)
      groups_[static_cast<std::size_t>(shape_.letter(types_[t], 0))].push_back(t);
    for (std::size_t g = 0; g < groups_.size(); ++g)
      if (groups_[g].empty() && rho.counts[0][g] > 0)
        fail(Error::Kind::invalid_argument, "particle-gas", "sector has zero probability under p");
  }
}

CanonicalSampler::~CanonicalSampler() = default;
CanonicalSampler::CanonicalSampler(CanonicalSampler&&) noexcept = default;

ParticleState CanonicalSampler::operator()(Rng& rng) const {
  return method_ == Method::sequential_dp ? sample_sequential(rng) : sample_tilted(rng);
}

ParticleState CanonicalSampler::sample_sequential(Rng& rng) const {
  const int N = rho_.N;
  const std::size_t K = target_.size();
  std::vector<int> v = target_;
  std::vector<int> u(K);
  std::vector<double> w(types_.size());
  std::vector<std::size_t> rows(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j) {
    const int m = N - j - 1;
    for (std::size_t t = 0; t < types_.size(); ++t) {
      for (std::size_t c = 0; c < K; ++c) u[c] = v[c] - xi_[t][c];
      w[t] = weight_[t] * dp_->prob(m, u);
    }
    const std::size_t t = DiscreteSampler(w)(rng);
    for (std::size_t c = 0; c < K; ++c) v[c] -= xi_[t][c];
    rows[static_cast<std::size_t>(j)] = types_[t];
  }
  return ParticleState(shape_, rows);
}

ParticleState CanonicalSampler::sample_tilted(Rng& rng) const {
  const int N = rho_.N;
  const std::size_t K = target_.size();
  const std::size_t T = types_.size();
  std::vector<std::uint64_t> counts(T);
  std::vector<int> sums(K);
  for (;;) {
    if (++attempts_ > kMaxAttempts)
      fail(Error::Kind::cap_exceeded, "particle-gas", "canonical rejection sampler exceeded 2^32 attempts");
    std::fill(sums.begin(), sums.end(), 0);
    bool ok = true;
    for (std::size_t g = 0; g < groups_.size() && ok; ++g) {
      const auto& group = groups_[g];
      std::uint64_t left = static_cast<std::uint64_t>(rho_.counts[0][g]);
      double mass = 0.0;
      for (std::size_t t : group) mass += weight_[t];
      for (std::size_t a = 0; a < group.size() && ok; ++a) {
        const std::size_t t = group[a];
        const std::uint64_t c =
            (a + 1 == group.size()) ? left : rng.binomial(left, mass > 0.0 ? std::min(1.0, weight_[t] / mass) : 1.0);
        counts[t] = c;
        left -= c;
        mass -= weight_[t];
        for (std::size_t k = 0; k < K; ++k) {
          sums[k] += static_cast<int>(c) * xi_[t][k];
          if (sums[k] > target_[k]) ok = false;
        }
      }
    }
    if (!ok || sums != target_) continue;
    std::vector<std::size_t> rows;
    rows.reserve(static_cast<std::size_t>(N));
    for (std::size_t t = 0; t < T; ++t) rows.insert(rows.end(), counts[t], types_[t]);
    rng.shuffle(std::span<std::size_t>(rows));
    return ParticleState(shape_, rows);
  }
}

ParticleState sample_canonical(const Distribution& p, const AdmissibleDensity& rho, Rng& rng) {
  return CanonicalSampler(p, rho)(rng);
}

}  // namespace recomb
