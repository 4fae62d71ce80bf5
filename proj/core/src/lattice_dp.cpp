#include "recomb/lattice_dp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "recomb/error.hpp"

namespace recomb {

LatticeDP::LatticeDP(const InducedMeasure& mu, int N, std::vector<int> retain) : N_(N), K_(mu.K) {
  require(N >= 0, "lclt", "particle count must be non-negative");
  require(K_ >= 1 && K_ <= kMaxDim, "lclt", "lattice dimension must lie in [1, 4], got " + std::to_string(K_));
  const auto K = static_cast<std::size_t>(K_);
  // One zero layer below the box lets v - xi index the padding instead of branching.
  const std::size_t side = static_cast<std::size_t>(N) + 2;
  stride_.resize(K);
  std::size_t total = 1;
  for (std::size_t c = 0; c < K; ++c) {
    stride_[c] = total;
    total *= side;
    if (total > kMaxSliceEntries)
      fail(Error::Kind::cap_exceeded, "lclt",
           "lattice box (N+2)^K exceeds 2^24 entries for N=" + std::to_string(N) + ", K=" + std::to_string(K_));
  }
  retain.push_back(N);
  for (int m : retain) require(m >= 0 && m <= N, "lclt", "retained slice outside [0, N]");
  std::sort(retain.begin(), retain.end());

  std::vector<std::size_t> shift;
  std::vector<double> weight;
  for (const auto& a : mu.atoms) {
    std::size_t s = 0;
    for (std::size_t c = 0; c < K; ++c) s += a.xi[c] * stride_[c];
    shift.push_back(s);
    weight.push_back(a.p);
  }

  std::size_t origin = 0;
  for (std::size_t c = 0; c < K; ++c) origin += stride_[c];
  std::vector<double> cur(total, 0.0);
  std::vector<double> next(total, 0.0);
  cur[origin] = 1.0;
  auto keep = [&](int m) {
    if (std::binary_search(retain.begin(), retain.end(), m)) slices_[m] = cur;
  };
  keep(0);
  std::vector<int> v(K, 0);
  for (int m = 1; m <= N; ++m) {
    std::fill(v.begin(), v.end(), 0);
    for (;;) {
      std::size_t at = origin;
      for (std::size_t c = 0; c < K; ++c) at += static_cast<std::size_t>(v[c]) * stride_[c];
      double acc = 0.0;
      for (std::size_t a = 0; a < shift.size(); ++a) acc += weight[a] * cur[at - shift[a]];
      next[at] = acc;
      std::size_t c = 0;
      while (c < K && v[c] == m) v[c++] = 0;
      if (c == K) break;
      ++v[c];
    }
    std::swap(cur, next);
    keep(m);
  }
}

const std::vector<double>& LatticeDP::slice(int m) const {
  const auto it = slices_.find(m);
  if (it == slices_.end()) fail(Error::Kind::invalid_argument, "lclt", "slice " + std::to_string(m) + " not retained");
  return it->second;
}

std::size_t LatticeDP::offset(std::span<const int> v) const {
  std::size_t at = 0;
  for (std::size_t c = 0; c < stride_.size(); ++c) at += static_cast<std::size_t>(v[c] + 1) * stride_[c];
  return at;
}

double LatticeDP::prob(int m, std::span<const int> v) const {
  require(static_cast<int>(v.size()) == K_, "lclt", "lattice point has the wrong dimension");
  const auto& s = slice(m);
  for (int x : v)
    if (x < 0 || x > m) return 0.0;
  return s[offset(v)];
}

double LatticeDP::log_prob(int m, std::span<const int> v) const {
  const double p = prob(m, v);
  return p > 0.0 ? std::log(p) : -std::numeric_limits<double>::infinity();
}

double LatticeDP::slice_sum(int m) const {
  double s = 0.0;
  for_each_point(m, [&](std::span<const int>, double p) { s += p; });
  return s;
}

double dp_point_prob(const LatticeDP& dp, std::span<const int> M) { return dp.prob(dp.N(), M); }

double log_gaussian_approx(const InducedMeasure& mu, int N, std::span<const int> M) {
  require(N >= 1, "lclt", "Gaussian approximation needs N >= 1");
  require(static_cast<int>(M.size()) == mu.K, "lclt", "lattice point has the wrong dimension");
  const int K = mu.K;
  Eigen::MatrixXd V(K, K);
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b) V(a, b) = mu.cov(a, b);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(V);
  const Eigen::VectorXd lambda = eig.eigenvalues();
  if (lambda.minCoeff() < 1e-12) fail(Error::Kind::numerical, "lclt", "covariance is singular (eigenvalue below 1e-12)");
  Eigen::VectorXd d(K);
  for (int a = 0; a < K; ++a) d(a) = M[static_cast<std::size_t>(a)] - N * mu.mean[static_cast<std::size_t>(a)];
  // z = N^{-1/2} V^{-1/2} d in the eigenbasis.
  const Eigen::VectorXd z = (eig.eigenvectors().transpose() * d).cwiseQuotient(lambda.cwiseSqrt()) / std::sqrt(N);
  const double log_det = lambda.array().log().sum();
  return -0.5 * z.squaredNorm() - 0.5 * K * std::log(2.0 * M_PI * N) - 0.5 * log_det;
}

double gaussian_approx(const InducedMeasure& mu, int N, std::span<const int> M) {
  return std::exp(log_gaussian_approx(mu, N, M));
}

}  // namespace recomb
