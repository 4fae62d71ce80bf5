#include "recomb/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "recomb/error.hpp"
#include "recomb/induced.hpp"
#include "recomb/lattice_dp.hpp"

namespace recomb {

namespace {

constexpr std::size_t kMaxTupleSpace = std::size_t{1} << 20;

void check_density(const SpaceShape& shape, const AdmissibleDensity& rho) {
  require(static_cast<int>(rho.counts.size()) == shape.sites(), "lclt", "density has the wrong site count");
  for (int i = 0; i < shape.sites(); ++i)
    require(static_cast<int>(rho.counts[static_cast<std::size_t>(i)].size()) == shape.radix(i), "lclt",
            "density row has the wrong length");
}

std::size_t exchange(const SpaceShape& shape, std::size_t into, std::size_t from, SubsetMask A) {
  std::size_t out = into;
  for (int s = 0; s < shape.sites(); ++s) {
    if (!A.contains(s)) continue;
    const auto stride = shape.stride(s);
    out -= static_cast<std::size_t>(shape.letter(into, s)) * stride;
    out += static_cast<std::size_t>(shape.letter(from, s)) * stride;
  }
  return out;
}

}  // namespace

Distribution exact_k_marginal(const Distribution& p, const AdmissibleDensity& rho, int k) {
  const SpaceShape& shape = p.shape();
  check_density(shape, rho);
  const int N = rho.N;
  require(k >= 1 && k <= 4 && k <= N, "lclt", "marginal order must lie in [1, min(4, N)]");
  const SpaceShape big = power_shape(shape, k);
  require(big.size() <= kMaxTupleSpace, "lclt", "|Omega|^k exceeds 2^20");

  const LatticeDP dp(induce(p), N, {N - k});
  const std::vector<int> M = rho.lattice_point();
  const double denom = dp.prob(N, M);
  if (!(denom > 0.0)) fail(Error::Kind::invalid_argument, "lclt", "sector has zero probability under p");

  std::vector<std::vector<std::uint8_t>> xi(shape.size());
  for (std::size_t c = 0; c < shape.size(); ++c) xi[c] = induced_point(shape, c);
  const std::size_t K = M.size();
  std::vector<double> out(big.size(), 0.0);
  std::vector<int> u(K);
  std::vector<std::size_t> slots(static_cast<std::size_t>(k));
  for (std::size_t idx = 0; idx < big.size(); ++idx) {
    std::size_t rest = idx;
    for (auto& c : slots) {
      c = rest % shape.size();
      rest /= shape.size();
    }
    // Multiplying in sorted order makes the output exactly exchangeable.
    std::sort(slots.begin(), slots.end());
    double w = 1.0;
    std::fill(u.begin(), u.end(), 0);
    for (std::size_t c : slots) {
      w *= p[c];
      for (std::size_t d = 0; d < K; ++d) u[d] += xi[c][d];
    }
    if (w <= 0.0) continue;
    for (std::size_t d = 0; d < K; ++d) u[d] = M[d] - u[d];
    out[idx] = w * dp.prob(N - k, u) / denom;
  }
  double total = 0.0;
  for (double x : out) total += x;
  if (std::abs(total - 1.0) > 1e-10)
    fail(Error::Kind::numerical, "lclt", "k-marginal mass " + std::to_string(total) + " differs from 1");
  for (double& x : out) x /= total;
  return Distribution(big, std::move(out));
}

double sector_log_probability(const Distribution& p, const AdmissibleDensity& rho) {
  check_density(p.shape(), rho);
  const LatticeDP dp(induce(p), rho.N);
  return dp.log_prob(rho.N, rho.lattice_point());
}

double product_sector_log_probability(const std::vector<std::vector<double>>& pi, const AdmissibleDensity& rho) {
  require(pi.size() == rho.counts.size(), "lclt", "marginals and density disagree on the site count");
  double s = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    s += std::lgamma(rho.N + 1.0);
    for (std::size_t x = 0; x < pi[i].size(); ++x) {
      const int c = rho.counts[i][x];
      if (c == 0) continue;
      if (pi[i][x] <= 0.0) return -std::numeric_limits<double>::infinity();
      s += c * std::log(pi[i][x]) - std::lgamma(c + 1.0);
    }
  }
  return s;
}

EntropicChaos entropic_chaos_terms(const Distribution& p, const AdmissibleDensity& rho) {
  const auto marginals = p.site_marginals();
  const Distribution pi = Distribution::product(p.shape(), marginals);
  const Distribution p1 = exact_k_marginal(p, rho, 1);
  EntropicChaos out;
  for (std::size_t c = 0; c < p.size(); ++c)
    if (p1[c] > 0.0) out.one_particle_term += p1[c] * std::log(p[c] / pi[c]);
  out.log_p_sector = sector_log_probability(p, rho);
  out.log_pi_sector = product_sector_log_probability(marginals, rho);
  out.per_particle = out.one_particle_term + (out.log_pi_sector - out.log_p_sector) / rho.N;
  return out;
}

double entropic_chaos(const Distribution& p, const AdmissibleDensity& rho) {
  return entropic_chaos_terms(p, rho).per_particle;
}

double fisher_particle(const Distribution& p, const AdmissibleDensity& rho, const RecombinationMeasure& nu) {
  const SpaceShape& shape = p.shape();
  require(nu.sites() == shape.sites(), "lclt", "measure and distribution disagree on the site count");
  require(rho.N >= 2, "lclt", "particle Fisher functional needs N >= 2");
  for (std::size_t c = 0; c < p.size(); ++c)
    require(p[c] > 0.0, "lclt", "particle Fisher functional needs a strictly positive p");
  const Distribution p2 = exact_k_marginal(p, rho, 2);
  const std::size_t m = shape.size();
  double acc = 0.0;
  for (const Atom& atom : nu.atoms()) {
    double s = 0.0;
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) {
        const double w = p2[a + m * b];
        if (w <= 0.0) continue;
        const std::size_t a2 = exchange(shape, a, b, atom.mask);
        const std::size_t b2 = exchange(shape, b, a, atom.mask);
        const double R = (p[a2] * p[b2]) / (p[a] * p[b]);
        s += w * (R - 1.0) * std::log(R);
      }
    acc += atom.p * s;
  }
  const double N = rho.N;
  return -(N - 1.0) / (4.0 * N) * acc;
}

}  // namespace recomb
