#pragma once

#include "recomb/distribution.hpp"
#include "recomb/particles.hpp"
#include "recomb/recombination.hpp"

namespace recomb {

/// P_k of the canonical tensor product gamma(p, rho) as a distribution on
/// power_shape(shape, k): prod p(sigma_a) T_{N-k}(M - sum xi(sigma_a)) / T_N(M).
Distribution exact_k_marginal(const Distribution& p, const AdmissibleDensity& rho, int k);

/// log p^{(x)N}(sector of rho) from the lattice table.
double sector_log_probability(const Distribution& p, const AdmissibleDensity& rho);
/// log pi^{(x)N}(sector) for a product law given by its site marginals (closed form).
double product_sector_log_probability(const std::vector<std::vector<double>>& pi, const AdmissibleDensity& rho);

struct EntropicChaos {
  double per_particle = 0.0;  // (1/N) H_N(gamma(p, rho) | gamma(pi, rho))
  double one_particle_term = 0.0;
  double log_p_sector = 0.0;
  double log_pi_sector = 0.0;
};

/// pi is the product of the site marginals of p.
EntropicChaos entropic_chaos_terms(const Distribution& p, const AdmissibleDensity& rho);
double entropic_chaos(const Distribution& p, const AdmissibleDensity& rho);

/// D_N(f_N) / N for f_N = gamma(p, rho) / gamma(pi, rho), through exchangeability:
/// -((N-1) / (4N)) sum_A nu(A) sum_{sigma,tau} P_2(sigma, tau) (R - 1) log R,
/// with R the ratio of p-weights after and before exchanging the A-blocks.
double fisher_particle(const Distribution& p, const AdmissibleDensity& rho, const RecombinationMeasure& nu);

}  // namespace recomb
