#include "recomb/permutations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "recomb/error.hpp"
#include "recomb/information.hpp"

namespace recomb {

PermutationTupleSpace::PermutationTupleSpace(int N, int n) : N_(N), n_(n) {
  require(N >= 2 && N <= kMaxParticles, "analysis", "permutation spaces need 2 <= N <= 6");
  require(n >= 1 && n <= SpaceShape::kMaxSites, "analysis", "site count out of range");
  std::vector<int> p(static_cast<std::size_t>(N));
  std::iota(p.begin(), p.end(), 0);
  do perms_.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  const std::size_t P = perms_.size();
  size_ = 1;
  for (int i = 0; i < n; ++i) {
    power_.push_back(size_);
    if (size_ > kMaxStates / P)
      fail(Error::Kind::cap_exceeded, "analysis",
           "(N!)^n exceeds 2*10^6 for N=" + std::to_string(N) + ", n=" + std::to_string(n));
    size_ *= P;
  }
  compose_.resize(P * P);
  std::vector<int> c(static_cast<std::size_t>(N));
  for (std::size_t a = 0; a < P; ++a)
    for (std::size_t b = 0; b < P; ++b) {
      for (int j = 0; j < N; ++j)
        c[static_cast<std::size_t>(j)] = perms_[a][static_cast<std::size_t>(perms_[b][static_cast<std::size_t>(j)])];
      compose_[a * P + b] = rank(c);
    }
}

std::size_t PermutationTupleSpace::rank(std::span<const int> perm) const {
  const auto it = std::lower_bound(perms_.begin(), perms_.end(), perm,
                                   [](const std::vector<int>& a, std::span<const int> b) {
                                     return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
                                   });
  require(it != perms_.end() && std::equal(it->begin(), it->end(), perm.begin(), perm.end()), "analysis",
          "not a permutation of the particle labels");
  return static_cast<std::size_t>(it - perms_.begin());
}

std::size_t PermutationTupleSpace::transposition(int j, int l) const {
  require(j >= 0 && l < N_ && j < l, "analysis", "transposition needs 0 <= j < l < N");
  std::vector<int> t(static_cast<std::size_t>(N_));
  std::iota(t.begin(), t.end(), 0);
  std::swap(t[static_cast<std::size_t>(j)], t[static_cast<std::size_t>(l)]);
  return rank(t);
}

std::size_t PermutationTupleSpace::relabel(std::size_t state, std::size_t tau, SubsetMask A) const {
  std::size_t out = state;
  for (int i = 0; i < n_; ++i) {
    if (!A.contains(i)) continue;
    const std::size_t d = digit(state, i);
    const std::size_t e = compose(d, tau);
    out = out - d * power_[static_cast<std::size_t>(i)] + e * power_[static_cast<std::size_t>(i)];
  }
  return out;
}

std::size_t PermutationTupleSpace::exchange(std::size_t state, int j, int l, SubsetMask A) const {
  if (j > l) std::swap(j, l);
  return relabel(state, transposition(j, l), A);
}

double mean(std::span<const double> f) {
  return std::accumulate(f.begin(), f.end(), 0.0) / static_cast<double>(f.size());
}

namespace {

void check_function(const PermutationTupleSpace& space, std::span<const double> f, bool positive) {
  require(f.size() == space.size(), "analysis", "function length does not match |S_N^n|");
  if (positive)
    for (double x : f) require(x > 0.0 && std::isfinite(x), "analysis", "function must be strictly positive");
}

std::vector<std::size_t> transpositions(const PermutationTupleSpace& space) {
  std::vector<std::size_t> out;
  for (int j = 0; j < space.particles(); ++j)
    for (int l = j + 1; l < space.particles(); ++l) out.push_back(space.transposition(j, l));
  return out;
}

double pair_term(double a, double b) { return (b - a) * std::log(b / a); }

}  // namespace

DirichletOperator::DirichletOperator(const PermutationTupleSpace& space, const RecombinationMeasure& nu)
    : space_(space) {
  require(nu.sites() == space.sites(), "analysis", "measure and permutation space disagree on the site count");
  const auto taus = transpositions(space);
  for (const Atom& atom : nu.atoms()) {
    if (atom.mask.empty()) continue;
    for (std::size_t t : taus) {
      std::vector<std::uint32_t> to(space.size());
      for (std::size_t s = 0; s < space.size(); ++s) to[s] = static_cast<std::uint32_t>(space.relabel(s, t, atom.mask));
      weight_.push_back(atom.p);
      to_.push_back(std::move(to));
    }
  }
}

DirichletEntropy DirichletOperator::evaluate(std::span<const double> f) const {
  check_function(space_, f, true);
  DirichletEntropy out;
  double e = 0.0;
  for (std::size_t k = 0; k < to_.size(); ++k) {
    double s = 0.0;
    for (std::size_t x = 0; x < f.size(); ++x) s += pair_term(f[x], f[to_[k][x]]);
    e += weight_[k] * s;
  }
  out.dirichlet = e / (2.0 * space_.particles() * static_cast<double>(f.size()));
  out.entropy = ent_uniform(f);
  if (out.entropy > 1e-12 * mean(f)) out.ratio = out.dirichlet / out.entropy;
  return out;
}

DirichletEntropy dirichlet_mlsi(const PermutationTupleSpace& space, std::span<const double> f,
                                const RecombinationMeasure& nu) {
  return DirichletOperator(space, nu).evaluate(f);
}

std::vector<double> project_PA(const PermutationTupleSpace& space, std::span<const double> f, SubsetMask A) {
  check_function(space, f, false);
  if (A.empty()) return {f.begin(), f.end()};
  std::vector<double> out(f.size(), 0.0);
  const std::size_t P = space.perm_count();
  for (std::size_t s = 0; s < f.size(); ++s) {
    double acc = 0.0;
    for (std::size_t tau = 0; tau < P; ++tau) acc += f[space.relabel(s, tau, A)];
    out[s] = acc / static_cast<double>(P);
  }
  return out;
}

std::vector<double> symmetrize(const PermutationTupleSpace& space, std::span<const double> f) {
  return project_PA(space, f, SubsetMask::full(space.sites()));
}

std::vector<double> mu_A(const PermutationTupleSpace& space, std::span<const double> f, SubsetMask A) {
  check_function(space, f, false);
  std::vector<double> cur(f.begin(), f.end());
  std::vector<double> next(f.size());
  const std::size_t P = space.perm_count();
  for (int i = 0; i < space.sites(); ++i) {
    if (!A.contains(i)) continue;
    const SubsetMask single = SubsetMask::single(i);
    for (std::size_t s = 0; s < f.size(); ++s) {
      double acc = 0.0;
      for (std::size_t tau = 0; tau < P; ++tau) acc += cur[space.relabel(s, tau, single)];
      next[s] = acc / static_cast<double>(P);
    }
    std::swap(cur, next);
  }
  return cur;
}

std::vector<double> ent_A(const PermutationTupleSpace& space, std::span<const double> f, SubsetMask A) {
  check_function(space, f, true);
  const auto m = mu_A(space, f, A);
  std::vector<double> g(f.size());
  for (std::size_t s = 0; s < f.size(); ++s) g[s] = f[s] * std::log(f[s] / m[s]);
  return mu_A(space, g, A);
}

double phi(const PermutationTupleSpace& space, std::span<const double> f, SubsetMask A) {
  check_function(space, f, true);
  const auto pa = project_PA(space, f, A);
  double s = 0.0;
  for (std::size_t x = 0; x < f.size(); ++x) s += f[x] * std::log(f[x] / pa[x]);
  return s / static_cast<double>(f.size());
}

double block_dirichlet(const PermutationTupleSpace& space, std::span<const double> f, SubsetMask A) {
  check_function(space, f, true);
  if (A.empty()) return 0.0;
  double e = 0.0;
  for (std::size_t t : transpositions(space))
    for (std::size_t x = 0; x < f.size(); ++x) e += pair_term(f[x], f[space.relabel(x, t, A)]);
  return e / (2.0 * space.particles() * static_cast<double>(f.size()));
}

InequalityCheck shearer_check(const PermutationTupleSpace& space, std::span<const double> f,
                              const RecombinationMeasure& nu) {
  require(nu.sites() == space.sites(), "analysis", "measure and permutation space disagree on the site count");
  InequalityCheck c;
  for (const Atom& atom : nu.atoms()) {
    if (atom.mask.empty()) continue;
    c.lhs += atom.p * mean(ent_A(space, f, atom.mask));
  }
  c.rhs = nu.coverage() * ent_uniform(f);
  c.margin = c.lhs - c.rhs;
  return c;
}

InequalityCheck gq_check(int N, std::span<const double> g) {
  const PermutationTupleSpace space(N, 1);
  check_function(space, g, true);
  const double gbar = mean(g);
  InequalityCheck c;
  for (double x : g) c.rhs += x * std::log(x / gbar);
  for (std::size_t t : transpositions(space))
    for (std::size_t x = 0; x < g.size(); ++x) c.lhs += pair_term(g[x], g[space.compose(x, t)]);
  c.lhs /= N;
  c.margin = c.lhs - c.rhs;
  return c;
}

InequalityCheck keyphi_check(const PermutationTupleSpace& space, std::span<const double> f, SubsetMask A,
                             SubsetMask V) {
  const int n = space.sites();
  require(A.size() <= n - 1, "analysis", "the base set must leave at least one site out");
  require((V & A).empty() && V.subset_of(SubsetMask::full(n)), "analysis", "V must lie in the complement of A");
  InequalityCheck c;
  c.lhs = phi(space, f, A);
  for (int i = 0; i < n; ++i)
    if (V.contains(i)) c.lhs += phi(space, f, A.with(i));
  c.rhs = mean(ent_A(space, f, V));
  c.margin = c.lhs - c.rhs;
  return c;
}

InequalityCheck phia_gq_check(const PermutationTupleSpace& space, std::span<const double> f, SubsetMask A) {
  InequalityCheck c;
  c.lhs = 2.0 * block_dirichlet(space, f, A);
  c.rhs = phi(space, f, A);
  c.margin = c.lhs - c.rhs;
  return c;
}

std::vector<double> random_positive(std::size_t size, Rng& rng) {
  std::vector<double> f(size);
  for (double& x : f) x = std::exp(rng.normal());
  return f;
}

MlsiSearch mlsi_search(const PermutationTupleSpace& space, const RecombinationMeasure& nu, Rng& rng,
                       const MlsiSearchOptions& options) {
  const DirichletOperator op(space, nu);
  auto prepare = [&](std::vector<double> f) { return options.symmetrized ? symmetrize(space, f) : f; };
  MlsiSearch out;
  out.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < options.trials; ++t) {
    auto f = prepare(random_positive(space.size(), rng));
    const auto r = op.evaluate(f).ratio;
    if (!r) continue;
    ++out.trials;
    if (*r < out.min_ratio) {
      out.min_ratio = *r;
      out.worst_trial = t;
      out.worst = std::move(f);
    }
  }
  if (out.worst.empty()) fail(Error::Kind::invalid_argument, "analysis", "no trial function had positive entropy");
  for (std::size_t s = 0; s < options.descent_steps; ++s) {
    std::vector<double> g = out.worst;
    for (double& x : g) x *= std::exp(options.descent_step * rng.normal());
    g = prepare(std::move(g));
    const auto r = op.evaluate(g).ratio;
    if (r && *r < out.min_ratio) {
      out.min_ratio = *r;
      out.worst = std::move(g);
    }
  }
  return out;
}

}  // namespace recomb
