#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "recomb/error.hpp"
#include "recomb/fisher.hpp"
#include "recomb/information.hpp"
#include "recomb/kernel.hpp"
#include "recomb/ode.hpp"
#include "recomb/permutations.hpp"
#include "recomb/transport.hpp"

using namespace recomb;

namespace {

/// Average of f over all states that agree with `state` on the columns outside A.
std::vector<double> brute_mu_A(const PermutationTupleSpace& S, std::span<const double> f, SubsetMask A) {
  std::vector<double> out(S.size(), 0.0);
  for (std::size_t a = 0; a < S.size(); ++a) {
    double sum = 0.0;
    int count = 0;
    for (std::size_t b = 0; b < S.size(); ++b) {
      bool same = true;
      for (int i = 0; i < S.sites() && same; ++i)
        if (!A.contains(i)) same = S.digit(a, i) == S.digit(b, i);
      if (same) {
        sum += f[b];
        ++count;
      }
    }
    out[a] = sum / count;
  }
  return out;
}

double brute_mean_ent_A(const PermutationTupleSpace& S, std::span<const double> f, SubsetMask A) {
  const auto m = brute_mu_A(S, f, A);
  double s = 0.0;
  for (std::size_t a = 0; a < S.size(); ++a) s += f[a] * std::log(f[a] / m[a]);
  return s / static_cast<double>(S.size());
}

double brute_ent(std::span<const double> f) {
  double m = 0.0, s = 0.0;
  for (double x : f) m += x;
  m /= static_cast<double>(f.size());
  for (double x : f) s += x * std::log(x);
  return s / static_cast<double>(f.size()) - m * std::log(m);
}

std::size_t identity_rank(const PermutationTupleSpace& S) {
  for (std::size_t r = 0; r < S.perm_count(); ++r) {
    const auto& p = S.permutation(r);
    bool id = true;
    for (std::size_t j = 0; j < p.size(); ++j) id = id && p[j] == static_cast<int>(j);
    if (id) return r;
  }
  return S.perm_count();
}

}  // namespace

TEST(Information, Examples) {
  Rng rng(1);
  const SpaceShape s({2, 1});
  const Distribution p = oracle::random_distribution(s, rng);
  EXPECT_EQ(rel_entropy(p, p), 0.0);
  EXPECT_EQ(tv(p, p), 0.0);
  const Distribution d = Distribution::point(s, 4);
  const Distribution u = Distribution::uniform(s);
  EXPECT_NEAR(rel_entropy(d, u), std::log(6.0), 1e-14);
  EXPECT_NEAR(tv(d, u), 1 - 1.0 / 6, 1e-15);
  EXPECT_EQ(rel_entropy(u, d), std::numeric_limits<double>::infinity());
  const std::vector<double> f = {1.0, 1.0, 1.0};
  EXPECT_NEAR(ent_uniform(f), 0.0, 1e-15);
  const std::vector<double> g = {1.0, 3.0};
  EXPECT_NEAR(ent_uniform(g), 0.5 * 3 * std::log(3.0) - 2 * std::log(2.0), 1e-15);
  const std::vector<double> mu = {0.25, 0.75};
  EXPECT_NEAR(ent(g, mu), 0.75 * 3 * std::log(3.0) - 2.5 * std::log(2.5), 1e-15);
}

TEST(Information, Pinsker) {
  Rng rng(2);
  for (int rep = 0; rep < 1000; ++rep) {
    const SpaceShape s({static_cast<int>(1 + rng.below(4)), 1});
    const Distribution p = oracle::random_distribution(s, rng);
    const Distribution q = oracle::random_distribution(s, rng);
    const double t = tv(p, q);
    EXPECT_LE(2 * t * t, rel_entropy(p, q) + 1e-15);
    EXPECT_GE(rel_entropy(p, q), 0.0);
    EXPECT_LE(t, 1.0);
  }
}

TEST(Transport, PointMasses) {
  const SpaceShape s({1, 2, 1, 3});
  for (std::size_t a = 0; a < s.size(); a += 5)
    for (std::size_t b = 0; b < s.size(); b += 3)
      EXPECT_NEAR(wasserstein(Distribution::point(s, a), Distribution::point(s, b)), hamming(s, a, b), 1e-15);
}

TEST(Transport, SingleSiteEqualsTv) {
  Rng rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    const SpaceShape s({4});
    const Distribution p = oracle::random_distribution(s, rng);
    const Distribution q = oracle::random_distribution(s, rng);
    EXPECT_NEAR(wasserstein(p, q), tv(p, q), 1e-14);
  }
}

TEST(Transport, MatchesBasisEnumeration) {
  Rng rng(4);
  const SpaceShape s = SpaceShape::binary(3);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> pw(8, 0.0), qw(8, 0.0);
    const std::size_t kp = 1 + rng.below(4), kq = 1 + rng.below(4);
    for (std::size_t k = 0; k < kp; ++k) pw[rng.below(8)] += rng.uniform() + 0.05;
    for (std::size_t k = 0; k < kq; ++k) qw[rng.below(8)] += rng.uniform() + 0.05;
    const Distribution p = Distribution::from_weights(s, pw);
    const Distribution q = Distribution::from_weights(s, qw);
    const TransportPlan plan = optimal_transport(p, q);
    std::vector<std::vector<double>> cost(plan.sources.size(), std::vector<double>(plan.targets.size()));
    std::vector<double> a, b;
    for (std::size_t i = 0; i < plan.sources.size(); ++i) {
      a.push_back(p[plan.sources[i]]);
      for (std::size_t j = 0; j < plan.targets.size(); ++j) cost[i][j] = hamming(s, plan.sources[i], plan.targets[j]);
    }
    for (std::size_t j = 0; j < plan.targets.size(); ++j) b.push_back(q[plan.targets[j]]);
    EXPECT_NEAR(plan.cost, oracle::transport_lp(a, b, cost), 1e-12);
    for (std::size_t i = 0; i < a.size(); ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < b.size(); ++j) {
        EXPECT_GE(plan.at(i, j), 0.0);
        row += plan.at(i, j);
      }
      EXPECT_NEAR(row, a[i], 1e-14);
    }
    for (std::size_t j = 0; j < b.size(); ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i) col += plan.at(i, j);
      EXPECT_NEAR(col, b[j], 1e-14);
    }
  }
}

TEST(Transport, MetricAndSandwich) {
  Rng rng(5);
  const SpaceShape s({1, 2, 1});
  for (int rep = 0; rep < 200; ++rep) {
    const Distribution p = oracle::random_distribution(s, rng);
    const Distribution q = oracle::random_distribution(s, rng);
    const Distribution r = oracle::random_distribution(s, rng);
    const double pq = wasserstein(p, q);
    EXPECT_NEAR(pq, wasserstein(q, p), 1e-13);
    EXPECT_LE(pq, wasserstein(p, r) + wasserstein(r, q) + 1e-13);
    EXPECT_GE(pq, tv(p, q) - 1e-12);
    EXPECT_LE(pq, 3 * tv(p, q) + 1e-12);
  }
  const Distribution p = oracle::random_distribution(s, rng);
  EXPECT_EQ(wasserstein(p, p), 0.0);
}

TEST(Transport, MonotonicityFailsForTv) {
  const SpaceShape s = SpaceShape::binary(2);
  const auto nu = RecombinationMeasure::uniform_crossover(2);
  const Distribution p = Distribution::point(s, 3);
  const Distribution q(s, {0.5, 0.0, 0.0, 0.5});
  EXPECT_EQ(tv(p, q), 0.5);
  EXPECT_EQ(tv(convolve(p, p, nu), convolve(q, q, nu)), 5.0 / 8);
  EXPECT_LE(wasserstein(convolve(p, p, nu), convolve(q, q, nu)), wasserstein(p, q) + 1e-15);
}

TEST(Permutations, SpaceLayout) {
  const PermutationTupleSpace S(3, 2);
  EXPECT_EQ(S.size(), 36u);
  EXPECT_EQ(S.perm_count(), 6u);
  for (std::size_t r = 0; r < 6; ++r) EXPECT_EQ(S.rank(S.permutation(r)), r);
  const std::size_t id = identity_rank(S);
  for (std::size_t a = 0; a < 6; ++a) {
    EXPECT_EQ(S.compose(a, id), a);
    EXPECT_EQ(S.compose(id, a), a);
    for (std::size_t b = 0; b < 6; ++b) {
      const auto& pa = S.permutation(a);
      const auto& pb = S.permutation(b);
      const auto& ab = S.permutation(S.compose(a, b));
      for (int j = 0; j < 3; ++j) EXPECT_EQ(ab[static_cast<std::size_t>(j)], pa[static_cast<std::size_t>(pb[static_cast<std::size_t>(j)])]);
    }
  }
  EXPECT_THROW(PermutationTupleSpace(7, 1), Error);
  EXPECT_THROW(PermutationTupleSpace(6, 3), Error);
}

TEST(Permutations, ExchangeSwapsColumnEntries) {
  const PermutationTupleSpace S(3, 2);
  for (std::size_t st = 0; st < S.size(); ++st)
    for (std::uint64_t m = 0; m < 4; ++m) {
      const std::size_t out = S.exchange(st, 0, 2, SubsetMask{m});
      EXPECT_EQ(S.exchange(out, 0, 2, SubsetMask{m}), st);
      for (int i = 0; i < 2; ++i) {
        auto col = S.permutation(S.digit(st, i));
        if (SubsetMask{m}.contains(i)) std::swap(col[0], col[2]);
        EXPECT_EQ(S.digit(out, i), S.rank(col));
      }
    }
}

TEST(Permutations, TwoStateDirichletForm) {
  const PermutationTupleSpace S(2, 1);
  const std::size_t id = identity_rank(S);
  const double a = 0.7, b = 2.9;
  std::vector<double> f(2);
  f[id] = a;
  f[1 - id] = b;
  const auto de = dirichlet_mlsi(S, f, RecombinationMeasure::single_site(1));
  EXPECT_NEAR(de.dirichlet, 0.25 * (a - b) * (std::log(a) - std::log(b)), 1e-15);
  const double m = (a + b) / 2;
  EXPECT_NEAR(de.entropy, 0.5 * (a * std::log(a) + b * std::log(b)) - m * std::log(m), 1e-15);
  ASSERT_TRUE(de.ratio.has_value());
  const auto half = dirichlet_mlsi(S, f, RecombinationMeasure::uniform_crossover(1));
  EXPECT_NEAR(half.dirichlet, 0.5 * de.dirichlet, 1e-15);
  const auto flat = dirichlet_mlsi(S, std::vector<double>{1.5, 1.5}, RecombinationMeasure::single_site(1));
  EXPECT_EQ(flat.dirichlet, 0.0);
  EXPECT_FALSE(flat.ratio.has_value());
  EXPECT_THROW(dirichlet_mlsi(S, std::vector<double>{0.0, 1.0}, RecombinationMeasure::single_site(1)), Error);
}

TEST(Permutations, DirichletMatchesDefinition) {
  Rng rng(6);
  const PermutationTupleSpace S(3, 2);
  const auto nu = RecombinationMeasure::one_point(2);
  const auto f = random_positive(S.size(), rng);
  double e = 0.0;
  for (const Atom& atom : nu.atoms())
    for (int j = 0; j < 3; ++j)
      for (int l = j + 1; l < 3; ++l)
        for (std::size_t st = 0; st < S.size(); ++st) {
          const double g = f[S.exchange(st, j, l, atom.mask)];
          e += atom.p * (g - f[st]) * std::log(g / f[st]);
        }
  e /= 2.0 * 3 * static_cast<double>(S.size());
  const auto de = dirichlet_mlsi(S, f, nu);
  EXPECT_NEAR(de.dirichlet, e, 1e-14);
  EXPECT_NEAR(de.entropy, brute_ent(f), 1e-14);
}

TEST(Permutations, Symmetrize) {
  const PermutationTupleSpace S2(2, 1);
  const auto two = symmetrize(S2, std::vector<double>{1.0, 4.0});
  EXPECT_EQ(two, (std::vector<double>{2.5, 2.5}));
  Rng rng(7);
  const PermutationTupleSpace S(3, 2);
  const auto f = random_positive(S.size(), rng);
  const auto g = symmetrize(S, f);
  EXPECT_NEAR(mean(g), mean(f), 1e-14);
  const auto gg = symmetrize(S, g);
  for (std::size_t st = 0; st < S.size(); ++st) EXPECT_NEAR(gg[st], g[st], 1e-14);
  for (std::size_t tau = 0; tau < 6; ++tau)
    for (std::size_t st = 0; st < S.size(); ++st) EXPECT_NEAR(g[S.relabel(st, tau, SubsetMask::full(2))], g[st], 1e-14);
  EXPECT_NEAR(phi(S, g, SubsetMask::full(2)), 0.0, 1e-14);
}

TEST(Permutations, ProjectionsAndEntropies) {
  Rng rng(8);
  const PermutationTupleSpace S(3, 2);
  for (int rep = 0; rep < 20; ++rep) {
    const auto f = random_positive(S.size(), rng);
    const auto id = project_PA(S, f, SubsetMask{});
    for (std::size_t st = 0; st < S.size(); ++st) EXPECT_NEAR(id[st], f[st], 1e-15);
    EXPECT_NEAR(phi(S, f, SubsetMask{}), 0.0, 1e-15);
    for (std::uint64_t m = 0; m < 4; ++m) {
      const SubsetMask A{m};
      const auto pa = project_PA(S, f, A);
      const auto papa = project_PA(S, pa, A);
      for (std::size_t st = 0; st < S.size(); ++st) EXPECT_NEAR(papa[st], pa[st], 1e-13);
      EXPECT_NEAR(mean(pa), mean(f), 1e-13);
      const auto mu = mu_A(S, f, A);
      const auto oracle_mu = brute_mu_A(S, f, A);
      for (std::size_t st = 0; st < S.size(); ++st) EXPECT_NEAR(mu[st], oracle_mu[st], 1e-13);
      EXPECT_NEAR(mean(ent_A(S, f, A)), brute_mean_ent_A(S, f, A), 1e-13);
      EXPECT_GE(phi(S, f, A), -1e-15);
      // phi(A) = mu[ent_A f] - mu[ent_A P_A f]
      EXPECT_NEAR(phi(S, f, A), brute_mean_ent_A(S, f, A) - brute_mean_ent_A(S, pa, A), 1e-10);
      for (std::uint64_t mb = 0; mb < 4; ++mb) {
        if ((m & ~mb) != 0) continue;
        const auto ab = project_PA(S, project_PA(S, f, SubsetMask{mb}), A);
        const auto ba = project_PA(S, pa, SubsetMask{mb});
        for (std::size_t st = 0; st < S.size(); ++st) EXPECT_NEAR(ab[st], ba[st], 1e-13);
      }
    }
    for (int i = 0; i < 2; ++i)
      EXPECT_NEAR(phi(S, f, SubsetMask::single(i)), brute_mean_ent_A(S, f, SubsetMask::single(i)), 1e-13);
  }
}

TEST(Inequalities, Shearer) {
  Rng rng(9);
  const PermutationTupleSpace S(3, 2);
  const auto flat = shearer_check(S, std::vector<double>(S.size(), 2.0), RecombinationMeasure::uniform_crossover(2));
  EXPECT_NEAR(flat.lhs, 0.0, 1e-15);
  EXPECT_NEAR(flat.rhs, 0.0, 1e-15);
  for (const auto& nu : {RecombinationMeasure::uniform_crossover(2), RecombinationMeasure::one_point(2),
                         RecombinationMeasure::single_site(2)})
    for (int rep = 0; rep < 1000; ++rep) {
      const auto f = random_positive(S.size(), rng);
      EXPECT_TRUE(shearer_check(S, f, nu).holds()) << nu.kind_name();
    }
}

TEST(Inequalities, Tensorization) {
  Rng rng(10);
  const PermutationTupleSpace S(2, 3);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto f = random_positive(S.size(), rng);
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) sum += brute_mean_ent_A(S, f, SubsetMask::single(i));
    EXPECT_GE(sum - brute_ent(f), -1e-12);
    const auto c = shearer_check(S, f, RecombinationMeasure::single_site(3));
    EXPECT_NEAR(c.lhs * 3, sum, 1e-12);
  }
}

TEST(Inequalities, GQTwoPoint) {
  const PermutationTupleSpace S(2, 1);
  const std::size_t id = identity_rank(S);
  const double a = 0.4, b = 3.1;
  std::vector<double> g(2);
  g[id] = a;
  g[1 - id] = b;
  const auto c = gq_check(2, g);
  EXPECT_NEAR(c.lhs, (b - a) * std::log(b / a), 1e-14);
  EXPECT_NEAR(c.rhs, a * std::log(2 * a / (a + b)) + b * std::log(2 * b / (a + b)), 1e-14);
  const auto flat = gq_check(3, std::vector<double>(6, 1.0));
  EXPECT_EQ(flat.lhs, 0.0);
  EXPECT_NEAR(flat.rhs, 0.0, 1e-15);
}

TEST(Inequalities, GQRandom) {
  Rng rng(11);
  for (int N = 2; N <= 4; ++N) {
    std::size_t size = 1;
    for (int k = 2; k <= N; ++k) size *= static_cast<std::size_t>(k);
    for (int rep = 0; rep < 10000; ++rep) EXPECT_TRUE(gq_check(N, random_positive(size, rng)).holds());
  }
}

TEST(Inequalities, KeyPhiAndPhiaGQ) {
  Rng rng(12);
  const PermutationTupleSpace S(3, 2);
  for (int rep = 0; rep < 1000; ++rep) {
    const auto f = random_positive(S.size(), rng);
    const auto zero = keyphi_check(S, f, SubsetMask{}, SubsetMask::single(1));
    EXPECT_NEAR(zero.margin, 0.0, 1e-13);
    EXPECT_TRUE(keyphi_check(S, f, SubsetMask::single(0), SubsetMask::single(1)).holds());
    EXPECT_TRUE(keyphi_check(S, f, SubsetMask{}, SubsetMask::full(2)).holds());
    for (std::uint64_t m = 0; m < 4; ++m) EXPECT_TRUE(phia_gq_check(S, f, SubsetMask{m}).holds());
  }
  const PermutationTupleSpace T(2, 3);
  for (int rep = 0; rep < 200; ++rep) {
    const auto f = random_positive(T.size(), rng);
    EXPECT_TRUE(keyphi_check(T, f, SubsetMask{0b001}, SubsetMask{0b110}).holds());
    EXPECT_TRUE(keyphi_check(T, f, SubsetMask{0b011}, SubsetMask{0b100}).holds());
  }
}

TEST(Mlsi, RatiosClearCertifiedConstants) {
  Rng rng(13);
  MlsiSearchOptions o;
  o.trials = 2000;
  o.descent_steps = 50;
  for (auto [N, n] : {std::pair{3, 1}, std::pair{3, 2}, std::pair{2, 3}}) {
    const PermutationTupleSpace S(N, n);
    EXPECT_GE(mlsi_search(S, RecombinationMeasure::uniform_crossover(n), rng, o).min_ratio, 1.0 / (4 * n));
    EXPECT_GE(mlsi_search(S, RecombinationMeasure::one_point(n), rng, o).min_ratio, 1.0 / (4 * (n + 1)));
    MlsiSearchOptions so = o;
    so.symmetrized = true;
    if (n == 1) {
      // Symmetric functions of a single column are constant.
      EXPECT_THROW(mlsi_search(S, RecombinationMeasure::uniform_crossover(n), rng, so), Error);
      continue;
    }
    const auto sym = mlsi_search(S, RecombinationMeasure::uniform_crossover(n), rng, so);
    EXPECT_GE(sym.min_ratio, 1.0 / (2 * (n + 2)));
    EXPECT_EQ(sym.trials, o.trials);
    const auto check = dirichlet_mlsi(S, sym.worst, RecombinationMeasure::uniform_crossover(n));
    ASSERT_TRUE(check.ratio.has_value());
    EXPECT_NEAR(*check.ratio, sym.min_ratio, 1e-12);
  }
}

TEST(Fisher, StationaryAndSign) {
  Rng rng(14);
  const SpaceShape s({1, 2, 1});
  const auto nu = RecombinationMeasure::uniform_crossover(3);
  const Distribution p = oracle::random_distribution(s, rng);
  EXPECT_NEAR(fisher_nonlinear(p.product_of_marginals(), nu), 0.0, 1e-15);
  for (int n = 2; n <= 4; ++n)
    for (int rep = 0; rep < 50; ++rep) {
      const auto u = RecombinationMeasure::uniform_crossover(n);
      const Distribution q = oracle::random_distribution(SpaceShape::binary(n), rng);
      const double d = fisher_nonlinear(q, u);
      const double h = rel_entropy(q, q.product_of_marginals());
      EXPECT_LE(d, 0.0);
      EXPECT_GE(-d, h / (2.0 * (n + 2)) - 1e-14);
    }
}

TEST(Fisher, MatchesFiniteDifference) {
  Rng rng(15);
  for (const auto& nu : {RecombinationMeasure::uniform_crossover(3), RecombinationMeasure::one_point(3)}) {
    const Distribution p = oracle::random_distribution(SpaceShape::binary(3), rng);
    const Distribution pi = p.product_of_marginals();
    // One-sided second-order difference at step 1e-5.
    const double dt = 1e-5;
    const double h0 = rel_entropy(p, pi);
    const double h1 = rel_entropy(evolve_to(p, nu, dt, dt), pi);
    const double h2 = rel_entropy(evolve_to(p, nu, 2 * dt, dt), pi);
    const double fd = (-3 * h0 + 4 * h1 - h2) / (2 * dt);
    EXPECT_NEAR(fd, fisher_nonlinear(p, nu), 1e-6);
  }
}

TEST(Fisher, SupportMismatchThrows) {
  const Distribution p(SpaceShape::binary(2), {0.5, 0.0, 0.0, 0.5});
  EXPECT_THROW(fisher_nonlinear(p, RecombinationMeasure::uniform_crossover(2)), Error);
}
