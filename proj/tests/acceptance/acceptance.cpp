// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "recomb/csv.hpp"
#include "recomb/experiments.hpp"
#include "recomb/information.hpp"
#include "recomb/kernel.hpp"
#include "recomb/ode.hpp"
#include "recomb/permutations.hpp"
#include "recomb/transport.hpp"

#ifndef RECOMB_CONFIG_DIR
#error "RECOMB_CONFIG_DIR must point at the configs/ directory"
#endif

using namespace recomb;
using json = nlohmann::json;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

json load(const std::string& name) {
  std::ifstream in(std::string(RECOMB_CONFIG_DIR) + "/" + name);
  if (!in) throw std::runtime_error("missing config " + name);
  return json::parse(in);
}

/// Every CSV body produced, keyed by "<config>@<seed>", for the determinism rerun.
std::map<std::string, std::vector<std::string>> g_bodies;
std::map<std::string, json> g_configs;

ExperimentOutput run(const std::string& name, std::optional<std::uint64_t> seed = {}) {
  const json cfg = load(name);
  ExperimentOutput out = run_experiment(cfg, seed);
  const std::string key = name + "@" + std::to_string(out.seed);
  std::vector<std::string> bodies;
  for (const auto& t : out.tables) bodies.push_back(out.csv_body(t));
  g_bodies[key] = bodies;
  json c = cfg;
  c["seed"] = out.seed;
  g_configs[key] = c;
  return out;
}

double metric(const ExperimentOutput& out, const char* key) { return out.metrics.at(key).get<double>(); }

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

Verdict closed_form() {
  const auto t0 = std::chrono::steady_clock::now();
  const SpaceShape s = SpaceShape::binary(2);
  const Distribution p0(s, {0.5, 0.0, 0.0, 0.5});
  const Distribution pi = Distribution::uniform(s);
  const SolveTrace trace = evolve(p0, RecombinationMeasure::uniform_crossover(2), 10.0);
  double worst = 0.0;
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    const double decay = std::exp(-trace.times[k] / 2);
    for (std::size_t c = 0; c < s.size(); ++c)
      worst = std::max(worst, std::abs(trace.states[k][c] - (pi[c] + decay * (p0[c] - pi[c]))));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-8 && secs < 1.0,
          "max entry error " + fmt("%.3g", worst) + " over " + std::to_string(trace.times.size()) +
              " grid points (tol 1e-8), " + fmt("%.3f", secs) + " s (limit 1 s)"};
}

Verdict solver_triangle() {
  const auto t0 = std::chrono::steady_clock::now();
  double wild = 0.0, mc = 0.0;
  bool ok = true;
  for (std::uint64_t seed : {11, 12, 13}) {
    const auto w = run("wild_n3.json", seed);
    const auto m = run("mckean_n3.json", seed);
    wild = std::max(wild, metric(w, "max_tv"));
    mc = std::max(mc, metric(m, "max_tv"));
    ok = ok && w.passed && m.passed;
  }
  const double secs = seconds_since(t0);
  return {ok && secs < 120.0, "wild vs rk4 max TV " + fmt("%.3g", wild) + " (tol 1e-8), mckean vs rk4 max TV " +
                                  fmt("%.3g", mc) + " (tol 0.005), 3 seeds, " + fmt("%.1f", secs) + " s (limit 120 s)"};
}

Verdict omega_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto out = run("omega.json");
  const double secs = seconds_since(t0);
  return {out.passed && secs < 60.0, "max |z| " + fmt("%.3f", metric(out, "max_abs_z")) + " over 9 (r, t) cells (limit 3), " +
                                         fmt("%.1f", secs) + " s (limit 60 s)"};
}

Verdict tv_decay() {
  const auto out = run("tv_decay.json");
  return {out.passed, "min bound margin " + fmt("%.3g", metric(out, "min_margin")) +
                          " over 100 (p, nu) pairs (tol -1e-9), two-point slope " +
                          fmt("%.6f", metric(out, "rate_slope")) + " on [5, 15] (target -0.5 +- 0.02)"};
}

Verdict entropy_decay() {
  const auto out = run("entropy_decay.json");
  return {out.passed, "min margin " + fmt("%.3g", metric(out, "min_margin")) + " over 100 random p, n in {2,3,4} (tol -1e-9)"};
}

Verdict mlsi() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::string> configs = {
      "mlsi_N3_n1_uniform.json",  "mlsi_N3_n2_uniform.json",  "mlsi_N2_n3_uniform.json",
      "mlsi_N3_n1_onepoint.json", "mlsi_N3_n2_onepoint.json", "mlsi_N2_n3_onepoint.json",
      "mlsi_N3_n2_uniform_sym.json", "mlsi_N2_n3_uniform_sym.json"};
  bool ok = true;
  double worst = INFINITY;
  std::string worst_name;
  for (const auto& c : configs) {
    const auto out = run(c);
    ok = ok && out.passed;
    if (metric(out, "min_margin") < worst) {
      worst = metric(out, "min_margin");
      worst_name = c;
    }
  }
  const double secs = seconds_since(t0);
  return {ok && secs < 300.0, std::to_string(configs.size()) + " certificates, smallest margin " + fmt("%.4f", worst) +
                                  " (" + worst_name + "), symmetrized n=1 is vacuous and skipped, " +
                                  fmt("%.1f", secs) + " s (limit 300 s)"};
}

Verdict upper_bound() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto out = run("upper_bound.json");
  const double secs = seconds_since(t0);
  return {out.passed && secs < 60.0, "max ratio*n " + fmt("%.4f", metric(out, "max_ratio_times_n")) +
                                         " for n = 4..10, each within 10/n of 4 and below 4 + 10/n, " +
                                         fmt("%.2f", secs) + " s (limit 60 s)"};
}

Verdict lclt() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto k1 = run("lclt_bernoulli.json");
  const auto k2 = run("lclt_pair.json");
  const auto parity = run("lclt_parity.json");
  const double secs = seconds_since(t0);
  return {k1.passed && k2.passed && parity.passed && secs < 120.0,
          "K=1 max N*err " + fmt("%.4f", metric(k1, "max_center_error_times_rate")) + " (limit 0.05); K=2 rescaled log slope " +
              fmt("%.4f", metric(k2, "rescaled_error_slope")) + " (limit 0.15); reducible K=3 mismatch " +
              fmt("%.3g", metric(parity, "neighbourhood_mismatch")) + " vs gaussian " +
              fmt("%.3g", metric(parity, "center_gaussian")) + "; " + fmt("%.1f", secs) + " s (limit 120 s)"};
}

Verdict kac_chaos() {
  bool ok = true;
  std::string slopes;
  double defect = 0.0;
  for (std::uint64_t seed : {31, 32, 33}) {
    const auto out = run("chaos_sweep.json", seed);
    ok = ok && out.passed;
    slopes += (slopes.empty() ? "" : ", ") + fmt("%.4f", metric(out, "slope"));
    defect = std::max(defect, metric(out, "max_exact_defect"));
  }
  return {ok, "slopes " + slopes + " (range [-1.2, -0.8]), max exchangeability/consistency defect " +
                  fmt("%.3g", defect) + " (tol 1e-12)"};
}

Verdict entropic_fisher() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto e = run("entropic_chaos.json");
  const auto f = run("fisher_chaos.json");
  const double secs = seconds_since(t0);
  return {e.passed && f.passed && secs < 120.0,
          "entropy error at N=400 " + fmt("%.3g", metric(e, "final_error")) + " (tol 0.02), fisher error " +
              fmt("%.3g", metric(f, "final_error")) + " (tol 0.05), both shrinking over N = 50..400, " +
              fmt("%.1f", secs) + " s (limit 120 s)"};
}

Verdict uniform_in_time() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto out = run("simulate_n3.json");
  const double secs = seconds_since(t0);
  std::string sups;
  for (const auto& row : out.metrics.at("per_N"))
    sups += (sups.empty() ? "" : ", ") + std::to_string(row.at("N").get<int>()) + ": " +
            fmt("%.4f", row.at("mean_sup_tv").get<double>());
  return {out.passed && secs < 600.0,
          "mean over replicas of sup_t TV {" + sups + "} (decreasing, <= 0.05 at N=1600), " + fmt("%.1f", secs) +
              " s (limit 600 s)"};
}

Verdict inequality_suites() {
  Rng rng(2024);
  constexpr int kTrials = 1000;
  double shearer = INFINITY, tensor = INFINITY, gq = INFINITY, identities = INFINITY, phia = INFINITY,
         keyphi = INFINITY, sandwich = INFINITY;

  const PermutationTupleSpace S32(3, 2), S23(2, 3);
  for (int rep = 0; rep < kTrials; ++rep) {
    const auto f = random_positive(S32.size(), rng);
    for (const auto& nu : {RecombinationMeasure::uniform_crossover(2), RecombinationMeasure::one_point(2),
                           RecombinationMeasure::single_site(2)})
      shearer = std::min(shearer, shearer_check(S32, f, nu).margin);
    // phi identities: P_A idempotent and mean preserving, phi(empty) = 0,
    // phi(A) = mu[ent_A f] - mu[ent_A P_A f], P_A P_B = P_B P_A for A inside B.
    identities = std::min(identities, -std::abs(phi(S32, f, SubsetMask{})));
    for (std::uint64_t m = 0; m < 4; ++m) {
      const SubsetMask A{m};
      const auto pa = project_PA(S32, f, A);
      const auto papa = project_PA(S32, pa, A);
      for (std::size_t st = 0; st < S32.size(); ++st) identities = std::min(identities, -std::abs(papa[st] - pa[st]));
      identities = std::min(identities, -std::abs(mean(pa) - mean(f)));
      identities = std::min(identities, -std::abs(phi(S32, f, A) - (mean(ent_A(S32, f, A)) - mean(ent_A(S32, pa, A)))));
      for (std::uint64_t mb = 0; mb < 4; ++mb) {
        if ((m & ~mb) != 0) continue;
        const auto ab = project_PA(S32, project_PA(S32, f, SubsetMask{mb}), A);
        const auto ba = project_PA(S32, pa, SubsetMask{mb});
        for (std::size_t st = 0; st < S32.size(); ++st) identities = std::min(identities, -std::abs(ab[st] - ba[st]));
      }
      phia = std::min(phia, phia_gq_check(S32, f, A).margin);
    }
    keyphi = std::min({keyphi, keyphi_check(S32, f, SubsetMask::single(0), SubsetMask::single(1)).margin,
                       keyphi_check(S32, f, SubsetMask{}, SubsetMask::full(2)).margin});
    const auto g = random_positive(S23.size(), rng);
    // Tensorization: sum_i mu[ent_i g] >= ent g, i.e. Shearer with single-site nu.
    tensor = std::min(tensor, shearer_check(S23, g, RecombinationMeasure::single_site(3)).margin);
    keyphi = std::min({keyphi, keyphi_check(S23, g, SubsetMask{0b001}, SubsetMask{0b110}).margin,
                       keyphi_check(S23, g, SubsetMask{0b011}, SubsetMask{0b100}).margin});
    for (int N = 2; N <= 4; ++N) {
      std::size_t size = 1;
      for (int k = 2; k <= N; ++k) size *= static_cast<std::size_t>(k);
      gq = std::min(gq, gq_check(N, random_positive(size, rng)).margin);
    }
    const SpaceShape s({1, 2, 1});
    const Distribution p = oracle::random_distribution(s, rng);
    const Distribution q = oracle::random_distribution(s, rng);
    const double w = wasserstein(p, q), d = tv(p, q);
    sandwich = std::min({sandwich, w - d, s.sites() * d - w});
  }

  const SpaceShape b2 = SpaceShape::binary(2);
  const auto nu = RecombinationMeasure::uniform_crossover(2);
  const Distribution p = Distribution::point(b2, 3);
  const Distribution q(b2, {0.5, 0.0, 0.0, 0.5});
  const double before = tv(p, q);
  const double after = tv(convolve(p, p, nu), convolve(q, q, nu));
  const bool counterexample = before == 0.5 && after == 5.0 / 8;

  const double worst = std::min({shearer, tensor, gq, identities, phia, keyphi});
  std::ostringstream d;
  d << "min margins: shearer " << fmt("%.3g", shearer) << ", tensorization " << fmt("%.3g", tensor) << ", GQ "
    << fmt("%.3g", gq) << ", phi identities " << fmt("%.3g", identities) << ", phiA<=2E_A " << fmt("%.3g", phia)
    << ", keyphi " << fmt("%.3g", keyphi) << " (tol -1e-12, " << kTrials << " trials); W sandwich "
    << fmt("%.3g", sandwich) << "; TV " << format_double(before) << " -> " << format_double(after);
  return {worst >= -1e-12 && sandwich >= -1e-12 && counterexample, d.str()};
}

Verdict determinism() {
  std::size_t compared = 0;
  std::string mismatch;
  for (const auto& [key, bodies] : g_bodies) {
    const auto out = run_experiment(g_configs.at(key));
    for (std::size_t i = 0; i < out.tables.size(); ++i) {
      ++compared;
      if (i >= bodies.size() || out.csv_body(out.tables[i]) != bodies[i]) mismatch += " " + key;
    }
  }
  return {compared > 0 && mismatch.empty(),
          std::to_string(compared) + " CSV bodies from " + std::to_string(g_bodies.size()) + " runs rerun" +
              (mismatch.empty() ? ", all byte-identical" : ", differing:" + mismatch)};
}

}  // namespace

int main() {
  const std::vector<std::pair<int, std::function<Verdict()>>> criteria = {
      {1, closed_form},    {2, solver_triangle}, {3, omega_identity},   {4, tv_decay},
      {5, entropy_decay},  {6, mlsi},            {7, upper_bound},      {8, lclt},
      {9, kac_chaos},      {10, entropic_fisher}, {11, uniform_in_time}, {12, inequality_suites},
      {13, determinism}};
  int failed = 0;
  for (const auto& [id, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("criterion %2d: %s  %s\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
