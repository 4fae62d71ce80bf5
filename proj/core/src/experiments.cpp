#include "recomb/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "recomb/canonical.hpp"
#include "recomb/chaos.hpp"
#include "recomb/csv.hpp"
#include "recomb/error.hpp"
#include "recomb/fisher.hpp"
#include "recomb/induced.hpp"
#include "recomb/information.hpp"
#include "recomb/lattice_dp.hpp"
#include "recomb/mckean.hpp"
#include "recomb/ode.hpp"
#include "recomb/particles.hpp"
#include "recomb/permutations.hpp"
#include "recomb/serialize.hpp"
#include "recomb/transport.hpp"
#include "recomb/wild.hpp"

namespace recomb {

using json = nlohmann::json;

namespace {

constexpr const char* kModule = "experiments-cli";

[[noreturn]] void config_error(const std::string& msg) { fail(Error::Kind::invalid_argument, kModule, msg); }

template <class T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) config_error(std::string("missing key '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? get<T>(j, key) : fallback;
}

/// Accepts a scalar or a list.
template <class T>
std::vector<T> list_of(const json& j, const char* key) {
  if (!j.contains(key)) config_error(std::string("missing key '") + key + "'");
  if (j.at(key).is_array()) return get<std::vector<T>>(j, key);
  return {get<T>(j, key)};
}

std::string num(double x) { return format_double(x); }
std::string num(std::size_t x) { return std::to_string(x); }
std::string num(int x) { return std::to_string(x); }

/// Runs f(0..count-1) on a small thread pool; results come back in index order.
template <class F>
auto parallel_map(std::size_t count, F f) -> std::vector<decltype(f(std::size_t{0}))> {
  using R = decltype(f(std::size_t{0}));
  std::vector<R> out(count);
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(count, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_lock;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        out[i] = f(i);
      } catch (...) {
        const std::lock_guard<std::mutex> lock(error_lock);
        if (!error) error = std::current_exception();
        next.store(count);
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

/// Stream for (a, b) under the master seed.
Rng stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) { return Rng::stream(seed, (a << 32) ^ b); }

SpaceShape read_shape(const json& cfg) {
  if (cfg.contains("shape")) return shape_from_json(cfg.at("shape"));
  if (cfg.contains("sites")) {
    const int n = get<int>(cfg, "sites");
    if (n < 1 || n > SpaceShape::kMaxSites) config_error("'sites' must lie in [1, 20]");
    return SpaceShape::binary(n);
  }
  config_error("config needs 'shape' or 'sites'");
}

RecombinationMeasure read_measure(const json& cfg, int n) {
  json m = cfg.contains("measure") ? cfg.at("measure") : json{{"kind", "uniform"}};
  if (m.is_string()) m = json{{"kind", m}};
  if (!m.contains("n")) m["n"] = n;
  if (m.at("n").get<int>() != n) config_error("measure site count differs from the shape");
  return measure_from_json(m);
}

/// Dirichlet(1) weights on all subsets, resampled until separating.
RecombinationMeasure random_measure(int n, Rng& rng) {
  for (;;) {
    std::vector<Atom> atoms;
    double total = 0.0;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
      const double w = rng.exponential(1.0);
      atoms.push_back({SubsetMask{m}, w});
      total += w;
    }
    // Renormalize so the weights sum to 1 in floating point.
    double s = 0.0;
    for (auto& a : atoms) s += (a.p /= total);
    atoms.back().p += 1.0 - s;
    auto nu = RecombinationMeasure::custom(n, atoms);
    if (nu.separating()) return nu;
  }
}

Distribution random_distribution(const SpaceShape& shape, Rng& rng) {
  std::vector<double> w(shape.size());
  for (double& x : w) x = rng.exponential(1.0);
  return Distribution::from_weights(shape, std::move(w));
}

/// Binary two-site law with both marginals on the 1/d lattice inside [0.2, 0.8]
/// and a random correlation filling 80% of the admissible range.
Distribution lattice_pair(int d, Rng& rng) {
  const int lo_k = static_cast<int>(std::ceil(0.2 * d - 1e-9));
  const int hi_k = static_cast<int>(std::floor(0.8 * d + 1e-9));
  const std::uint64_t span = static_cast<std::uint64_t>(hi_k - lo_k + 1);
  const double a = (lo_k + static_cast<double>(rng.below(span))) / d;
  const double b = (lo_k + static_cast<double>(rng.below(span))) / d;
  const double lo = std::max(-a * b, -(1 - a) * (1 - b));
  const double hi = std::min(a * (1 - b), (1 - a) * b);
  const double c = 0.8 * (lo + (hi - lo) * rng.uniform());
  const double p11 = a * b + c;
  return Distribution(SpaceShape::binary(2), {1 - a - b + p11, a - p11, b - p11, p11});
}

Distribution read_init(const json& cfg, const SpaceShape& shape, std::uint64_t seed) {
  const json init = cfg.contains("init") ? cfg.at("init") : json{{"family", "random"}};
  const std::string family = get<std::string>(init, "family");
  Rng rng = stream(seed, 0, get_or<std::uint64_t>(init, "index", 0));
  if (family == "explicit") return Distribution(shape, get<std::vector<double>>(init, "probs"));
  if (family == "product") return Distribution::product(shape, get<std::vector<std::vector<double>>>(init, "marginals"));
  if (family == "two-point") {
    std::vector<double> p(shape.size(), 0.0);
    p.front() += 0.5;
    p.back() += 0.5;
    return Distribution(shape, std::move(p));
  }
  if (family == "lem-entprod") {
    if (shape.size() != (std::size_t{1} << shape.sites())) config_error("lem-entprod needs a binary shape");
    const double w = std::ldexp(1.0, -shape.sites());
    std::vector<double> p(shape.size(), 2 * w * (1 - w) / static_cast<double>(shape.size()));
    p.front() += (1 - w) * (1 - w);
    p.back() += w * w;
    return Distribution::from_weights(shape, std::move(p));
  }
  if (family == "random") return random_distribution(shape, rng);
  if (family == "lattice-pair") {
    if (!(shape == SpaceShape::binary(2))) config_error("lattice-pair needs sites = 2");
    return lattice_pair(get_or<int>(init, "denominator", 20), rng);
  }
  config_error("unknown init family '" + family + "'");
}

std::vector<double> read_times(const json& cfg) {
  if (cfg.contains("times")) return list_of<double>(cfg, "times");
  const double t_end = get<double>(cfg, "t_end");
  const double every = get_or<double>(cfg, "record_every", t_end);
  if (!(every > 0.0)) config_error("'record_every' must be positive");
  std::vector<double> out;
  const std::size_t k = static_cast<std::size_t>(std::llround(t_end / every));
  for (std::size_t i = 0; i <= k; ++i) out.push_back(std::min(t_end, every * static_cast<double>(i)));
  return out;
}

std::vector<std::string> labels(const SpaceShape& shape, const std::string& prefix) {
  std::vector<std::string> out;
  for (std::size_t c = 0; c < shape.size(); ++c) out.push_back(prefix + shape.label(c));
  return out;
}

double default_mlsi_bound(const RecombinationMeasure& nu, bool symmetrized) {
  const int n = nu.sites();
  if (nu.kind() == RecombinationMeasure::Kind::uniform) return symmetrized ? 1.0 / (2 * (n + 2)) : 1.0 / (4 * n);
  if (nu.kind() == RecombinationMeasure::Kind::one_point && !symmetrized) return 1.0 / (4 * (n + 1));
  config_error("no default bound for measure '" + nu.kind_name() + "'; set 'bound'");
}

double default_entropy_rate(const RecombinationMeasure& nu) {
  const int n = nu.sites();
  if (nu.kind() == RecombinationMeasure::Kind::uniform) return 1.0 / (2 * (n + 2));
  if (nu.kind() == RecombinationMeasure::Kind::one_point) return 1.0 / (4 * (n + 1));
  config_error("no default entropy rate for measure '" + nu.kind_name() + "'; set 'rate'");
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

struct Run {
  const json& cfg;
  std::uint64_t seed;
  ExperimentOutput& out;
};

// ---------------------------------------------------------------- solvers

void run_solve(Run& r) {
  const SpaceShape shape = read_shape(r.cfg);
  const auto nu = read_measure(r.cfg, shape.sites());
  const Distribution p0 = read_init(r.cfg, shape, r.seed);
  EvolveOptions o;
  o.dt = get_or(r.cfg, "dt", o.dt);
  const double t_end = get<double>(r.cfg, "t_end");
  const double every = get_or(r.cfg, "record_every", o.dt);
  o.record_stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(every / o.dt)));
  const SolveTrace trace = evolve(p0, nu, t_end, o);

  Table t{"trajectory", {"t"}, {}};
  for (auto& l : labels(shape, "p_")) t.header.push_back(l);
  for (const char* c : {"tv_to_pi", "rel_entropy_to_pi", "mass_defect", "max_marginal_drift"}) t.header.push_back(c);
  double max_defect = 0.0, max_drift = 0.0;
  std::vector<double> fx, fy;
  const auto window = get_or<std::vector<double>>(r.cfg, "fit_window", {});
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    const auto& d = trace.diagnostics[k];
    std::vector<std::string> row{num(d.t)};
    for (double x : trace.states[k].probs()) row.push_back(num(x));
    for (double x : {d.tv_to_pi, d.relative_entropy_to_pi, d.mass_defect, d.max_marginal_drift}) row.push_back(num(x));
    t.rows.push_back(std::move(row));
    max_defect = std::max(max_defect, d.mass_defect);
    max_drift = std::max(max_drift, d.max_marginal_drift);
    if (window.size() == 2 && d.t >= window[0] - 1e-12 && d.t <= window[1] + 1e-12 && d.tv_to_pi > 0.0) {
      fx.push_back(d.t);
      fy.push_back(std::log(d.tv_to_pi));
    }
  }
  r.out.metrics["final_tv_to_pi"] = trace.diagnostics.back().tv_to_pi;
  r.out.metrics["final_rel_entropy_to_pi"] = trace.diagnostics.back().relative_entropy_to_pi;
  r.out.metrics["max_mass_defect"] = max_defect;
  r.out.metrics["max_marginal_drift"] = max_drift;
  r.out.passed = max_defect <= o.invariant_tolerance && max_drift <= o.invariant_tolerance;
  if (window.size() == 2) {
    if (fx.size() < 2) config_error("fit window holds fewer than two grid points");
    const double slope = fit_slope(fx, fy);
    r.out.metrics["fit_window"] = window;
    r.out.metrics["tv_log_slope"] = slope;
    if (r.cfg.contains("expected_slope")) {
      const double tol = get_or(r.cfg, "slope_tolerance", 0.02);
      r.out.metrics["slope_tolerance"] = tol;
      r.out.passed = r.out.passed && std::abs(slope - get<double>(r.cfg, "expected_slope")) <= tol;
    }
  }
  r.out.tables.push_back(std::move(t));
}

void run_wild(Run& r) {
  const SpaceShape shape = read_shape(r.cfg);
  const auto nu = read_measure(r.cfg, shape.sites());
  const Distribution p0 = read_init(r.cfg, shape, r.seed);
  const double wild_tol = get_or(r.cfg, "wild_tolerance", 1e-10);
  const double tol = get_or(r.cfg, "tolerance", 1e-8);
  const double dt = get_or(r.cfg, "dt", 0.01);
  Table t{"wild", {"t", "terms", "tail", "tv_wild_vs_rk4"}, {}};
  double worst = 0.0;
  for (double time : read_times(r.cfg)) {
    const WildSum w = wild_sum(p0, nu, time, wild_tol);
    const double d = tv(w.p, evolve_to(p0, nu, time, dt));
    worst = std::max(worst, d);
    t.rows.push_back({num(time), num(w.terms), num(w.tail), num(d)});
  }
  r.out.metrics["max_tv"] = worst;
  r.out.metrics["tolerance"] = tol;
  r.out.passed = worst <= tol;
  r.out.tables.push_back(std::move(t));
}

constexpr std::size_t kChunks = 64;

void run_mckean(Run& r) {
  const SpaceShape shape = read_shape(r.cfg);
  const auto nu = read_measure(r.cfg, shape.sites());
  const Distribution p0 = read_init(r.cfg, shape, r.seed);
  const std::size_t samples = get_or<std::size_t>(r.cfg, "samples", 1000000);
  const double tol = get_or(r.cfg, "tolerance", 0.005);
  const double dt = get_or(r.cfg, "dt", 0.01);
  const TimeMarginalSampler sampler(p0, nu);
  Table t{"histogram", {"t", "samples", "tv_to_rk4"}, {}};
  for (auto& l : labels(shape, "freq_")) t.header.push_back(l);
  const auto times = read_times(r.cfg);
  double worst = 0.0;
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const auto parts = parallel_map(kChunks, [&](std::size_t c) {
      Rng rng = stream(r.seed, ti + 1, c);
      const std::size_t n = samples / kChunks + (c < samples % kChunks ? 1 : 0);
      std::vector<std::uint64_t> h(shape.size(), 0);
      for (std::size_t s = 0; s < n; ++s) ++h[sampler(times[ti], rng)];
      return h;
    });
    std::vector<double> freq(shape.size(), 0.0);
    for (const auto& h : parts)
      for (std::size_t c = 0; c < h.size(); ++c) freq[c] += static_cast<double>(h[c]);
    for (double& x : freq) x /= static_cast<double>(samples);
    const double d = tv(freq, evolve_to(p0, nu, times[ti], dt).probs());
    worst = std::max(worst, d);
    std::vector<std::string> row{num(times[ti]), num(samples), num(d)};
    for (double x : freq) row.push_back(num(x));
    t.rows.push_back(std::move(row));
  }
  r.out.metrics["max_tv"] = worst;
  r.out.metrics["tolerance"] = tol;
  r.out.passed = worst <= tol;
  r.out.tables.push_back(std::move(t));
}

void run_omega(Run& r) {
  const auto rs = list_of<double>(r.cfg, "r");
  const auto times = read_times(r.cfg);
  const std::size_t samples = get_or<std::size_t>(r.cfg, "samples", 1000000);
  const double zmax = get_or(r.cfg, "max_z", 3.0);
  Table t{"omega", {"r", "t", "samples", "mean", "std_error", "expected", "z"}, {}};
  double worst = 0.0;
  std::size_t cell = 0;
  for (double rv : rs)
    for (double time : times) {
      ++cell;
      const auto parts = parallel_map(kChunks, [&](std::size_t c) {
        Rng rng = stream(r.seed, cell, c);
        const std::size_t n = samples / kChunks + (c < samples % kChunks ? 1 : 0);
        std::pair<double, double> acc{0.0, 0.0};
        for (std::size_t s = 0; s < n; ++s) {
          const double w = omega_statistic(sample_tree(time, rng), rv);
          acc.first += w;
          acc.second += w * w;
        }
        return acc;
      });
      double s1 = 0.0, s2 = 0.0;
      for (const auto& [a, b] : parts) {
        s1 += a;
        s2 += b;
      }
      const double n = static_cast<double>(samples);
      const double mean = s1 / n;
      const double se = std::sqrt(std::max(0.0, s2 / n - mean * mean) / (n - 1));
      const double expected = std::exp(-(1 - rv) * time);
      const double z = se > 0.0 ? (mean - expected) / se : (mean == expected ? 0.0 : INFINITY);
      worst = std::max(worst, std::abs(z));
      t.rows.push_back({num(rv), num(time), num(samples), num(mean), num(se), num(expected), num(z)});
    }
  r.out.metrics["max_abs_z"] = worst;
  r.out.metrics["max_z"] = zmax;
  r.out.passed = worst <= zmax;
  r.out.tables.push_back(std::move(t));
}

// ---------------------------------------------------------------- particles

void run_simulate(Run& r) {
  const SpaceShape shape = read_shape(r.cfg);
  const auto nu = read_measure(r.cfg, shape.sites());
  const Distribution p = read_init(r.cfg, shape, r.seed);
  const auto Ns = list_of<int>(r.cfg, "N");
  const std::size_t replicas = get_or<std::size_t>(r.cfg, "replicas", 200);
  const auto times = read_times(r.cfg);
  const double dt = get_or(r.cfg, "dt", 0.01);
  std::vector<Distribution> pt;
  for (double time : times) pt.push_back(evolve_to(p, nu, time, dt));

  Table t{"chaos", {"N", "t", "mean_tv_to_pt", "se_tv_to_pt", "mean_wasserstein_to_pt", "se_wasserstein_to_pt"}, {}};
  std::vector<double> sups;
  json per_n = json::array();
  for (std::size_t ni = 0; ni < Ns.size(); ++ni) {
    const int N = Ns[ni];
    const AdmissibleDensity rho = rho_pi(p.site_marginals(), N);
    const CanonicalSampler sampler(p, rho);
    struct Obs {
      std::vector<double> tv, w;
      std::size_t events = 0;
    };
    const auto obs = parallel_map(replicas, [&](std::size_t k) {
      Rng rng = stream(r.seed, ni + 1, k);
      ParticleState eta = sampler(rng);
      Obs o;
      o.tv.resize(times.size());
      o.w.resize(times.size());
      o.events = simulate_observe(eta, nu, times, rng, [&](std::size_t i, const ParticleState& st) {
        const Distribution lam = empirical(st);
        o.tv[i] = tv(lam, pt[i]);
        o.w[i] = wasserstein(lam, pt[i]);
      });
      return o;
    });
    double sup = 0.0, sup_each = 0.0, events = 0.0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      double a = 0.0, a2 = 0.0, b = 0.0, b2 = 0.0;
      for (const auto& o : obs) {
        a += o.tv[i];
        a2 += o.tv[i] * o.tv[i];
        b += o.w[i];
        b2 += o.w[i] * o.w[i];
      }
      const double n = static_cast<double>(replicas);
      const double ma = a / n, mb = b / n;
      const double sa = replicas > 1 ? std::sqrt(std::max(0.0, a2 / n - ma * ma) / (n - 1)) : 0.0;
      const double sb = replicas > 1 ? std::sqrt(std::max(0.0, b2 / n - mb * mb) / (n - 1)) : 0.0;
      sup = std::max(sup, ma);
      t.rows.push_back({num(N), num(times[i]), num(ma), num(sa), num(mb), num(sb)});
    }
    for (const auto& o : obs) {
      sup_each += *std::max_element(o.tv.begin(), o.tv.end()) / static_cast<double>(replicas);
      events += static_cast<double>(o.events) / static_cast<double>(replicas);
    }
    sups.push_back(sup_each);
    per_n.push_back({{"N", N}, {"sup_mean_tv", sup}, {"mean_sup_tv", sup_each}, {"mean_events", events}});
  }
  r.out.metrics["per_N"] = per_n;
  r.out.metrics["verdict_statistic"] = "mean_sup_tv";
  r.out.passed = strictly_decreasing(sups);
  if (r.cfg.contains("tolerance")) {
    const double tol = get<double>(r.cfg, "tolerance");
    r.out.metrics["tolerance"] = tol;
    r.out.passed = r.out.passed && sups.back() <= tol;
  }
  r.out.tables.push_back(std::move(t));
}

// ---------------------------------------------------------------- decay

void run_entropy_decay(Run& r) {
  const auto sites = list_of<int>(r.cfg, "sites");
  const std::size_t trials = get_or<std::size_t>(r.cfg, "trials", 100);
  const json mcfg = r.cfg.contains("measure") ? r.cfg.at("measure") : json("uniform");
  const double t_end = get<double>(r.cfg, "t_end");
  const double tol = get_or(r.cfg, "tolerance", 1e-9);
  EvolveOptions o;
  o.dt = get_or(r.cfg, "dt", o.dt);
  struct Res {
    int n;
    double h0, margin, worst_t, tvbo_margin;
  };
  const auto res = parallel_map(trials, [&](std::size_t k) {
    const int n = sites[k % sites.size()];
    const SpaceShape shape = SpaceShape::binary(n);
    json c = r.cfg;
    c["measure"] = mcfg;
    const auto nu = read_measure(c, n);
    const double rate = r.cfg.contains("rate") ? get<double>(r.cfg, "rate") : default_entropy_rate(nu);
    Rng rng = stream(r.seed, 1, k);
    const Distribution p0 = random_distribution(shape, rng);
    const auto trace = evolve(p0, nu, t_end, o);
    const double h0 = trace.diagnostics.front().relative_entropy_to_pi;
    Res out{n, h0, INFINITY, 0.0, INFINITY};
    for (const auto& d : trace.diagnostics) {
      const double m = std::exp(-rate * d.t) * h0 - d.relative_entropy_to_pi;
      if (m < out.margin) {
        out.margin = m;
        out.worst_t = d.t;
      }
      const double m2 = 0.5 * n * (n - 1) * h0 * std::exp(-nu.separation_gap() * d.t) - d.relative_entropy_to_pi;
      out.tvbo_margin = std::min(out.tvbo_margin, m2);
    }
    return out;
  });
  Table t{"entropy", {"trial", "n", "h0", "min_margin", "worst_t", "min_margin_gap_bound"}, {}};
  double worst = INFINITY, worst2 = INFINITY;
  for (std::size_t k = 0; k < res.size(); ++k) {
    const auto& x = res[k];
    t.rows.push_back({num(k), num(x.n), num(x.h0), num(x.margin), num(x.worst_t), num(x.tvbo_margin)});
    worst = std::min(worst, x.margin);
    worst2 = std::min(worst2, x.tvbo_margin);
  }
  r.out.metrics["min_margin"] = worst;
  r.out.metrics["min_margin_gap_bound"] = worst2;
  r.out.metrics["tolerance"] = tol;
  r.out.passed = worst >= -tol && worst2 >= -tol;
  r.out.tables.push_back(std::move(t));
}

void run_tv_decay(Run& r) {
  const auto sites = list_of<int>(r.cfg, "sites");
  const auto kinds = list_of<std::string>(r.cfg, "measures");
  const std::size_t trials = get_or<std::size_t>(r.cfg, "trials", 100);
  const double t_end = get<double>(r.cfg, "t_end");
  const double tol = get_or(r.cfg, "tolerance", 1e-9);
  EvolveOptions o;
  o.dt = get_or(r.cfg, "dt", o.dt);
  struct Res {
    int n;
    std::string kind;
    double D, tv0, margin, worst_t;
  };
  const auto res = parallel_map(trials, [&](std::size_t k) {
    const int n = sites[k % sites.size()];
    const std::string kind = kinds[(k / sites.size()) % kinds.size()];
    Rng rng = stream(r.seed, 1, k);
    const RecombinationMeasure nu =
        kind == "random" ? random_measure(n, rng) : read_measure(json{{"measure", json{{"kind", kind}}}}, n);
    if (!nu.separating()) config_error("measure '" + kind + "' is not separating");
    const Distribution p0 = random_distribution(SpaceShape::binary(n), rng);
    const auto trace = evolve(p0, nu, t_end, o);
    const double tv0 = trace.diagnostics.front().tv_to_pi;
    const double D = nu.separation_gap();
    Res out{n, kind, D, tv0, INFINITY, 0.0};
    for (const auto& d : trace.diagnostics) {
      const double m = 0.25 * n * n * (n - 1) * tv0 * std::exp(-D * d.t) - d.tv_to_pi;
      if (m < out.margin) {
        out.margin = m;
        out.worst_t = d.t;
      }
    }
    return out;
  });
  Table t{"bound", {"trial", "n", "measure", "D", "tv0", "min_margin", "worst_t"}, {}};
  double worst = INFINITY;
  for (std::size_t k = 0; k < res.size(); ++k) {
    const auto& x = res[k];
    t.rows.push_back({num(k), num(x.n), x.kind, num(x.D), num(x.tv0), num(x.margin), num(x.worst_t)});
    worst = std::min(worst, x.margin);
  }
  r.out.metrics["min_margin"] = worst;
  r.out.metrics["tolerance"] = tol;
  r.out.passed = worst >= -tol;
  r.out.tables.push_back(std::move(t));

  if (r.cfg.contains("rate_check")) {
    const json& rc = r.cfg.at("rate_check");
    const int n = get_or(rc, "sites", 2);
    const auto window = get_or<std::vector<double>>(rc, "window", {5.0, 15.0});
    if (window.size() != 2 || !(window[0] < window[1])) config_error("rate_check window must be [a, b] with a < b");
    const double expected = get_or(rc, "expected", -0.5);
    const double stol = get_or(rc, "tolerance", 0.02);
    const SpaceShape shape = SpaceShape::binary(n);
    std::vector<double> p(shape.size(), 0.0);
    p.front() = p.back() = 0.5;
    EvolveOptions ro = o;
    ro.record_stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(get_or(rc, "record_every", 0.1) / o.dt)));
    const auto trace = evolve(Distribution(shape, p), RecombinationMeasure::uniform_crossover(n), window[1], ro);
    Table rt{"rate", {"t", "tv_to_pi"}, {}};
    std::vector<double> fx, fy;
    for (const auto& d : trace.diagnostics) {
      rt.rows.push_back({num(d.t), num(d.tv_to_pi)});
      if (d.t >= window[0] - 1e-12 && d.tv_to_pi > 0.0) {
        fx.push_back(d.t);
        fy.push_back(std::log(d.tv_to_pi));
      }
    }
    const double slope = fit_slope(fx, fy);
    r.out.metrics["rate_slope"] = slope;
    r.out.metrics["rate_window"] = window;
    r.out.metrics["rate_expected"] = expected;
    r.out.metrics["rate_tolerance"] = stol;
    r.out.passed = r.out.passed && std::abs(slope - expected) <= stol;
    r.out.tables.push_back(std::move(rt));
  }
}

// ---------------------------------------------------------------- inequalities

void run_mlsi(Run& r) {
  const int N = get<int>(r.cfg, "N");
  const int n = get<int>(r.cfg, "sites");
  const auto nu = read_measure(r.cfg, n);
  MlsiSearchOptions o;
  o.trials = get_or(r.cfg, "trials", o.trials);
  o.symmetrized = get_or(r.cfg, "symmetrized", false);
  o.descent_steps = get_or(r.cfg, "descent_steps", o.descent_steps);
  o.descent_step = get_or(r.cfg, "descent_step", o.descent_step);
  const double bound = r.cfg.contains("bound") ? get<double>(r.cfg, "bound") : default_mlsi_bound(nu, o.symmetrized);
  const PermutationTupleSpace space(N, n);
  Rng rng = stream(r.seed, 1);
  const MlsiSearch s = mlsi_search(space, nu, rng, o);
  Table t{"mlsi",
          {"N", "n", "measure", "symmetrized", "trials", "descent_steps", "min_ratio", "bound", "margin", "worst_trial"},
          {}};
  t.rows.push_back({num(N), num(n), nu.kind_name(), o.symmetrized ? "1" : "0", num(s.trials), num(o.descent_steps),
                    num(s.min_ratio), num(bound), num(s.min_ratio - bound), num(s.worst_trial)});
  r.out.metrics["inequality"] = "mlsi";
  r.out.metrics["trials"] = s.trials;
  r.out.metrics["min_ratio"] = s.min_ratio;
  r.out.metrics["bound"] = bound;
  r.out.metrics["min_margin"] = s.min_ratio - bound;
  r.out.metrics["worst_seed"] = r.seed;
  r.out.metrics["worst_trial"] = s.worst_trial;
  r.out.passed = s.min_ratio >= bound;
  r.out.tables.push_back(std::move(t));
}

void run_upper_bound(Run& r) {
  const auto sites = list_of<int>(r.cfg, "sites");
  const double slack = get_or(r.cfg, "slack", 10.0);
  Table t{"upper", {"n", "rel_entropy", "fisher", "ratio", "ratio_times_n", "limit"}, {}};
  bool ok = true;
  double peak = 0.0;
  for (int n : sites) {
    const SpaceShape shape = SpaceShape::binary(n);
    json c = r.cfg;
    c["init"] = json{{"family", "lem-entprod"}};
    const Distribution p = read_init(c, shape, r.seed);
    const auto nu = read_measure(r.cfg, n);
    const double H = rel_entropy(p, p.product_of_marginals());
    const double D = fisher_nonlinear(p, nu);
    const double ratio = std::abs(D) / H;
    const double limit = 4.0 + slack / n;
    // Both sides: below 4 + c/n, and within c/n of the limit 4.
    ok = ok && ratio * n <= limit && std::abs(ratio * n - 4.0) <= slack / n;
    peak = std::max(peak, ratio * n);
    t.rows.push_back({num(n), num(H), num(D), num(ratio), num(ratio * n), num(limit)});
  }
  r.out.metrics["max_ratio_times_n"] = peak;
  r.out.metrics["slack"] = slack;
  r.out.passed = ok;
  r.out.tables.push_back(std::move(t));
}

// ---------------------------------------------------------------- lclt

InducedMeasure read_lattice(const json& cfg, std::uint64_t seed) {
  if (cfg.contains("lattice")) {
    const json& l = cfg.at("lattice");
    const int K = get<int>(l, "K");
    std::vector<LatticeAtom> atoms;
    for (const auto& a : l.at("atoms")) atoms.push_back({get<std::vector<std::uint8_t>>(a, "xi"), get<double>(a, "p")});
    return make_lattice_measure(K, std::move(atoms));
  }
  const SpaceShape shape = read_shape(cfg);
  return induce(read_init(cfg, shape, seed));
}

void run_lclt(Run& r) {
  const InducedMeasure mu = read_lattice(r.cfg, r.seed);
  const auto Ns = list_of<int>(r.cfg, "N");
  const json check = r.cfg.contains("check") ? r.cfg.at("check") : json{{"kind", "rescaled_slope"}};
  const std::string kind = get<std::string>(check, "kind");
  const int K = mu.K;
  const double rate = (K + 1) / 2.0;
  const bool scan = get_or(r.cfg, "max_over_M", K <= 2);
  Table t{"lclt", {"N", "center", "dp", "gaussian", "error", "error_times_rate", "max_error", "max_error_times_rate"}, {}};
  std::vector<double> lx, ly, center_scaled;
  double mismatch = 0.0, center_g = 0.0;
  for (int N : Ns) {
    const LatticeDP dp(mu, N);
    std::vector<int> M(static_cast<std::size_t>(K));
    std::string label;
    for (int c = 0; c < K; ++c) {
      M[static_cast<std::size_t>(c)] = static_cast<int>(std::llround(N * mu.mean[static_cast<std::size_t>(c)]));
      label += (c ? " " : "") + std::to_string(M[static_cast<std::size_t>(c)]);
    }
    const double pd = dp_point_prob(dp, M);
    const double g = gaussian_approx(mu, N, M);
    const double err = std::abs(pd - g);
    const double scale = std::pow(static_cast<double>(N), rate);
    double worst = NAN;
    if (scan) {
      worst = 0.0;
      dp.for_each_point(N, [&](std::span<const int> v, double w) {
        worst = std::max(worst, std::abs(w - gaussian_approx(mu, N, v)));
      });
      if (worst > 0.0) {
        lx.push_back(std::log(N));
        ly.push_back(std::log(worst * scale));
      }
    }
    // Largest deviation over the 3^K neighbourhood of the centre.
    mismatch = 0.0;
    center_g = g;
    std::vector<int> off(static_cast<std::size_t>(K), -1), v(static_cast<std::size_t>(K));
    for (;;) {
      for (int c = 0; c < K; ++c) v[static_cast<std::size_t>(c)] = M[static_cast<std::size_t>(c)] + off[static_cast<std::size_t>(c)];
      mismatch = std::max(mismatch, std::abs(dp_point_prob(dp, v) - gaussian_approx(mu, N, v)));
      int c = 0;
      while (c < K && off[static_cast<std::size_t>(c)] == 1) off[static_cast<std::size_t>(c++)] = -1;
      if (c == K) break;
      ++off[static_cast<std::size_t>(c)];
    }
    center_scaled.push_back(err * scale);
    t.rows.push_back({num(N), label, num(pd), num(g), num(err), num(err * scale), num(worst), num(worst * scale)});
  }
  r.out.metrics["K"] = K;
  r.out.metrics["irreducible"] = mu.irreducible;
  r.out.metrics["check"] = check;
  if (kind == "center_bound") {
    const double bound = get<double>(check, "bound");
    const double peak = *std::max_element(center_scaled.begin(), center_scaled.end());
    r.out.metrics["max_center_error_times_rate"] = peak;
    r.out.passed = peak <= bound;
  } else if (kind == "rescaled_slope") {
    if (lx.size() < 2) config_error("rescaled_slope needs max_over_M and at least two N values");
    const double slope = fit_slope(lx, ly);
    const double max_slope = get_or(check, "max_slope", 0.15);
    r.out.metrics["rescaled_error_slope"] = slope;
    r.out.passed = slope <= max_slope;
  } else if (kind == "mismatch") {
    const double factor = get_or(check, "factor", 0.5);
    r.out.metrics["neighbourhood_mismatch"] = mismatch;
    r.out.metrics["center_gaussian"] = center_g;
    r.out.passed = mismatch >= factor * center_g;
  } else {
    config_error("unknown lclt check '" + kind + "'");
  }
  r.out.tables.push_back(std::move(t));
}

void run_chaos_sweep(Run& r) {
  const SpaceShape shape = read_shape(r.cfg);
  const Distribution p = read_init(r.cfg, shape, r.seed);
  if (!is_irreducible(p)) config_error("chaos-sweep needs an irreducible p");
  const auto Ns = list_of<int>(r.cfg, "N");
  const int k = get_or(r.cfg, "k", 1);
  const auto range = get_or<std::vector<double>>(r.cfg, "slope_range", {-1.2, -0.8});
  const double exact_tol = get_or(r.cfg, "exact_tolerance", 1e-12);
  const bool pairs = get_or(r.cfg, "check_pairs", true);
  const Distribution pk = [&] {
    Distribution out = p;
    for (int a = 1; a < k; ++a) {
      const SpaceShape big = power_shape(shape, a + 1);
      std::vector<double> w(big.size());
      for (std::size_t c = 0; c < big.size(); ++c) w[c] = out[c % out.size()] * p[c / out.size()];
      out = Distribution(big, std::move(w));
    }
    return out;
  }();
  Table t{"chaos", {"N", "nrho_deviation", "tv", "tv_times_N", "exchangeability_defect", "consistency_defect"}, {}};
  std::vector<double> lx, ly;
  double worst_defect = 0.0;
  for (int N : Ns) {
    const AdmissibleDensity rho = rho_pi(p.site_marginals(), N);
    const Distribution Pk = exact_k_marginal(p, rho, k);
    const double d = tv(Pk, pk);
    double exch = 0.0, cons = 0.0;
    if (pairs && N >= 2) {
      const Distribution P1 = k == 1 ? Pk : exact_k_marginal(p, rho, 1);
      const Distribution P2 = exact_k_marginal(p, rho, 2);
      const std::size_t m = shape.size();
      for (std::size_t a = 0; a < m; ++a) {
        double row = 0.0;
        for (std::size_t b = 0; b < m; ++b) {
          exch = std::max(exch, std::abs(P2[a + m * b] - P2[b + m * a]));
          row += P2[a + m * b];
        }
        cons = std::max(cons, std::abs(row - P1[a]));
      }
    }
    worst_defect = std::max({worst_defect, exch, cons});
    lx.push_back(std::log(N));
    ly.push_back(std::log(d));
    t.rows.push_back({num(N), num(rho.scaled_deviation(p.site_marginals())), num(d), num(d * N), num(exch), num(cons)});
  }
  const double slope = fit_slope(lx, ly);
  r.out.metrics["k"] = k;
  r.out.metrics["slope"] = slope;
  r.out.metrics["slope_range"] = range;
  r.out.metrics["fit_window"] = {Ns.front(), Ns.back()};
  r.out.metrics["max_exact_defect"] = worst_defect;
  r.out.metrics["p"] = p.probs();
  r.out.passed = slope >= range.at(0) && slope <= range.at(1) && worst_defect <= exact_tol;
  r.out.tables.push_back(std::move(t));
}

void run_entropic(Run& r) {
  const SpaceShape shape = read_shape(r.cfg);
  const Distribution p = read_init(r.cfg, shape, r.seed);
  const auto Ns = list_of<int>(r.cfg, "N");
  const double tol = get_or(r.cfg, "tolerance", 0.02);
  const double H = rel_entropy(p, p.product_of_marginals());
  Table t{"entropic", {"N", "per_particle", "rel_entropy", "error", "log_p_sector_per_N", "log_pi_sector_per_N"}, {}};
  std::vector<double> errs;
  for (int N : Ns) {
    const auto e = entropic_chaos_terms(p, rho_pi(p.site_marginals(), N));
    errs.push_back(std::abs(e.per_particle - H));
    t.rows.push_back({num(N), num(e.per_particle), num(H), num(errs.back()), num(e.log_p_sector / N),
                      num(e.log_pi_sector / N)});
  }
  r.out.metrics["rel_entropy"] = H;
  r.out.metrics["final_error"] = errs.back();
  r.out.metrics["monotone"] = strictly_decreasing(errs);
  r.out.metrics["tolerance"] = tol;
  r.out.passed = strictly_decreasing(errs) && errs.back() <= tol;
  r.out.tables.push_back(std::move(t));
}

void run_fisher(Run& r) {
  const SpaceShape shape = read_shape(r.cfg);
  const auto nu = read_measure(r.cfg, shape.sites());
  const Distribution p = read_init(r.cfg, shape, r.seed);
  const auto Ns = list_of<int>(r.cfg, "N");
  const double tol = get_or(r.cfg, "tolerance", 0.05);
  const double D = fisher_nonlinear(p, nu);
  Table t{"fisher", {"N", "fisher_per_particle", "fisher_nonlinear", "error"}, {}};
  std::vector<double> errs;
  for (int N : Ns) {
    const double d = fisher_particle(p, rho_pi(p.site_marginals(), N), nu);
    errs.push_back(std::abs(d - D));
    t.rows.push_back({num(N), num(d), num(D), num(errs.back())});
  }
  r.out.metrics["fisher_nonlinear"] = D;
  r.out.metrics["final_error"] = errs.back();
  r.out.metrics["monotone"] = strictly_decreasing(errs);
  r.out.metrics["tolerance"] = tol;
  r.out.passed = strictly_decreasing(errs) && errs.back() <= tol;
  r.out.tables.push_back(std::move(t));
}

using Runner = void (*)(Run&);

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> table = {
      {"solve", run_solve},
      {"wild", run_wild},
      {"mckean-sample", run_mckean},
      {"simulate", run_simulate},
      {"chaos-sweep", run_chaos_sweep},
      {"entropy-decay", run_entropy_decay},
      {"tv-decay", run_tv_decay},
      {"mlsi-certify", run_mlsi},
      {"upper-bound", run_upper_bound},
      {"lclt-sweep", run_lclt},
      {"entropic-chaos", run_entropic},
      {"fisher-chaos", run_fisher},
      {"omega-identity", run_omega},
  };
  return table;
}

}  // namespace

const std::vector<ExperimentInfo>& experiment_catalog() {
  static const std::vector<ExperimentInfo> catalog = {
      {"solve", "RK4 trajectory with invariants; optional log-TV slope fit",
       {"shape|sites", "measure", "init", "t_end", "dt", "record_every", "fit_window", "expected_slope",
        "slope_tolerance"}},
      {"wild", "Truncated Wild sum against RK4 in TV", {"shape|sites", "measure", "init", "times", "wild_tolerance",
                                                         "tolerance", "dt"}},
      {"mckean-sample", "McKean-tree samples of p_t against RK4 in TV",
       {"shape|sites", "measure", "init", "times", "samples", "tolerance", "dt"}},
      {"simulate", "Particle system from the canonical tensor product, empirical law against p_t",
       {"shape|sites", "measure", "init", "N", "replicas", "times|t_end+record_every", "tolerance", "dt"}},
      {"chaos-sweep", "Exact k-marginal of the canonical tensor product against p^k over N",
       {"shape|sites", "init", "N", "k", "slope_range", "exact_tolerance", "check_pairs"}},
      {"entropy-decay", "Relative entropy decay bound over random initial laws",
       {"sites", "measure", "trials", "t_end", "dt", "rate", "tolerance"}},
      {"tv-decay", "Total variation decay bound over random laws and measures; optional rate fit",
       {"sites", "measures", "trials", "t_end", "dt", "tolerance", "rate_check"}},
      {"mlsi-certify", "Entropy production ratio search on S_N^n",
       {"N", "sites", "measure", "trials", "symmetrized", "descent_steps", "descent_step", "bound"}},
      {"upper-bound", "Entropy production ratio times n for the w = 2^-n family", {"sites", "measure", "slack"}},
      {"lclt-sweep", "Lattice point probabilities against the Gaussian approximation",
       {"lattice|shape+init", "N", "check", "max_over_M"}},
      {"entropic-chaos", "Per-particle relative entropy of canonical tensor products",
       {"shape|sites", "init", "N", "tolerance"}},
      {"fisher-chaos", "Per-particle entropy production of canonical tensor products",
       {"shape|sites", "measure", "init", "N", "tolerance"}},
      {"omega-identity", "Mean of the tree weight omega against exp(-(1-r)t)", {"r", "times", "samples", "max_z"}},
  };
  return catalog;
}

std::string config_hash(const json& config) {
  const std::string text = config.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, kModule, "slope fit needs at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  require(sxx > 0.0, kModule, "slope fit needs distinct abscissae");
  return sxy / sxx;
}

ExperimentOutput run_experiment(const json& config, std::optional<std::uint64_t> seed_override) {
  if (!config.is_object()) config_error("config must be a JSON object");
  json cfg = config;
  if (seed_override) cfg["seed"] = *seed_override;
  const std::string name = get<std::string>(cfg, "experiment");
  const auto it = runners().find(name);
  if (it == runners().end()) config_error("unknown experiment '" + name + "'");
  ExperimentOutput out;
  out.experiment = name;
  out.seed = get<std::uint64_t>(cfg, "seed");
  out.config_hash = config_hash(cfg);
  Run run{cfg, out.seed, out};
  it->second(run);
  return out;
}

json ExperimentOutput::summary() const {
  return json{{"experiment", experiment},
              {"config_hash", config_hash},
              {"seed", seed},
              {"verdict", passed ? "pass" : "fail"},
              {"metrics", metrics}};
}

std::string ExperimentOutput::csv_body(const Table& table) const {
  std::ostringstream s;
  CsvWriter w(s);
  w.header(table.header);
  for (const auto& row : table.rows) w.row(row);
  return s.str();
}

std::string ExperimentOutput::csv(const Table& table) const {
  std::ostringstream s;
  CsvWriter w(s);
  w.comment("experiment=" + experiment + " table=" + table.name + " config_hash=" + config_hash +
            " seed=" + std::to_string(seed));
  return s.str() + csv_body(table);
}

std::vector<std::filesystem::path> write_outputs(const ExperimentOutput& out, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    if (!f) fail(Error::Kind::invalid_argument, kModule, "cannot write " + path.string());
    written.push_back(path);
  };
  for (std::size_t i = 0; i < out.tables.size(); ++i) {
    const std::string stem = i == 0 ? out.experiment : out.experiment + "_" + out.tables[i].name;
    put(dir / (stem + ".csv"), out.csv(out.tables[i]));
  }
  put(dir / (out.experiment + ".json"), out.summary().dump(2) + "\n");
  return written;
}

int exit_code(const ExperimentOutput& out) { return out.passed ? 0 : 1; }

int error_exit_code(const Error& error) {
  return error.kind() == Error::Kind::invalid_argument || error.kind() == Error::Kind::cap_exceeded ? 2 : 1;
}

}  // namespace recomb
