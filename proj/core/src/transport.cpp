#include "recomb/transport.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "recomb/error.hpp"
#include "recomb/information.hpp"

namespace recomb {

int hamming(const SpaceShape& shape, std::size_t a, std::size_t b) {
  int d = 0;
  for (int s = 0; s < shape.sites(); ++s) d += shape.letter(a, s) != shape.letter(b, s);
  return d;
}

TransportPlan optimal_transport(const Distribution& p, const Distribution& q) {
  require(p.shape() == q.shape(), "analysis", "transport between different shapes");
  constexpr double kEps = 1e-15;
  TransportPlan plan;
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (p[c] > 0.0) plan.sources.push_back(c);
    if (q[c] > 0.0) plan.targets.push_back(c);
  }
  const std::size_t m = plan.sources.size();
  const std::size_t k = plan.targets.size();
  plan.flow.assign(m * k, 0.0);
  std::vector<double> cost(m * k);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < k; ++j) cost[i * k + j] = hamming(p.shape(), plan.sources[i], plan.targets[j]);
  std::vector<double> supply(m), demand(k);
  for (std::size_t i = 0; i < m; ++i) supply[i] = p[plan.sources[i]];
  for (std::size_t j = 0; j < k; ++j) demand[j] = q[plan.targets[j]];

  // Nodes: 0 source, 1..m supplies, m+1..m+k demands, m+k+1 sink.
  const std::size_t V = m + k + 2;
  const std::size_t sink = V - 1;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> potential(V, 0.0), dist(V);
  std::vector<std::size_t> parent(V);
  std::vector<char> done(V);
  double remaining = 0.0;
  for (double s : supply) remaining += s;

  for (std::size_t guard = 0; remaining > 1e-14 && guard < 10 * (m + k) * (m + k) + 8; ++guard) {
    std::fill(dist.begin(), dist.end(), inf);
    std::fill(done.begin(), done.end(), 0);
    dist[0] = 0.0;
    auto relax = [&](std::size_t u, std::size_t v, double c) {
      const double d = dist[u] + c + potential[u] - potential[v];
      if (d < dist[v] - 1e-15) {
        dist[v] = d;
        parent[v] = u;
      }
    };
    for (;;) {
      std::size_t u = V;
      for (std::size_t v = 0; v < V; ++v)
        if (!done[v] && dist[v] < inf && (u == V || dist[v] < dist[u])) u = v;
      if (u == V) break;
      done[u] = 1;
      if (u == 0) {
        for (std::size_t i = 0; i < m; ++i)
          if (supply[i] > kEps) relax(0, 1 + i, 0.0);
      } else if (u <= m) {
        const std::size_t i = u - 1;
        for (std::size_t j = 0; j < k; ++j) relax(u, 1 + m + j, cost[i * k + j]);
      } else if (u < sink) {
        const std::size_t j = u - 1 - m;
        for (std::size_t i = 0; i < m; ++i)
          if (plan.flow[i * k + j] > kEps) relax(u, 1 + i, -cost[i * k + j]);
        if (demand[j] > kEps) relax(u, sink, 0.0);
      }
    }
    if (dist[sink] == inf) break;
    for (std::size_t v = 0; v < V; ++v)
      if (dist[v] < inf) potential[v] += dist[v];

    double amount = inf;
    for (std::size_t v = sink; v != 0; v = parent[v]) {
      const std::size_t u = parent[v];
      if (u == 0) amount = std::min(amount, supply[v - 1]);
      else if (v == sink) amount = std::min(amount, demand[u - 1 - m]);
      else if (u > m) amount = std::min(amount, plan.flow[(v - 1) * k + (u - 1 - m)]);
    }
    for (std::size_t v = sink; v != 0; v = parent[v]) {
      const std::size_t u = parent[v];
      if (u == 0) supply[v - 1] -= amount;
      else if (v == sink) demand[u - 1 - m] -= amount;
      else if (u <= m) plan.flow[(u - 1) * k + (v - 1 - m)] += amount;
      else plan.flow[(v - 1) * k + (u - 1 - m)] -= amount;
    }
    remaining -= amount;
  }
  if (remaining > 1e-12)
    fail(Error::Kind::numerical, "analysis", "transport solver left mass " + std::to_string(remaining) + " unrouted");
  for (std::size_t c = 0; c < m * k; ++c) plan.cost += plan.flow[c] * cost[c];
  return plan;
}

double wasserstein(const Distribution& p, const Distribution& q) {
  const double w = optimal_transport(p, q).cost;
  const double t = tv(p, q);
  if (w < t - 1e-12 || w > p.shape().sites() * t + 1e-12)
    fail(Error::Kind::invariant_violation, "analysis",
         "Wasserstein value " + std::to_string(w) + " outside [tv, n tv] with tv " + std::to_string(t));
  return w;
}

}  // namespace recomb
