#include "recomb/ode.hpp"

#include <cmath>
#include <string>

#include "recomb/error.hpp"
#include "recomb/information.hpp"

namespace recomb {

namespace {

std::size_t step_count(double t_end, double dt) {
  require(dt > 0.0 && dt <= EvolveOptions::kMaxStep, "nonlinear-solver",
          "step size must lie in (0, 0.05], got " + std::to_string(dt));
  require(t_end >= 0.0 && std::isfinite(t_end), "nonlinear-solver", "end time must be finite and non-negative");
  return static_cast<std::size_t>(std::ceil(t_end / dt - 1e-12));
}

void axpy(std::span<double> out, std::span<const double> x, double a, std::span<const double> y) {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] + a * y[i];
}

class Rk4 {
 public:
  explicit Rk4(const CollisionOperator& op) : op_(op), n_(op.shape().size()) {
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &tmp_}) v->resize(n_);
  }

  // Q(p) - |p| p agrees with Q(p) - p on the simplex. Scaling the loss term by
  // the mass makes |p| a neutral direction, so roundoff in the mass does not
  // grow like e^t.
  void field(std::span<const double> p, std::span<double> out) const {
    op_.kernel_into(p, out);
    const double m = total_mass(p);
    for (std::size_t i = 0; i < n_; ++i) out[i] -= m * p[i];
  }

  void step(std::vector<double>& p, double h) {
    field(p, k1_);
    axpy(tmp_, p, 0.5 * h, k1_);
    field(tmp_, k2_);
    axpy(tmp_, p, 0.5 * h, k2_);
    field(tmp_, k3_);
    axpy(tmp_, p, h, k3_);
    field(tmp_, k4_);
    for (std::size_t i = 0; i < n_; ++i) p[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  }

 private:
  const CollisionOperator& op_;
  std::size_t n_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace

SolveTrace evolve(const Distribution& p0, const RecombinationMeasure& nu, double t_end, EvolveOptions options) {
  const std::size_t steps = step_count(t_end, options.dt);
  require(options.record_stride >= 1, "nonlinear-solver", "record stride must be positive");
  const CollisionOperator op(p0.shape(), nu);
  const Distribution pi = p0.product_of_marginals();
  Rk4 rk(op);
  const double h = steps == 0 ? 0.0 : t_end / static_cast<double>(steps);

  SolveTrace trace;
  std::vector<double> p = p0.probs();
  auto record = [&](std::size_t step) {
    const double t = step == steps ? t_end : h * static_cast<double>(step);
    StepDiagnostics d;
    d.t = t;
    d.mass_defect = std::abs(total_mass(p) - 1.0);
    d.max_marginal_drift = max_marginal_drift(p0.shape(), p, p0.probs());
    if (d.mass_defect > options.invariant_tolerance || d.max_marginal_drift > options.invariant_tolerance)
      fail(Error::Kind::invariant_violation, "nonlinear-solver",
           "invariant breach at t=" + std::to_string(t) + ": mass defect " + std::to_string(d.mass_defect) +
               ", marginal drift " + std::to_string(d.max_marginal_drift));
    Distribution state(p0.shape(), p);
    d.tv_to_pi = tv(state, pi);
    d.relative_entropy_to_pi = rel_entropy(state, pi);
    trace.times.push_back(t);
    trace.states.push_back(std::move(state));
    trace.diagnostics.push_back(d);
  };

  record(0);
  for (std::size_t s = 1; s <= steps; ++s) {
    rk.step(p, h);
    if (s % options.record_stride == 0 || s == steps) record(s);
  }
  return trace;
}

Distribution evolve_to(const Distribution& p0, const RecombinationMeasure& nu, double t_end, double dt) {
  EvolveOptions options;
  options.dt = dt;
  options.record_stride = static_cast<std::size_t>(-1);
  SolveTrace trace = evolve(p0, nu, t_end, options);
  return trace.states.back();
}

Signed qhat(const CollisionOperator& op, std::span<const double> f, std::span<const double> g) {
  Signed out = op.convolve(f, g);
  const double mf = total_mass(f);
  const double mg = total_mass(g);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= 0.5 * (mf * g[i] + mg * f[i]);
  return out;
}

Signed qhat(const SpaceShape& shape, std::span<const double> f, std::span<const double> g,
            const RecombinationMeasure& nu) {
  return qhat(CollisionOperator(shape, nu), f, g);
}

Signed linearized_evolve(const Distribution& q0, std::span<const double> h0, const RecombinationMeasure& nu, double t,
                         double dt) {
  require(h0.size() == q0.size(), "nonlinear-solver", "perturbation length mismatch");
  const std::size_t steps = step_count(t, dt);
  const CollisionOperator op(q0.shape(), nu);
  const double h = steps == 0 ? 0.0 : t / static_cast<double>(steps);
  const std::size_t n = q0.size();

  auto field = [&](std::span<const double> q, std::span<const double> x, std::vector<double>& dq,
                   std::vector<double>& dx) {
    dq = op.kernel(q);
    const double m = total_mass(q);
    for (std::size_t i = 0; i < n; ++i) dq[i] -= m * q[i];
    dx = qhat(op, q, x);
    for (double& v : dx) v *= 2.0;
  };

  std::vector<double> q = q0.probs();
  std::vector<double> x(h0.begin(), h0.end());
  std::vector<double> kq[4], kx[4], tq(n), tx(n);
  for (std::size_t s = 0; s < steps; ++s) {
    field(q, x, kq[0], kx[0]);
    axpy(tq, q, 0.5 * h, kq[0]);
    axpy(tx, x, 0.5 * h, kx[0]);
    field(tq, tx, kq[1], kx[1]);
    axpy(tq, q, 0.5 * h, kq[1]);
    axpy(tx, x, 0.5 * h, kx[1]);
    field(tq, tx, kq[2], kx[2]);
    axpy(tq, q, h, kq[2]);
    axpy(tx, x, h, kx[2]);
    field(tq, tx, kq[3], kx[3]);
    for (std::size_t i = 0; i < n; ++i) {
      q[i] += h / 6.0 * (kq[0][i] + 2.0 * kq[1][i] + 2.0 * kq[2][i] + kq[3][i]);
      x[i] += h / 6.0 * (kx[0][i] + 2.0 * kx[1][i] + 2.0 * kx[2][i] + kx[3][i]);
    }
  }
  return x;
}

}  // namespace recomb
