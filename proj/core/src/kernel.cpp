#include "recomb/kernel.hpp"

#include <algorithm>
#include <numeric>

#include "recomb/error.hpp"

namespace recomb {

namespace {

constexpr std::size_t kTableCacheEntries = std::size_t{1} << 22;

void marginal_into(std::span<const double> f, const std::vector<std::uint32_t>& table, std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t c = 0; c < f.size(); ++c) out[table[c]] += f[c];
}

std::size_t sub_size(const SpaceShape& shape, SubsetMask A) {
  std::size_t s = 1;
  for (int i = 0; i < shape.sites(); ++i)
    if (A.contains(i)) s *= static_cast<std::size_t>(shape.radix(i));
  return s;
}

}  // namespace

CollisionOperator::CollisionOperator(SpaceShape shape, const RecombinationMeasure& nu)
    : shape_(std::move(shape)), atoms_(nu.atoms()) {
  require(nu.sites() == shape_.sites(), "core-model", "measure and shape disagree on the site count");
  cached_ = atoms_.size() * shape_.size() * 2 <= kTableCacheEntries;
  if (cached_) {
    tables_.reserve(2 * atoms_.size());
    for (const Atom& a : atoms_) {
      tables_.push_back(shape_.projection_table(a.mask));
      tables_.push_back(shape_.projection_table(a.mask.complement(shape_.sites())));
    }
  }
}

Signed CollisionOperator::convolve(std::span<const double> f, std::span<const double> g) const {
  require(f.size() == shape_.size() && g.size() == shape_.size(), "core-model", "array length mismatch");
  Signed out(shape_.size(), 0.0);
  std::vector<double> fa, fc, ga, gc;
  for_each_atom([&](const Atom& atom, const std::vector<std::uint32_t>& ta, const std::vector<std::uint32_t>& tc) {
    fa.resize(sub_size(shape_, atom.mask));
    ga.resize(fa.size());
    fc.resize(shape_.size() / fa.size());
    gc.resize(fc.size());
    marginal_into(f, ta, fa);
    marginal_into(g, ta, ga);
    marginal_into(f, tc, fc);
    marginal_into(g, tc, gc);
    const double w = 0.5 * atom.p;
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += w * (fa[ta[c]] * gc[tc[c]] + ga[ta[c]] * fc[tc[c]]);
  });
  return out;
}

void CollisionOperator::kernel_into(std::span<const double> f, std::span<double> out) const {
  require(f.size() == shape_.size() && out.size() == shape_.size(), "core-model", "array length mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  std::vector<double> fa, fc;
  for_each_atom([&](const Atom& atom, const std::vector<std::uint32_t>& ta, const std::vector<std::uint32_t>& tc) {
    fa.resize(sub_size(shape_, atom.mask));
    fc.resize(shape_.size() / fa.size());
    marginal_into(f, ta, fa);
    marginal_into(f, tc, fc);
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += atom.p * fa[ta[c]] * fc[tc[c]];
  });
}

Signed CollisionOperator::kernel(std::span<const double> f) const {
  Signed out(shape_.size());
  kernel_into(f, out);
  return out;
}

Distribution collision_kernel(const Distribution& p, const RecombinationMeasure& nu) {
  CollisionOperator op(p.shape(), nu);
  Signed q = op.kernel(p.probs());
  const double s = total_mass(q);
  for (double& x : q) x /= s;
  return Distribution(p.shape(), std::move(q));
}

Distribution convolve(const Distribution& p, const Distribution& q, const RecombinationMeasure& nu) {
  require(p.shape() == q.shape(), "core-model", "convolution of distributions on different shapes");
  CollisionOperator op(p.shape(), nu);
  Signed r = op.convolve(p.probs(), q.probs());
  const double s = total_mass(r);
  for (double& x : r) x /= s;
  return Distribution(p.shape(), std::move(r));
}

}  // namespace recomb
