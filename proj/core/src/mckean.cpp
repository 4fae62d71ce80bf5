#include "recomb/mckean.hpp"

#include <cmath>
#include <string>

#include "recomb/error.hpp"

namespace recomb {

namespace {

constexpr std::size_t kMaxLeaves = std::size_t{1} << 26;

}  // namespace

void McKeanTree::split(int node) {
  require(node >= 0 && static_cast<std::size_t>(node) < nodes_.size() && nodes_[static_cast<std::size_t>(node)].leaf(),
          "nonlinear-solver", "split target is not a leaf");
  const int depth = nodes_[static_cast<std::size_t>(node)].depth + 1;
  const int l = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{-1, -1, node, depth});
  nodes_.push_back(Node{-1, -1, node, depth});
  nodes_[static_cast<std::size_t>(node)].left = l;
  nodes_[static_cast<std::size_t>(node)].right = l + 1;
}

std::vector<int> McKeanTree::leaves() const {
  std::vector<int> out;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    const Node& node = nodes_[static_cast<std::size_t>(v)];
    if (node.leaf()) {
      out.push_back(v);
    } else {
      stack.push_back(node.right);
      stack.push_back(node.left);
    }
  }
  return out;
}

std::vector<int> McKeanTree::leaf_depths() const {
  std::vector<int> out;
  for (int v : leaves()) out.push_back(nodes_[static_cast<std::size_t>(v)].depth);
  return out;
}

std::string McKeanTree::shape_string() const {
  std::string s;
  auto rec = [&](auto&& self, int v) -> void {
    const Node& node = nodes_[static_cast<std::size_t>(v)];
    if (node.leaf()) {
      s.push_back('.');
      return;
    }
    s.push_back('(');
    self(self, node.left);
    self(self, node.right);
    s.push_back(')');
  };
  rec(rec, 0);
  return s;
}

std::size_t sample_leaf_count(double t, Rng& rng) {
  require(t >= 0.0 && std::isfinite(t), "nonlinear-solver", "tree time must be finite and non-negative");
  if (t == 0.0) return 1;
  const double log_fail = std::log(-std::expm1(-t));
  const double u = 1.0 - rng.uniform();  // (0, 1]
  const double extra = std::floor(std::log(u) / log_fail);
  if (extra >= static_cast<double>(kMaxLeaves))
    fail(Error::Kind::cap_exceeded, "nonlinear-solver", "sampled tree exceeds 2^26 leaves");
  return 1 + static_cast<std::size_t>(extra);
}

McKeanTree grow_tree(std::size_t leaves, Rng& rng) {
  require(leaves >= 1, "nonlinear-solver", "a tree has at least one leaf");
  McKeanTree tree;
  std::vector<int> open{0};
  open.reserve(leaves);
  for (std::size_t s = 1; s < leaves; ++s) {
    const std::size_t pick = rng.below(open.size());
    const int v = open[pick];
    tree.split(v);
    const auto& node = tree.nodes()[static_cast<std::size_t>(v)];
    open[pick] = node.left;
    open.push_back(node.right);
  }
  return tree;
}

McKeanTree sample_tree(double t, Rng& rng) { return grow_tree(sample_leaf_count(t, rng), rng); }

std::vector<SubsetMask> MarkedTree::blocks() const {
  const auto& nodes = tree.nodes();
  std::vector<SubsetMask> at(nodes.size());
  at[0] = SubsetMask::full(sites);
  // Children are appended after their parent, so index order is a topological order.
  for (std::size_t v = 0; v < nodes.size(); ++v) {
    if (nodes[v].leaf()) continue;
    at[static_cast<std::size_t>(nodes[v].left)] = at[v] & marks[v];
    at[static_cast<std::size_t>(nodes[v].right)] = at[v] & marks[v].complement(sites);
  }
  std::vector<SubsetMask> out;
  for (int leaf : tree.leaves()) out.push_back(at[static_cast<std::size_t>(leaf)]);
  return out;
}

MarkedTree fragment(const McKeanTree& tree, const RecombinationMeasure& nu, Rng& rng) {
  MarkedTree out{tree, std::vector<SubsetMask>(tree.nodes().size()), nu.sites()};
  for (std::size_t v = 0; v < tree.nodes().size(); ++v)
    if (!tree.nodes()[v].leaf()) out.marks[v] = nu.sample_symmetrized(rng);
  return out;
}

TimeMarginalSampler::TimeMarginalSampler(const Distribution& p0, const RecombinationMeasure& nu)
    : nu_(nu), shape_(p0.shape()), p0_(p0.probs()) {
  require(nu.sites() == shape_.sites(), "nonlinear-solver", "measure and distribution disagree on the site count");
}

std::size_t TimeMarginalSampler::operator()(double t, Rng& rng) const {
  const McKeanTree tree = sample_tree(t, rng);
  if (tree.leaf_count() == 1) return p0_(rng);
  const MarkedTree marked = fragment(tree, nu_, rng);
  std::size_t sigma = 0;
  for (const SubsetMask V : marked.blocks()) {
    const std::size_t leaf_sample = p0_(rng);
    for (int s = 0; s < shape_.sites(); ++s)
      if (V.contains(s)) sigma += static_cast<std::size_t>(shape_.letter(leaf_sample, s)) * shape_.stride(s);
  }
  return sigma;
}

std::size_t sample_pt(const Distribution& p0, const RecombinationMeasure& nu, double t, Rng& rng) {
  return TimeMarginalSampler(p0, nu)(t, rng);
}

double omega_statistic(const McKeanTree& tree, double r) {
  require(r >= 0.0 && r <= 1.0, "nonlinear-solver", "r must lie in [0, 1]");
  double w = 0.0;
  for (int d : tree.leaf_depths()) w += std::pow(0.5 * r, d);
  return w;
}

}  // namespace recomb
