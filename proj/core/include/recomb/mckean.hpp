#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "recomb/distribution.hpp"
#include "recomb/recombination.hpp"
#include "recomb/rng.hpp"

namespace recomb {

/// Rooted binary tree; node 0 is the root. Leaves are the nodes without children.
class McKeanTree {
 public:
  struct Node {
    int left = -1;
    int right = -1;
    int parent = -1;
    int depth = 0;
    bool leaf() const { return left < 0; }
  };

  McKeanTree() : nodes_(1) {}

  /// Replace leaf `node` by an internal node with two fresh leaves.
  void split(int node);

  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t leaf_count() const { return (nodes_.size() + 1) / 2; }
  /// Leaves in left-to-right order.
  std::vector<int> leaves() const;
  std::vector<int> leaf_depths() const;
  /// Canonical nesting string, "." for a leaf and "(LR)" for an internal node.
  std::string shape_string() const;

 private:
  std::vector<Node> nodes_;
};

/// P(k leaves) = e^{-t} (1 - e^{-t})^{k-1}.
std::size_t sample_leaf_count(double t, Rng& rng);
/// k drawn from the geometric law above, then k - 1 splits of uniformly chosen leaves.
McKeanTree sample_tree(double t, Rng& rng);
McKeanTree grow_tree(std::size_t leaves, Rng& rng);

struct MarkedTree {
  McKeanTree tree;
  /// marks[v] for internal v: the left edge carries marks[v], the right edge its complement.
  std::vector<SubsetMask> marks;
  int sites = 0;

  /// V_i for each leaf in left-to-right order: intersection of edge marks on the root path.
  std::vector<SubsetMask> blocks() const;
};

/// Marks drawn i.i.d. from the symmetrized measure (nu(A) + nu(A^c)) / 2.
MarkedTree fragment(const McKeanTree& tree, const RecombinationMeasure& nu, Rng& rng);

/// Exact sampler for p_t: tree, marks, k i.i.d. leaf draws from p0, then site s
/// copied from the leaf whose block contains s.
class TimeMarginalSampler {
 public:
  TimeMarginalSampler(const Distribution& p0, const RecombinationMeasure& nu);
  std::size_t operator()(double t, Rng& rng) const;

 private:
  RecombinationMeasure nu_;
  SpaceShape shape_;
  DiscreteSampler p0_;
};

std::size_t sample_pt(const Distribution& p0, const RecombinationMeasure& nu, double t, Rng& rng);

/// omega = sum_j (r/2)^{d_j} over leaf depths.
double omega_statistic(const McKeanTree& tree, double r);

}  // namespace recomb
