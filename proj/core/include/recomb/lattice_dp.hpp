#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "recomb/induced.hpp"

namespace recomb {

/// Exact table T_m(v) = mu^{(x)m}(S_m = v) on {0..m}^K by iterated convolution.
/// Slices are stored in linear scale on a fixed padded box; only the slices
/// listed in `retain` (plus m = N) are kept.
class LatticeDP {
 public:
  static constexpr int kMaxDim = 4;
  static constexpr std::size_t kMaxSliceEntries = std::size_t{1} << 24;

  LatticeDP(const InducedMeasure& mu, int N, std::vector<int> retain = {});

  int N() const { return N_; }
  int K() const { return K_; }
  bool retained(int m) const { return slices_.count(m) != 0; }

  /// Zero outside {0..m}^K.
  double prob(int m, std::span<const int> v) const;
  double log_prob(int m, std::span<const int> v) const;
  double slice_sum(int m) const;
  /// Calls fn(v, T_m(v)) for every v in {0..m}^K.
  template <class Fn>
  void for_each_point(int m, Fn&& fn) const {
    const auto& s = slice(m);
    std::vector<int> v(static_cast<std::size_t>(K_), 0);
    for (;;) {
      fn(std::span<const int>(v), s[offset(v)]);
      int c = 0;
      while (c < K_ && v[static_cast<std::size_t>(c)] == m) v[static_cast<std::size_t>(c++)] = 0;
      if (c == K_) break;
      ++v[static_cast<std::size_t>(c)];
    }
  }

 private:
  const std::vector<double>& slice(int m) const;
  std::size_t offset(std::span<const int> v) const;

  int N_;
  int K_;
  std::vector<std::size_t> stride_;
  std::map<int, std::vector<double>> slices_;
};

double dp_point_prob(const LatticeDP& dp, std::span<const int> M);

/// exp(-z.z/2) / ((2 pi N)^{K/2} sqrt(det V)), z = N^{-1/2} V^{-1/2} (M - N mean).
double gaussian_approx(const InducedMeasure& mu, int N, std::span<const int> M);
/// Natural log of gaussian_approx.
double log_gaussian_approx(const InducedMeasure& mu, int N, std::span<const int> M);

}  // namespace recomb
