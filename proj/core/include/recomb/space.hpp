#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace recomb {

/// A subset of the sites {0, ..., n-1}, stored as a bitmask (bit i = site i).
struct SubsetMask {
  std::uint64_t bits = 0;

  constexpr SubsetMask() = default;
  constexpr explicit SubsetMask(std::uint64_t b) : bits(b) {}

  static constexpr SubsetMask full(int n) {
    return SubsetMask(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
  }
  static constexpr SubsetMask single(int site) { return SubsetMask(std::uint64_t{1} << site); }

  constexpr bool contains(int site) const { return (bits >> site) & 1U; }
  constexpr int size() const { return std::popcount(bits); }
  constexpr bool empty() const { return bits == 0; }
  constexpr SubsetMask complement(int n) const { return SubsetMask(full(n).bits ^ bits); }
  constexpr SubsetMask with(int site) const { return SubsetMask(bits | (std::uint64_t{1} << site)); }
  constexpr SubsetMask without(int site) const { return SubsetMask(bits & ~(std::uint64_t{1} << site)); }
  constexpr bool subset_of(SubsetMask other) const { return (bits & ~other.bits) == 0; }

  friend constexpr SubsetMask operator&(SubsetMask a, SubsetMask b) { return SubsetMask(a.bits & b.bits); }
  friend constexpr SubsetMask operator|(SubsetMask a, SubsetMask b) { return SubsetMask(a.bits | b.bits); }
  friend constexpr bool operator==(SubsetMask a, SubsetMask b) = default;
  friend constexpr auto operator<=>(SubsetMask a, SubsetMask b) = default;
};

/// The product space of n sites with alphabets {0, ..., q_i}.
/// Configurations are mixed-radix integers with site 0 least significant.
class SpaceShape {
 public:
  static constexpr int kMaxSites = 20;
  static constexpr std::size_t kMaxSize = std::size_t{1} << 32;

  SpaceShape() = default;
  explicit SpaceShape(std::vector<int> alphabet_max);
  static SpaceShape binary(int n) { return SpaceShape(std::vector<int>(static_cast<std::size_t>(n), 1)); }

  int sites() const { return static_cast<int>(q_.size()); }
  int max_letter(int site) const { return q_[static_cast<std::size_t>(site)]; }
  int radix(int site) const { return q_[static_cast<std::size_t>(site)] + 1; }
  const std::vector<int>& alphabet_max() const { return q_; }
  std::size_t size() const { return size_; }
  std::size_t stride(int site) const { return stride_[static_cast<std::size_t>(site)]; }
  /// K = sum_i q_i, the dimension of the induced 0/1 lattice.
  int induced_dim() const;

  int letter(std::size_t config, int site) const {
    return static_cast<int>((config / stride_[static_cast<std::size_t>(site)]) %
                            static_cast<std::size_t>(radix(site)));
  }
  std::size_t encode(std::span<const int> letters) const;
  void decode(std::size_t config, std::span<int> letters) const;
  std::vector<int> decode(std::size_t config) const;

  /// The sub-product over the sites of `sites` (kept in increasing order).
  SpaceShape restrict(SubsetMask sites) const;
  /// Index in restrict(sites) of the restriction of `config` to those sites.
  std::size_t project(std::size_t config, SubsetMask sites) const;
  /// Per-configuration projection table for `sites`.
  std::vector<std::uint32_t> projection_table(SubsetMask sites) const;

  /// Letters written site 0 first; letters above 9 use a-z.
  std::string label(std::size_t config) const;

  SubsetMask all_sites() const { return SubsetMask::full(sites()); }

  friend bool operator==(const SpaceShape& a, const SpaceShape& b) { return a.q_ == b.q_; }

 private:
  std::vector<int> q_;
  std::vector<std::size_t> stride_;
  std::size_t size_ = 1;
};

/// Shape of Omega^k: k copies of `one` laid side by side (copy 0 least significant).
SpaceShape power_shape(const SpaceShape& one, int copies);

}  // namespace recomb
