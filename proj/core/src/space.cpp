#include "recomb/space.hpp"

#include <numeric>

#include "recomb/error.hpp"

namespace recomb {

SpaceShape::SpaceShape(std::vector<int> alphabet_max) : q_(std::move(alphabet_max)) {
  require(!q_.empty() && static_cast<int>(q_.size()) <= kMaxSites, "core-model",
          "site count must lie in [1, " + std::to_string(kMaxSites) + "], got " +
              std::to_string(q_.size()));
  stride_.resize(q_.size());
  size_ = 1;
  for (std::size_t i = 0; i < q_.size(); ++i) {
    require(q_[i] >= 1, "core-model", "alphabet size q_i must be >= 1 at site " + std::to_string(i));
    stride_[i] = size_;
    size_ *= static_cast<std::size_t>(q_[i] + 1);
    if (size_ > kMaxSize) fail(Error::Kind::cap_exceeded, "core-model", "configuration space too large");
  }
}

int SpaceShape::induced_dim() const { return std::accumulate(q_.begin(), q_.end(), 0); }

std::size_t SpaceShape::encode(std::span<const int> letters) const {
  require(letters.size() == q_.size(), "core-model", "letter vector length mismatch");
  std::size_t config = 0;
  for (std::size_t i = 0; i < q_.size(); ++i) {
    require(letters[i] >= 0 && letters[i] <= q_[i], "core-model", "letter outside alphabet");
    config += static_cast<std::size_t>(letters[i]) * stride_[i];
  }
  return config;
}

void SpaceShape::decode(std::size_t config, std::span<int> letters) const {
  for (std::size_t i = 0; i < q_.size(); ++i) {
    const auto r = static_cast<std::size_t>(q_[i] + 1);
    letters[i] = static_cast<int>(config % r);
    config /= r;
  }
}

std::vector<int> SpaceShape::decode(std::size_t config) const {
  std::vector<int> letters(q_.size());
  decode(config, letters);
  return letters;
}

SpaceShape SpaceShape::restrict(SubsetMask sites) const {
  std::vector<int> q;
  for (int i = 0; i < this->sites(); ++i)
    if (sites.contains(i)) q.push_back(q_[static_cast<std::size_t>(i)]);
  SpaceShape out;
  out.q_ = std::move(q);
  out.stride_.resize(out.q_.size());
  out.size_ = 1;
  for (std::size_t i = 0; i < out.q_.size(); ++i) {
    out.stride_[i] = out.size_;
    out.size_ *= static_cast<std::size_t>(out.q_[i] + 1);
  }
  return out;
}

std::size_t SpaceShape::project(std::size_t config, SubsetMask sites) const {
  std::size_t out = 0;
  std::size_t out_stride = 1;
  for (std::size_t i = 0; i < q_.size(); ++i) {
    const auto r = static_cast<std::size_t>(q_[i] + 1);
    if (sites.contains(static_cast<int>(i))) {
      out += (config % r) * out_stride;
      out_stride *= r;
    }
    config /= r;
  }
  return out;
}

std::vector<std::uint32_t> SpaceShape::projection_table(SubsetMask sites) const {
  std::vector<std::uint32_t> table(size_);
  // Odometer over letters keeps this O(|Omega|) rather than O(n |Omega|).
  std::vector<int> letters(q_.size(), 0);
  std::vector<std::size_t> sub_stride(q_.size(), 0);
  std::size_t s = 1;
  for (std::size_t i = 0; i < q_.size(); ++i) {
    if (sites.contains(static_cast<int>(i))) {
      sub_stride[i] = s;
      s *= static_cast<std::size_t>(q_[i] + 1);
    }
  }
  std::size_t sub = 0;
  for (std::size_t c = 0; c < size_; ++c) {
    table[c] = static_cast<std::uint32_t>(sub);
    for (std::size_t i = 0; i < q_.size(); ++i) {
      if (letters[i] < q_[i]) {
        ++letters[i];
        sub += sub_stride[i];
        break;
      }
      sub -= sub_stride[i] * static_cast<std::size_t>(letters[i]);
      letters[i] = 0;
    }
  }
  return table;
}

std::string SpaceShape::label(std::size_t config) const {
  std::string s;
  s.reserve(q_.size());
  for (std::size_t i = 0; i < q_.size(); ++i) {
    const int x = letter(config, static_cast<int>(i));
    s.push_back(x < 10 ? static_cast<char>('0' + x) : static_cast<char>('a' + x - 10));
  }
  return s;
}

SpaceShape power_shape(const SpaceShape& one, int copies) {
  require(copies >= 1, "core-model", "power_shape needs at least one copy");
  std::vector<int> q;
  for (int c = 0; c < copies; ++c) q.insert(q.end(), one.alphabet_max().begin(), one.alphabet_max().end());
  return SpaceShape(std::move(q));
}

}  // namespace recomb
