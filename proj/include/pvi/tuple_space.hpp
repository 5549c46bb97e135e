#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pvi/errors.hpp"

namespace pvi {

// Mixed-radix index space over fixed-length integer tuples. Component 0 is
// the most significant digit, so enumeration by index is lexicographic.
class TupleSpace {
 public:
  TupleSpace() = default;

  explicit TupleSpace(std::vector<int> radices) : radix_(std::move(radices)) {
    if (radix_.empty()) throw ParameterError("tuple space: no components");
    weight_.assign(radix_.size(), 1);
    count_ = 1;
    for (std::size_t i = radix_.size(); i-- > 0;) {
      if (radix_[i] < 1) throw ParameterError("tuple space: radix must be >= 1");
      weight_[i] = count_;
      const std::uint64_t r = static_cast<std::uint64_t>(radix_[i]);
      if (count_ > UINT64_MAX / r)
        throw ParameterError("tuple space: element count overflows 64 bits");
      count_ *= r;
    }
  }

  std::uint64_t count() const { return count_; }
  std::size_t arity() const { return radix_.size(); }
  int radix(std::size_t component) const { return radix_[component]; }
  std::uint64_t weight(std::size_t component) const { return weight_[component]; }

  void decode(std::uint64_t index, std::span<int> out) const {
    for (std::size_t i = 0; i < radix_.size(); ++i) {
      out[i] = static_cast<int>(index / weight_[i]);
      index %= weight_[i];
    }
  }

  std::uint64_t encode(std::span<const int> tuple) const {
    std::uint64_t index = 0;
    for (std::size_t i = 0; i < radix_.size(); ++i) {
      if (tuple[i] < 0 || tuple[i] >= radix_[i])
        throw IndexingError("tuple component " + std::to_string(i) + " = " +
                            std::to_string(tuple[i]) + " outside [0, " +
                            std::to_string(radix_[i] - 1) + "]");
      index += static_cast<std::uint64_t>(tuple[i]) * weight_[i];
    }
    return index;
  }

  // Materialises the full enumeration; intended for small spaces.
  std::vector<std::vector<int>> enumerate(std::uint64_t limit = 50'000'000) const {
    if (count_ > limit)
      throw CapacityError("tuple space enumeration of " + std::to_string(count_) +
                              " elements exceeds the configured limit",
                          count_);
    std::vector<std::vector<int>> all(count_, std::vector<int>(arity()));
    for (std::uint64_t i = 0; i < count_; ++i) decode(i, all[i]);
    return all;
  }

 private:
  std::vector<int> radix_;
  std::vector<std::uint64_t> weight_;
  std::uint64_t count_ = 0;
};

}  // namespace pvi
