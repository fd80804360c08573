#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace boxer {

using InstanceIndex = std::uint32_t;

enum class SetOp { Union, Intersection, Difference, SymmetricDifference };

/**
 * Membership set over the instance indices 0..universe_size-1.
 *
 * Stored as a dense word bitmap: the universe is known and bounded by the
 * dataset size, so every binary operation is a single pass over
 * universe_size/64 words and cardinality is a popcount.  Bits past
 * universe_size are always zero.
 */
class InstanceSet {
 public:
  InstanceSet() = default;
  explicit InstanceSet(std::size_t universe_size)
      : universe_size_(universe_size), words_((universe_size + 63) / 64, 0) {}

  static InstanceSet empty(std::size_t universe_size) { return InstanceSet(universe_size); }
  static InstanceSet full(std::size_t universe_size);
  /// Throws UniverseMismatch when an index is >= universe_size.
  static InstanceSet from_indices(std::size_t universe_size, std::span<const InstanceIndex> indices);
  static InstanceSet from_indices(std::size_t universe_size, std::initializer_list<InstanceIndex> indices) {
    return from_indices(universe_size, std::span<const InstanceIndex>(indices.begin(), indices.size()));
  }

  std::size_t universe_size() const noexcept { return universe_size_; }
  std::size_t count() const noexcept;
  bool empty() const noexcept { return count() == 0; }

  bool contains(InstanceIndex i) const noexcept {
    return i < universe_size_ && ((words_[i >> 6] >> (i & 63)) & 1u) != 0;
  }
  void insert(InstanceIndex i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void erase(InstanceIndex i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  InstanceSet& operator|=(const InstanceSet& other);
  InstanceSet& operator&=(const InstanceSet& other);
  InstanceSet& operator-=(const InstanceSet& other);
  InstanceSet& operator^=(const InstanceSet& other);

  /// |this ∩ other| without materializing the intersection.
  std::size_t intersection_count(const InstanceSet& other) const;
  bool is_subset_of(const InstanceSet& other) const;

  /// Indices in ascending order.
  std::vector<InstanceIndex> to_vector() const;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        const int bit = std::countr_zero(bits);
        fn(static_cast<InstanceIndex>(w * 64 + static_cast<std::size_t>(bit)));
        bits &= bits - 1;
      }
    }
  }

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  friend bool operator==(const InstanceSet&, const InstanceSet&) = default;

 private:
  void check_universe(const InstanceSet& other) const;

  std::size_t universe_size_ = 0;
  std::vector<std::uint64_t> words_;
};

InstanceSet combine(const InstanceSet& a, const InstanceSet& b, SetOp op);

inline InstanceSet operator|(InstanceSet a, const InstanceSet& b) { return a |= b; }
inline InstanceSet operator&(InstanceSet a, const InstanceSet& b) { return a &= b; }
inline InstanceSet operator-(InstanceSet a, const InstanceSet& b) { return a -= b; }
inline InstanceSet operator^(InstanceSet a, const InstanceSet& b) { return a ^= b; }

}  // namespace boxer
