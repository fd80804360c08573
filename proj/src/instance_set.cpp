#include "boxer/instance_set.hpp"

#include <string>

#include "boxer/error.hpp"

namespace boxer {

InstanceSet InstanceSet::full(std::size_t universe_size) {
  InstanceSet set(universe_size);
  for (auto& w : set.words_) w = ~std::uint64_t{0};
  if (const auto tail = universe_size % 64; tail != 0) {
    set.words_.back() = (std::uint64_t{1} << tail) - 1;
  }
  return set;
}

InstanceSet InstanceSet::from_indices(std::size_t universe_size, std::span<const InstanceIndex> indices) {
  InstanceSet set(universe_size);
  for (const auto i : indices) {
    if (i >= universe_size) {
      throw Error(ErrorCode::UniverseMismatch,
                  "instance index " + std::to_string(i) + " outside universe of size " +
                      std::to_string(universe_size));
    }
    set.insert(i);
  }
  return set;
}

std::size_t InstanceSet::count() const noexcept {
  std::size_t total = 0;
  for (const auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

void InstanceSet::check_universe(const InstanceSet& other) const {
  if (universe_size_ != other.universe_size_) {
    throw Error(ErrorCode::UniverseMismatch, "cannot combine sets over universes of size " +
                                                 std::to_string(universe_size_) + " and " +
                                                 std::to_string(other.universe_size_));
  }
}

InstanceSet& InstanceSet::operator|=(const InstanceSet& other) {
  check_universe(other);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] |= other.words_[w];
  return *this;
}

InstanceSet& InstanceSet::operator&=(const InstanceSet& other) {
  check_universe(other);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= other.words_[w];
  return *this;
}

InstanceSet& InstanceSet::operator-=(const InstanceSet& other) {
  check_universe(other);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] &= ~other.words_[w];
  return *this;
}

InstanceSet& InstanceSet::operator^=(const InstanceSet& other) {
  check_universe(other);
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
  return *this;
}

std::size_t InstanceSet::intersection_count(const InstanceSet& other) const {
  check_universe(other);
  std::size_t total = 0;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    total += static_cast<std::size_t>(std::popcount(words_[w] & other.words_[w]));
  }
  return total;
}

bool InstanceSet::is_subset_of(const InstanceSet& other) const {
  check_universe(other);
  for (std::size_t w = 0; w < words_.size(); ++w) {
    if ((words_[w] & ~other.words_[w]) != 0) return false;
  }
  return true;
}

std::vector<InstanceIndex> InstanceSet::to_vector() const {
  std::vector<InstanceIndex> out;
  out.reserve(count());
  for_each([&](InstanceIndex i) { out.push_back(i); });
  return out;
}

InstanceSet combine(const InstanceSet& a, const InstanceSet& b, SetOp op) {
  switch (op) {
    case SetOp::Union: return a | b;
    case SetOp::Intersection: return a & b;
    case SetOp::Difference: return a - b;
    case SetOp::SymmetricDifference: return a ^ b;
  }
  return a;
}

}  // namespace boxer
