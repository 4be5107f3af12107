#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qflab/fpn_core.hpp"

namespace qflab {

/// A subset of F_p^n stored as a bitset over canonical indices.
class SubsetBitmask {
 public:
  explicit SubsetBitmask(const Space& space);
  static SubsetBitmask full(const Space& space);
  static SubsetBitmask from_indices(const Space& space, const std::vector<Index>& elements);
  /// Hex string, most significant nibble first; bit i is element i.
  static SubsetBitmask from_hex(const Space& space, const std::string& hex);

  const Space& space() const { return space_; }
  Index universe() const { return space_.size(); }

  bool contains(Index x) const { return (words_[x >> 6] >> (x & 63)) & 1u; }
  void insert(Index x) { words_[x >> 6] |= std::uint64_t{1} << (x & 63); }
  void erase(Index x) { words_[x >> 6] &= ~(std::uint64_t{1} << (x & 63)); }
  void set(Index x, bool value) { value ? insert(x) : erase(x); }

  std::size_t count() const;
  std::vector<Index> elements() const;
  SubsetBitmask complement() const;
  SubsetBitmask translate(Index t) const;
  SubsetBitmask operator|(const SubsetBitmask& other) const;
  SubsetBitmask operator&(const SubsetBitmask& other) const;
  SubsetBitmask operator^(const SubsetBitmask& other) const;
  bool operator==(const SubsetBitmask& other) const;
  std::string to_hex() const;

  const std::vector<std::uint64_t>& words() const { return words_; }

 private:
  void trim();

  Space space_;
  std::vector<std::uint64_t> words_;
};

}  // namespace qflab
