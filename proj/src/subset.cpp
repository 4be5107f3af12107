#include "qflab/subset.hpp"

#include <bit>

namespace qflab {

SubsetBitmask::SubsetBitmask(const Space& space)
    : space_(space), words_((static_cast<std::size_t>(space.size()) + 63) / 64, 0) {}

SubsetBitmask SubsetBitmask::full(const Space& space) {
  SubsetBitmask s(space);
  for (auto& w : s.words_) w = ~std::uint64_t{0};
  s.trim();
  return s;
}

SubsetBitmask SubsetBitmask::from_indices(const Space& space, const std::vector<Index>& elements) {
  SubsetBitmask s(space);
  for (Index x : elements) {
    if (x >= space.size()) throw Error(ErrorKind::InvalidArgument, "element index out of range");
    s.insert(x);
  }
  return s;
}

SubsetBitmask SubsetBitmask::from_hex(const Space& space, const std::string& hex) {
  SubsetBitmask s(space);
  Index bit = 0;
  for (auto it = hex.rbegin(); it != hex.rend(); ++it) {
    const char c = *it;
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    else throw Error(ErrorKind::ConfigError, "invalid hex digit in bitmask");
    for (int k = 0; k < 4; ++k, ++bit) {
      if ((v >> k) & 1) {
        if (bit >= space.size()) throw Error(ErrorKind::ConfigError, "bitmask longer than the group");
        s.insert(bit);
      }
    }
  }
  return s;
}

void SubsetBitmask::trim() {
  const std::size_t extra = words_.size() * 64 - space_.size();
  if (extra > 0 && !words_.empty()) words_.back() &= (~std::uint64_t{0}) >> extra;
}

std::size_t SubsetBitmask::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::vector<Index> SubsetBitmask::elements() const {
  std::vector<Index> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits) {
      const int b = std::countr_zero(bits);
      out.push_back(static_cast<Index>(w * 64 + b));
      bits &= bits - 1;
    }
  }
  return out;
}

SubsetBitmask SubsetBitmask::complement() const {
  SubsetBitmask s = *this;
  for (auto& w : s.words_) w = ~w;
  s.trim();
  return s;
}

SubsetBitmask SubsetBitmask::translate(Index t) const {
  SubsetBitmask s(space_);
  for (Index x : elements()) s.insert(space_.add(x, t));
  return s;
}

SubsetBitmask SubsetBitmask::operator|(const SubsetBitmask& o) const {
  SubsetBitmask s = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) s.words_[i] |= o.words_[i];
  return s;
}
SubsetBitmask SubsetBitmask::operator&(const SubsetBitmask& o) const {
  SubsetBitmask s = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) s.words_[i] &= o.words_[i];
  return s;
}
SubsetBitmask SubsetBitmask::operator^(const SubsetBitmask& o) const {
  SubsetBitmask s = *this;
  for (std::size_t i = 0; i < words_.size(); ++i) s.words_[i] ^= o.words_[i];
  return s;
}
bool SubsetBitmask::operator==(const SubsetBitmask& o) const {
  return space_ == o.space_ && words_ == o.words_;
}

std::string SubsetBitmask::to_hex() const {
  static const char* digits = "0123456789abcdef";
  const std::size_t nibbles = (static_cast<std::size_t>(space_.size()) + 3) / 4;
  std::string out(nibbles, '0');
  for (std::size_t k = 0; k < nibbles; ++k) {
    int v = 0;
    for (int b = 0; b < 4; ++b) {
      const std::size_t bit = k * 4 + b;
      if (bit < space_.size() && contains(static_cast<Index>(bit))) v |= 1 << b;
    }
    out[nibbles - 1 - k] = digits[v];
  }
  return out;
}

}  // namespace qflab
