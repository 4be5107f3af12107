#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "qflab/fpn_core.hpp"
#include "qflab/group_function.hpp"

namespace qflab {

/// Label vector over F_p; atom labels list linear entries first.
using Label = std::vector<int>;

/// Encodes a label little-endian in base p.
std::uint32_t encode_label(const Label& label, int p);
Label decode_label(std::uint32_t code, int p, int length);
Label add_labels(const Label& a, const Label& b, int p);

class LinearFactor {
 public:
  LinearFactor(const Space& space, std::vector<GroupVector> vectors);
  static LinearFactor trivial(const Space& space) { return LinearFactor(space, {}); }

  const Space& space() const { return space_; }
  int ell() const { return static_cast<int>(vectors_.size()); }
  const std::vector<GroupVector>& vectors() const { return vectors_; }
  Label label_of(Index x) const;

 private:
  Space space_;
  std::vector<GroupVector> vectors_;
  std::vector<Index> vector_index_;
};

LinearFactor new_linear_factor(const Space& space, std::vector<GroupVector> vectors);

/// Pairs (x, y) with x^T M_j y = b_j for every form of the factor.
struct BilinearLevelSet {
  Label b;
  std::uint64_t size = 0;
  std::uint64_t universe = 0;

  bool empty() const { return size == 0; }
  /// mu = p^{2n} / |beta|.
  double weight() const;
};

class QuadraticFactor {
 public:
  static constexpr int kMaxForms = 6;

  QuadraticFactor(LinearFactor linear, std::vector<SymmetricForm> forms);
  explicit QuadraticFactor(LinearFactor linear) : QuadraticFactor(std::move(linear), {}) {}

  const Space& space() const { return linear_.space(); }
  const LinearFactor& linear() const { return linear_; }
  const std::vector<SymmetricForm>& forms() const { return forms_; }
  int p() const { return space().p(); }
  int n() const { return space().n(); }
  int ell() const { return linear_.ell(); }
  int q() const { return static_cast<int>(forms_.size()); }
  int label_length() const { return ell() + q(); }
  /// Minimum rank of a nontrivial combination of the forms; n + 1 when q = 0.
  int rank() const { return rank_; }

  std::uint32_t num_labels() const { return num_labels_; }
  std::uint32_t label_code(Index x) const { return codes_[x]; }
  Label label_of(Index x) const { return decode(codes_[x]); }
  std::uint32_t encode(const Label& label) const;
  Label decode(std::uint32_t code) const { return decode_label(code, p(), label_length()); }

  const std::vector<Index>& members(std::uint32_t code) const { return members_[code]; }
  const std::vector<Index>& members(const Label& label) const { return members_[encode(label)]; }

  /// x^T M_j y for every form.
  Label bilinear_label(Index x, Index y) const;
  bool in_level_set(Index x, Index y, const Label& b) const;
  /// M_j x as a group index.
  Index applied(int j, Index x) const { return applied_[static_cast<std::size_t>(j)][x]; }
  BilinearLevelSet level_set(const Label& b) const;

 private:
  LinearFactor linear_;
  std::vector<SymmetricForm> forms_;
  int rank_;
  std::uint32_t num_labels_;
  std::vector<std::uint32_t> codes_;
  std::vector<std::vector<Index>> members_;
  std::vector<std::vector<Index>> applied_;
};

QuadraticFactor new_quadratic_factor(LinearFactor linear, std::vector<SymmetricForm> forms);
Label atom_of(const QuadraticFactor& b, const GroupVector& x);
std::vector<GroupVector> atom_members(const QuadraticFactor& b, const Label& label);
std::size_t atom_size(const QuadraticFactor& b, const Label& label);
BilinearLevelSet bilinear_level_set(const QuadraticFactor& b, const Label& blabel);

/// E(f|B): each value replaced by the mean of f over its atom.
GroupFunction project_onto_factor(const GroupFunction& f, const QuadraticFactor& b);
/// True iff every atom of `finer` lies inside a single atom of `coarser`.
bool refines(const QuadraticFactor& finer, const QuadraticFactor& coarser);

struct DirectionTuple2 {
  Label a1;
  Label a2;
};

struct DirectionTuple3 {
  Label a1, a2, a3;
  Label b12, b13, b23;
};

Label sigma2(const DirectionTuple2& d, int p);
/// a1 + a2 + a3 + 2(0 b12) + 2(0 b13) + 2(0 b23), the b's padded with ell leading zeros.
Label sigma3(const DirectionTuple3& d, int ell, int p);

}  // namespace qflab
