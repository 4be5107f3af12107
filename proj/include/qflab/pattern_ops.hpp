#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qflab/factor.hpp"
#include "qflab/group_function.hpp"
#include "qflab/local_norms.hpp"
#include "qflab/subset.hpp"

namespace qflab {

/// Upper bound on the number of inner terms an operator evaluation may visit.
inline constexpr double kOperatorTermCap = 5e10;

/// Bipartite graph on U and V, or 3-partite 3-uniform hypergraph on U, V and W.
class PatternHypergraph {
 public:
  enum class Kind { Bipartite, Ternary };

  static PatternHypergraph bipartite(int u, int v, const std::vector<std::array<int, 2>>& edges);
  static PatternHypergraph ternary(int u, int v, int w, const std::vector<std::array<int, 3>>& edges);

  Kind kind() const { return kind_; }
  int u() const { return parts_[0]; }
  int v() const { return parts_[1]; }
  /// 1 for a bipartite graph.
  int w() const { return parts_[2]; }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<std::array<int, 3>>& edges() const { return edges_; }
  bool has_edge(int a, int b, int c = 0) const {
    return adjacency_[static_cast<std::size_t>((a * parts_[1] + b) * parts_[2] + c)] != 0;
  }

 private:
  PatternHypergraph(Kind kind, std::array<int, 3> parts, std::vector<std::array<int, 3>> edges);

  Kind kind_;
  std::array<int, 3> parts_;
  std::vector<std::array<int, 3>> edges_;
  std::vector<char> adjacency_;
};

/// U = V = [m], W = subsets of [m]^2 by bitmask (bit i*m + j), edge (i, j, S) iff (i, j) in S.
PatternHypergraph ip2_hypergraph(int m);

/// Per-vertex linear labels for a multi-local bipartite operator.
struct BipartiteLabels {
  std::vector<Label> du;
  std::vector<Label> dv;

  static BipartiteLabels constant(const PatternHypergraph& f, const Label& du, const Label& dv);
};

/// Atom labels per vertex and bilinear labels per pair; pair tables are row-major.
struct LabelAssignment {
  std::vector<Label> a, b, c;
  std::vector<Label> d_uv, d_uw, d_vw;

  static LabelAssignment constant(const PatternHypergraph& f, const DirectionTuple3& d);
  DirectionTuple3 tuple(const PatternHypergraph& f, int u, int v, int w) const;
};

/// Family of functions indexed by up to three coordinates.
template <typename Scalar>
class FunctionGrid {
 public:
  using Function = BasicGroupFunction<Scalar>;

  FunctionGrid(std::array<int, 3> dims, const Function& fill)
      : dims_(dims), cells_(static_cast<std::size_t>(dims[0] * dims[1] * dims[2]), fill) {}

  /// f on edges of F and g elsewhere.
  static FunctionGrid pattern(const PatternHypergraph& f, const Function& on, const Function& off) {
    FunctionGrid grid({f.u(), f.v(), f.w()}, off);
    for (const auto& e : f.edges()) grid.at(e[0], e[1], e[2]) = on;
    return grid;
  }
  /// Cells (i, S) for S a bitmask over [m]: on when i is in S.
  static FunctionGrid ip(int m, const Function& on, const Function& off) {
    FunctionGrid grid({m, 1 << m, 1}, off);
    for (int i = 0; i < m; ++i)
      for (int s = 0; s < (1 << m); ++s)
        if ((s >> i) & 1) grid.at(i, s) = on;
    return grid;
  }
  /// Cells (i, j, S) for S a bitmask over [m]^2: on when (i, j) is in S.
  static FunctionGrid ip2(int m, const Function& on, const Function& off) {
    return pattern(ip2_hypergraph(m), on, off);
  }

  const std::array<int, 3>& dims() const { return dims_; }
  Function& at(int i, int j, int k = 0) { return cells_[offset(i, j, k)]; }
  const Function& at(int i, int j, int k = 0) const { return cells_[offset(i, j, k)]; }
  const std::vector<Function>& cells() const { return cells_; }
  const Space& space() const { return cells_.front().space(); }

 private:
  std::size_t offset(int i, int j, int k) const {
    return static_cast<std::size_t>((i * dims_[1] + j) * dims_[2] + k);
  }

  std::array<int, 3> dims_;
  std::vector<Function> cells_;
};

using ComplexGrid = FunctionGrid<Complex>;
using CountingGrid = FunctionGrid<std::int64_t>;

/// E_{x_i} E_{y_S} prod f_{i,S}(x_i + y_S).
Complex t_ip(int m, const ComplexGrid& grid);
/// The same with x_i in L(a1) and y_S in L(a2).
Complex t_ip_local(int m, const LinearFactor& linear, const DirectionTuple2& d, const ComplexGrid& grid);

/// E_{x_i} E_{y_j} E_{z_S} prod f_{i,j,S}(x_i + y_j + z_S).
Complex t_ip2(int m, const ComplexGrid& grid);
/// The local version with x_i, y_j, z_S in B(a1), B(a2), B(a3) and the mu weights.
Complex t_ip2_local(int m, const QuadraticFactor& factor, const DirectionTuple3& d, const ComplexGrid& grid);

Complex t_bipartite(const PatternHypergraph& f, const LinearFactor& linear, const BipartiteLabels& labels,
                    const ComplexGrid& grid);
/// Unnormalized sum over prod L(d_u) x prod L(d_v) of the integer product.
__int128 bipartite_raw_sum(const PatternHypergraph& f, const LinearFactor& linear, const BipartiteLabels& labels,
                           const CountingGrid& grid);
/// Tuples with a_u + b_v in A exactly when uv is an edge.
std::uint64_t witness_count_bipartite(const PatternHypergraph& f, const LinearFactor& linear,
                                      const BipartiteLabels& labels, const SubsetBitmask& a);
/// prod |L(d_u)| * prod |L(d_v)|.
double bipartite_normalization(const PatternHypergraph& f, const LinearFactor& linear, const BipartiteLabels& labels);

Complex t_ternary(const PatternHypergraph& f, const QuadraticFactor& factor, const LabelAssignment& e,
                  const ComplexGrid& grid);
/// Unnormalized sum over I_F(e) of the integer product.
__int128 ternary_raw_sum(const PatternHypergraph& f, const QuadraticFactor& factor, const LabelAssignment& e,
                         const CountingGrid& grid);
/// |I_F(e)|.
std::uint64_t if_enumerate(const PatternHypergraph& f, const QuadraticFactor& factor, const LabelAssignment& e);
std::uint64_t witness_count_ternary(const PatternHypergraph& f, const QuadraticFactor& factor,
                                    const LabelAssignment& e, const SubsetBitmask& a);

struct TernaryNormalization {
  double atom_product = 1.0;   ///< prod over vertices of |B(label)|
  double level_product = 1.0;  ///< prod over pairs of |beta(label)| / p^{2n}
  double value() const { return atom_product * level_product; }
};
/// Throws DegenerateContext when an atom or level set is empty.
TernaryNormalization ternary_normalization(const PatternHypergraph& f, const QuadraticFactor& factor,
                                           const LabelAssignment& e);

struct WeightedDensity {
  double value = 0.0;   ///< weighted average of 1_A over admissible triples
  double alpha = 0.0;   ///< density of A on B(Sigma(d))
  double weight = 0.0;  ///< the same average with A the full group
};
WeightedDensity weighted_ternary_density(const QuadraticFactor& factor, const DirectionTuple3& d,
                                         const SubsetBitmask& a);

}  // namespace qflab
