#include "qflab/pattern_ops.hpp"

#include <bit>
#include <map>
#include <memory>
#include <tuple>

namespace qflab {

PatternHypergraph::PatternHypergraph(Kind kind, std::array<int, 3> parts, std::vector<std::array<int, 3>> edges)
    : kind_(kind), parts_(parts), edges_(std::move(edges)) {
  for (int s : parts_) {
    if (s < 1) throw Error(ErrorKind::InvalidArgument, "pattern parts must be nonempty");
  }
  adjacency_.assign(static_cast<std::size_t>(parts_[0] * parts_[1] * parts_[2]), 0);
  std::vector<std::array<int, 3>> unique;
  for (const auto& e : edges_) {
    for (int k = 0; k < 3; ++k) {
      if (e[static_cast<std::size_t>(k)] < 0 || e[static_cast<std::size_t>(k)] >= parts_[static_cast<std::size_t>(k)]) {
        throw Error(ErrorKind::InvalidArgument, "pattern edge leaves its parts");
      }
    }
    char& slot = adjacency_[static_cast<std::size_t>((e[0] * parts_[1] + e[1]) * parts_[2] + e[2])];
    if (!slot) unique.push_back(e);
    slot = 1;
  }
  edges_ = std::move(unique);
}

PatternHypergraph PatternHypergraph::bipartite(int u, int v, const std::vector<std::array<int, 2>>& edges) {
  std::vector<std::array<int, 3>> e3;
  for (const auto& e : edges) e3.push_back({e[0], e[1], 0});
  return PatternHypergraph(Kind::Bipartite, {u, v, 1}, std::move(e3));
}

PatternHypergraph PatternHypergraph::ternary(int u, int v, int w, const std::vector<std::array<int, 3>>& edges) {
  return PatternHypergraph(Kind::Ternary, {u, v, w}, edges);
}

PatternHypergraph ip2_hypergraph(int m) {
  if (m < 1 || m > 2) throw Error(ErrorKind::CapExceeded, "ip2_hypergraph supports m <= 2");
  const int subsets = 1 << (m * m);
  std::vector<std::array<int, 3>> edges;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int s = 0; s < subsets; ++s)
        if ((s >> (i * m + j)) & 1) edges.push_back({i, j, s});
  return PatternHypergraph::ternary(m, m, subsets, edges);
}

BipartiteLabels BipartiteLabels::constant(const PatternHypergraph& f, const Label& du, const Label& dv) {
  return {std::vector<Label>(static_cast<std::size_t>(f.u()), du), std::vector<Label>(static_cast<std::size_t>(f.v()), dv)};
}

LabelAssignment LabelAssignment::constant(const PatternHypergraph& f, const DirectionTuple3& d) {
  const auto u = static_cast<std::size_t>(f.u()), v = static_cast<std::size_t>(f.v()),
             w = static_cast<std::size_t>(f.w());
  LabelAssignment e;
  e.a.assign(u, d.a1);
  e.b.assign(v, d.a2);
  e.c.assign(w, d.a3);
  e.d_uv.assign(u * v, d.b12);
  e.d_uw.assign(u * w, d.b13);
  e.d_vw.assign(v * w, d.b23);
  return e;
}

DirectionTuple3 LabelAssignment::tuple(const PatternHypergraph& f, int u, int v, int w) const {
  const auto su = static_cast<std::size_t>(u), sv = static_cast<std::size_t>(v), sw = static_cast<std::size_t>(w);
  return {a[su], b[sv], c[sw], d_uv[su * static_cast<std::size_t>(f.v()) + sv],
          d_uw[su * static_cast<std::size_t>(f.w()) + sw], d_vw[sv * static_cast<std::size_t>(f.w()) + sw]};
}

namespace {

template <typename Value>
struct Accumulator;

template <>
struct Accumulator<Complex> {
  ComplexSum sum;
  void add(const Complex& v) { sum.add(v); }
  Complex value() const { return sum.value(); }
  static Complex mul(const Complex& a, const Complex& b) { return a * b; }
};

template <>
struct Accumulator<__int128> {
  __int128 sum = 0;
  void add(__int128 v) {
    if (__builtin_add_overflow(sum, v, &sum)) throw Error(ErrorKind::CapExceeded, "integer count overflow");
  }
  __int128 value() const { return sum; }
  static __int128 mul(__int128 a, __int128 b) {
    __int128 out;
    if (__builtin_mul_overflow(a, b, &out)) throw Error(ErrorKind::CapExceeded, "integer count overflow");
    return out;
  }
};

template <typename Value>
Value add_values(const Value& a, const Value& b) {
  Accumulator<Value> acc;
  acc.add(a);
  acc.add(b);
  return acc.value();
}

void check_cost(double terms, const char* what) {
  if (terms > kOperatorTermCap) {
    throw Error(ErrorKind::CapExceeded, std::string(what) + " would visit about " + std::to_string(terms) +
                                            " terms, above the configured cap");
  }
}

void check_dims(const std::array<int, 3>& got, const std::array<int, 3>& want, const char* what) {
  if (got != want) throw Error(ErrorKind::InvalidArgument, std::string(what) + ": function grid has the wrong shape");
}

/// Decodes t into digits of the given radices, least significant first.
void decode_mixed(std::size_t t, const std::vector<std::size_t>& radix, std::vector<std::size_t>& out) {
  for (std::size_t i = 0; i < radix.size(); ++i) {
    out[i] = t % radix[i];
    t /= radix[i];
  }
}

std::vector<std::size_t> bit_positions(const std::uint64_t* words, std::size_t count) {
  std::vector<std::size_t> out;
  for (std::size_t w = 0; w < count; ++w) {
    std::uint64_t bits = words[w];
    while (bits) {
      out.push_back(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
  return out;
}

/// Odometer over the product of the given lists; fn receives the current positions.
template <typename Fn>
void for_each_product(const std::vector<std::vector<std::size_t>>& lists, Fn fn) {
  for (const auto& l : lists) {
    if (l.empty()) return;
  }
  std::vector<std::size_t> pos(lists.size(), 0), pick(lists.size());
  for (std::size_t i = 0; i < lists.size(); ++i) pick[i] = lists[i][0];
  while (true) {
    fn(pick);
    std::size_t k = 0;
    for (; k < lists.size(); ++k) {
      if (++pos[k] < lists[k].size()) {
        pick[k] = lists[k][pos[k]];
        break;
      }
      pos[k] = 0;
      pick[k] = lists[k][0];
    }
    if (k == lists.size()) return;
  }
}

}  // namespace

Complex t_ip_local(int m, const LinearFactor& linear, const DirectionTuple2& d, const ComplexGrid& grid) {
  if (m < 1 || m > 3) throw Error(ErrorKind::CapExceeded, "t_ip supports 1 <= m <= 3");
  const int subsets = 1 << m;
  check_dims(grid.dims(), {m, subsets, 1}, "t_ip");
  const QuadraticFactor part(linear);
  const Space& sp = linear.space();
  const auto& xs = part.members(d.a1);
  const auto& ys = part.members(d.a2);
  const std::size_t nx = xs.size();
  const std::vector<std::size_t> radix(static_cast<std::size_t>(m), nx);
  const auto outer = static_cast<std::size_t>(ipow(static_cast<long long>(nx), m));
  const double inner_terms = static_cast<double>(subsets) * static_cast<double>(ys.size()) * m;
  check_cost(static_cast<double>(outer) * inner_terms, "t_ip");
  const double ny = static_cast<double>(ys.size());
  const Complex total = chunked_complex_sum(outer, [&](std::size_t begin, std::size_t end) {
    ComplexSum part_sum;
    std::vector<std::size_t> digit(radix.size());
    std::vector<Index> x(radix.size());
    for (std::size_t t = begin; t < end; ++t) {
      decode_mixed(t, radix, digit);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = xs[digit[i]];
      Complex prod = 1.0;
      for (int s = 0; s < subsets; ++s) {
        ComplexSum inner;
        for (Index y : ys) {
          Complex v = 1.0;
          for (int i = 0; i < m; ++i) v *= grid.at(i, s)(sp.add(x[static_cast<std::size_t>(i)], y));
          inner.add(v);
        }
        prod *= inner.value() / ny;
      }
      part_sum.add(prod);
    }
    count_terms(static_cast<std::uint64_t>(static_cast<double>(end - begin) * inner_terms));
    return part_sum.value();
  });
  return total / static_cast<double>(outer);
}

Complex t_ip(int m, const ComplexGrid& grid) {
  return t_ip_local(m, LinearFactor::trivial(grid.space()), DirectionTuple2{{}, {}}, grid);
}

Complex t_ip2_local(int m, const QuadraticFactor& factor, const DirectionTuple3& d, const ComplexGrid& grid) {
  if (m < 1 || m > 2) throw Error(ErrorKind::CapExceeded, "t_ip2 supports m <= 2");
  const int subsets = 1 << (m * m);
  check_dims(grid.dims(), {m, m, subsets}, "t_ip2");
  const LocalContext3 ctx(factor, d);
  ctx.require_nondegenerate();
  const Space& sp = factor.space();
  const auto& xs = ctx.atom(0);
  const auto& ys = ctx.atom(1);
  const auto& zs = ctx.atom(2);
  const BitRows& a12 = ctx.adjacency(0);
  const BitRows& a13 = ctx.adjacency(1);
  const BitRows& a23 = ctx.adjacency(2);
  const double rho12 = 1.0 / ctx.mu(0), rho13 = 1.0 / ctx.mu(1), rho23 = 1.0 / ctx.mu(2);
  const std::size_t nx = xs.size();
  const auto um = static_cast<std::size_t>(m);
  const std::vector<std::size_t> radix(um, nx);
  const auto outer = static_cast<std::size_t>(ipow(static_cast<long long>(nx), m));
  const double inner_terms = std::pow(static_cast<double>(ys.size()) * std::pow(rho12, m), m) * subsets *
                             static_cast<double>(zs.size()) * std::pow(rho13 * rho23, m) * m * m;
  check_cost(static_cast<double>(outer) * std::max(1.0, inner_terms), "t_ip2");
  // Each per-S average carries mu13^m mu23^m / |B3|; the outer average carries mu12^{m^2} / (|B1| |B2|)^m.
  const double per_s = std::pow(ctx.mu(1) * ctx.mu(2), m) / static_cast<double>(zs.size());
  const double outer_scale = std::pow(ctx.mu(0), m * m) /
                             std::pow(static_cast<double>(nx) * static_cast<double>(ys.size()), m);
  const Complex total = chunked_complex_sum(outer, [&](std::size_t begin, std::size_t end) {
    ComplexSum part;
    std::uint64_t visited = 0;
    std::vector<std::size_t> digit(um);
    std::vector<Index> x(um), y(um);
    std::vector<std::uint64_t> ymask(a12.words()), zx(a13.words()), zmask(a13.words());
    for (std::size_t t = begin; t < end; ++t) {
      decode_mixed(t, radix, digit);
      for (std::size_t i = 0; i < um; ++i) x[i] = xs[digit[i]];
      std::fill(ymask.begin(), ymask.end(), ~std::uint64_t{0});
      std::fill(zx.begin(), zx.end(), ~std::uint64_t{0});
      for (std::size_t i = 0; i < um; ++i) {
        for (std::size_t w = 0; w < ymask.size(); ++w) ymask[w] &= a12.row(digit[i])[w];
        for (std::size_t w = 0; w < zx.size(); ++w) zx[w] &= a13.row(digit[i])[w];
      }
      const auto ylist = bit_positions(ymask.data(), ymask.size());
      for_each_product(std::vector<std::vector<std::size_t>>(um, ylist), [&](const std::vector<std::size_t>& yj) {
        for (std::size_t j = 0; j < um; ++j) y[j] = ys[yj[j]];
        zmask = zx;
        for (std::size_t j = 0; j < um; ++j)
          for (std::size_t w = 0; w < zmask.size(); ++w) zmask[w] &= a23.row(yj[j])[w];
        const auto zlist = bit_positions(zmask.data(), zmask.size());
        Complex prod = 1.0;
        for (int s = 0; s < subsets && prod != 0.0; ++s) {
          ComplexSum inner;
          for (std::size_t k : zlist) {
            const Index z = zs[k];
            Complex v = 1.0;
            for (int i = 0; i < m; ++i)
              for (int j = 0; j < m; ++j)
                v *= grid.at(i, j, s)(sp.add(sp.add(x[static_cast<std::size_t>(i)], y[static_cast<std::size_t>(j)]), z));
            inner.add(v);
          }
          visited += zlist.size() * um * um;
          prod *= inner.value() * per_s;
        }
        part.add(prod);
      });
    }
    count_terms(visited);
    return part.value();
  });
  return total * outer_scale;
}

Complex t_ip2(int m, const ComplexGrid& grid) {
  const QuadraticFactor trivial(LinearFactor::trivial(grid.space()));
  return t_ip2_local(m, trivial, DirectionTuple3{{}, {}, {}, {}, {}, {}}, grid);
}

namespace {

/// Shared walk over prod L(d_u) for the bipartite operators. `kernel(x, v)` returns the
/// factor contributed by vertex v given the x tuple.
template <typename Value, typename Kernel>
Value bipartite_walk(const PatternHypergraph& f, const QuadraticFactor& part, const BipartiteLabels& labels,
                     Kernel kernel) {
  if (labels.du.size() != static_cast<std::size_t>(f.u()) || labels.dv.size() != static_cast<std::size_t>(f.v())) {
    throw Error(ErrorKind::InvalidArgument, "bipartite labels do not match the graph");
  }
  std::vector<const std::vector<Index>*> xa;
  std::vector<std::size_t> radix;
  double outer = 1.0, inner = 0.0;
  for (const auto& l : labels.du) {
    xa.push_back(&part.members(l));
    radix.push_back(xa.back()->size());
    outer *= static_cast<double>(radix.back());
  }
  for (const auto& l : labels.dv) inner += static_cast<double>(part.members(l).size()) * f.u();
  check_cost(outer * inner, "bipartite operator");
  const auto count = static_cast<std::size_t>(outer);
  return chunked_reduce<Value>(
      count, default_chunk(count), Value{},
      [&](std::size_t begin, std::size_t end) {
        Accumulator<Value> acc;
        std::vector<std::size_t> digit(radix.size());
        std::vector<Index> x(radix.size());
        for (std::size_t t = begin; t < end; ++t) {
          decode_mixed(t, radix, digit);
          for (std::size_t u = 0; u < x.size(); ++u) x[u] = (*xa[u])[digit[u]];
          Value prod = Value(1);
          for (int v = 0; v < f.v(); ++v) prod = Accumulator<Value>::mul(prod, kernel(x, v));
          acc.add(prod);
        }
        count_terms(static_cast<std::uint64_t>(static_cast<double>(end - begin) * inner));
        return acc.value();
      },
      add_values<Value>);
}

template <typename Scalar, typename Value>
Value bipartite_sum(const PatternHypergraph& f, const LinearFactor& linear, const BipartiteLabels& labels,
                    const FunctionGrid<Scalar>& grid) {
  check_dims(grid.dims(), {f.u(), f.v(), 1}, "bipartite operator");
  const QuadraticFactor part(linear);
  const Space& sp = linear.space();
  return bipartite_walk<Value>(f, part, labels, [&](const std::vector<Index>& x, int v) {
    Accumulator<Value> acc;
    for (Index y : part.members(labels.dv[static_cast<std::size_t>(v)])) {
      Value term = Value(1);
      for (int u = 0; u < f.u(); ++u) {
        term = Accumulator<Value>::mul(term, Value(grid.at(u, v)(sp.add(x[static_cast<std::size_t>(u)], y))));
      }
      acc.add(term);
    }
    return acc.value();
  });
}

}  // namespace

double bipartite_normalization(const PatternHypergraph& f, const LinearFactor& linear, const BipartiteLabels& labels) {
  const QuadraticFactor part(linear);
  double out = 1.0;
  for (const auto& l : labels.du) out *= static_cast<double>(part.members(l).size());
  for (const auto& l : labels.dv) out *= static_cast<double>(part.members(l).size());
  (void)f;
  return out;
}

Complex t_bipartite(const PatternHypergraph& f, const LinearFactor& linear, const BipartiteLabels& labels,
                    const ComplexGrid& grid) {
  const Complex raw = bipartite_sum<Complex, Complex>(f, linear, labels, grid);
  return raw / bipartite_normalization(f, linear, labels);
}

__int128 bipartite_raw_sum(const PatternHypergraph& f, const LinearFactor& linear, const BipartiteLabels& labels,
                           const CountingGrid& grid) {
  return bipartite_sum<std::int64_t, __int128>(f, linear, labels, grid);
}

std::uint64_t witness_count_bipartite(const PatternHypergraph& f, const LinearFactor& linear,
                                      const BipartiteLabels& labels, const SubsetBitmask& a) {
  const QuadraticFactor part(linear);
  const Space& sp = linear.space();
  const __int128 total = bipartite_walk<__int128>(f, part, labels, [&](const std::vector<Index>& x, int v) {
    __int128 hits = 0;
    for (Index y : part.members(labels.dv[static_cast<std::size_t>(v)])) {
      bool ok = true;
      for (int u = 0; u < f.u() && ok; ++u) {
        ok = a.contains(sp.add(x[static_cast<std::size_t>(u)], y)) == f.has_edge(u, v);
      }
      hits += ok;
    }
    return hits;
  });
  return static_cast<std::uint64_t>(total);
}

namespace {

/// Atoms, level sets and adjacency bitsets needed by the ternary operators.
class TernaryPlan {
 public:
  TernaryPlan(const PatternHypergraph& f, const QuadraticFactor& factor, const LabelAssignment& e)
      : factor_(factor) {
    const auto U = static_cast<std::size_t>(f.u()), V = static_cast<std::size_t>(f.v()),
               W = static_cast<std::size_t>(f.w());
    if (e.a.size() != U || e.b.size() != V || e.c.size() != W || e.d_uv.size() != U * V ||
        e.d_uw.size() != U * W || e.d_vw.size() != V * W) {
      throw Error(ErrorKind::InvalidArgument, "label assignment does not match the hypergraph");
    }
    for (const auto& l : e.a) xa_.push_back(&factor.members(l));
    for (const auto& l : e.b) yb_.push_back(&factor.members(l));
    for (const auto& l : e.c) zc_.push_back(&factor.members(l));
    for (const auto* atom : xa_) empty_ = empty_ || atom->empty();
    for (const auto* atom : yb_) empty_ = empty_ || atom->empty();
    for (const auto* atom : zc_) empty_ = empty_ || atom->empty();
    for (std::size_t u = 0; u < U; ++u)
      for (std::size_t v = 0; v < V; ++v) uv_.push_back(adjacency(e.a[u], e.b[v], e.d_uv[u * V + v]));
    for (std::size_t u = 0; u < U; ++u)
      for (std::size_t w = 0; w < W; ++w) uw_.push_back(adjacency(e.a[u], e.c[w], e.d_uw[u * W + w]));
    for (std::size_t v = 0; v < V; ++v)
      for (std::size_t w = 0; w < W; ++w) vw_.push_back(adjacency(e.b[v], e.c[w], e.d_vw[v * W + w]));
  }

  bool has_empty_atom() const { return empty_; }
  bool has_empty_level() const {
    for (const auto& [code, level] : levels_) {
      if (level.empty()) return true;
    }
    return false;
  }

  /// prod |B| and prod |beta| / p^{2n}.
  TernaryNormalization normalization() const {
    if (empty_) throw Error(ErrorKind::DegenerateContext, "a vertex atom of the pattern is empty");
    if (has_empty_level()) throw Error(ErrorKind::DegenerateContext, "a pair level set of the pattern is empty");
    TernaryNormalization out;
    for (const auto* atom : xa_) out.atom_product *= static_cast<double>(atom->size());
    for (const auto* atom : yb_) out.atom_product *= static_cast<double>(atom->size());
    for (const auto* atom : zc_) out.atom_product *= static_cast<double>(atom->size());
    for (const auto& code : pair_codes_) out.level_product /= levels_.at(code).weight();
    return out;
  }

  /// Walk over I_F(e): kernel(x, y, w, zlist) gives the factor of vertex w, with zlist the
  /// admissible positions in the atom of w.
  template <typename Value, typename Kernel>
  Value walk(Kernel kernel) const {
    if (empty_) return Value{};
    const std::size_t U = xa_.size(), V = yb_.size(), W = zc_.size();
    std::vector<std::size_t> radix;
    double outer = 1.0;
    for (const auto* atom : xa_) {
      radix.push_back(atom->size());
      outer *= static_cast<double>(atom->size());
    }
    check_cost(outer * estimated_inner(), "ternary operator");
    const auto count = static_cast<std::size_t>(outer);
    return chunked_reduce<Value>(
        count, default_chunk(count), Value{},
        [&](std::size_t begin, std::size_t end) {
          Accumulator<Value> acc;
          std::uint64_t visited = 0;
          std::vector<std::size_t> digit(U);
          std::vector<Index> x(U), y(V);
          std::vector<std::vector<std::uint64_t>> zx(W);
          std::vector<std::uint64_t> zmask;
          for (std::size_t t = begin; t < end; ++t) {
            decode_mixed(t, radix, digit);
            for (std::size_t u = 0; u < U; ++u) x[u] = (*xa_[u])[digit[u]];
            std::vector<std::vector<std::size_t>> ylists(V);
            for (std::size_t v = 0; v < V; ++v) {
              std::vector<std::uint64_t> mask(uv_[v]->words(), ~std::uint64_t{0});
              for (std::size_t u = 0; u < U; ++u) {
                const std::uint64_t* row = uv_[u * V + v]->row(digit[u]);
                for (std::size_t k = 0; k < mask.size(); ++k) mask[k] &= row[k];
              }
              ylists[v] = bit_positions(mask.data(), mask.size());
            }
            for (std::size_t w = 0; w < W; ++w) {
              zx[w].assign(uw_[w]->words(), ~std::uint64_t{0});
              for (std::size_t u = 0; u < U; ++u) {
                const std::uint64_t* row = uw_[u * W + w]->row(digit[u]);
                for (std::size_t k = 0; k < zx[w].size(); ++k) zx[w][k] &= row[k];
              }
            }
            for_each_product(ylists, [&](const std::vector<std::size_t>& yp) {
              for (std::size_t v = 0; v < V; ++v) y[v] = (*yb_[v])[yp[v]];
              Value prod = Value(1);
              for (std::size_t w = 0; w < W; ++w) {
                zmask = zx[w];
                for (std::size_t v = 0; v < V; ++v) {
                  const std::uint64_t* row = vw_[v * W + w]->row(yp[v]);
                  for (std::size_t k = 0; k < zmask.size(); ++k) zmask[k] &= row[k];
                }
                const auto zlist = bit_positions(zmask.data(), zmask.size());
                visited += zlist.size() * U * V;
                prod = Accumulator<Value>::mul(prod, kernel(x, y, w, zlist));
                if (prod == Value(0)) break;
              }
              acc.add(prod);
            });
          }
          count_terms(visited);
          return acc.value();
        },
        add_values<Value>);
  }

  const std::vector<Index>& z_atom(std::size_t w) const { return *zc_[w]; }

 private:
  double density(const Label& b) {
    const std::uint32_t code = encode_label(b, factor_.p());
    auto it = levels_.find(code);
    if (it == levels_.end()) it = levels_.emplace(code, factor_.level_set(b)).first;
    return static_cast<double>(it->second.size) / static_cast<double>(it->second.universe);
  }

  const BitRows* adjacency(const Label& row, const Label& col, const Label& b) {
    if (static_cast<int>(b.size()) != factor_.q()) {
      throw Error(ErrorKind::InvalidArgument, "bilinear label length differs from q");
    }
    const auto key = std::make_tuple(factor_.encode(row), factor_.encode(col), encode_label(b, factor_.p()));
    const double rho = density(b);
    rho_.push_back(rho);
    pair_codes_.push_back(std::get<2>(key));
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      auto bits = std::make_unique<BitRows>(
          level_set_adjacency(factor_, factor_.members(row), factor_.members(col), b));
      it = cache_.emplace(key, std::move(bits)).first;
    }
    return it->second.get();
  }

  double estimated_inner() const {
    const std::size_t U = xa_.size(), V = yb_.size(), W = zc_.size();
    double ys = 1.0;
    for (std::size_t v = 0; v < V; ++v) {
      double n = static_cast<double>(yb_[v]->size());
      for (std::size_t u = 0; u < U; ++u) n *= rho_[u * V + v];
      ys *= n;
    }
    double zs = 0.0;
    for (std::size_t w = 0; w < W; ++w) {
      double n = static_cast<double>(zc_[w]->size());
      for (std::size_t u = 0; u < U; ++u) n *= rho_[U * V + u * W + w];
      for (std::size_t v = 0; v < V; ++v) n *= rho_[U * V + U * W + v * W + w];
      zs += n;
    }
    return std::max(1.0, ys * (zs + static_cast<double>(W)) * static_cast<double>(U * V));
  }

  const QuadraticFactor& factor_;
  std::vector<const std::vector<Index>*> xa_, yb_, zc_;
  std::vector<const BitRows*> uv_, uw_, vw_;
  std::vector<double> rho_;
  std::vector<std::uint32_t> pair_codes_;
  std::map<std::uint32_t, BilinearLevelSet> levels_;
  std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>, std::unique_ptr<BitRows>> cache_;
  bool empty_ = false;
};

template <typename Scalar, typename Value>
Value ternary_sum(const PatternHypergraph& f, const QuadraticFactor& factor, const LabelAssignment& e,
                  const FunctionGrid<Scalar>& grid) {
  check_dims(grid.dims(), {f.u(), f.v(), f.w()}, "ternary operator");
  const TernaryPlan plan(f, factor, e);
  const Space& sp = factor.space();
  return plan.walk<Value>([&](const std::vector<Index>& x, const std::vector<Index>& y, std::size_t w,
                              const std::vector<std::size_t>& zlist) {
    Accumulator<Value> acc;
    const auto& atom = plan.z_atom(w);
    for (std::size_t k : zlist) {
      const Index z = atom[k];
      Value term = Value(1);
      for (std::size_t u = 0; u < x.size(); ++u) {
        const Index xz = sp.add(x[u], z);
        for (std::size_t v = 0; v < y.size(); ++v) {
          term = Accumulator<Value>::mul(
              term, Value(grid.at(static_cast<int>(u), static_cast<int>(v), static_cast<int>(w))(sp.add(xz, y[v]))));
        }
      }
      acc.add(term);
    }
    return acc.value();
  });
}

}  // namespace

TernaryNormalization ternary_normalization(const PatternHypergraph& f, const QuadraticFactor& factor,
                                           const LabelAssignment& e) {
  return TernaryPlan(f, factor, e).normalization();
}

Complex t_ternary(const PatternHypergraph& f, const QuadraticFactor& factor, const LabelAssignment& e,
                  const ComplexGrid& grid) {
  const TernaryNormalization norm = ternary_normalization(f, factor, e);
  const Complex raw = ternary_sum<Complex, Complex>(f, factor, e, grid);
  return raw / norm.value();
}

__int128 ternary_raw_sum(const PatternHypergraph& f, const QuadraticFactor& factor, const LabelAssignment& e,
                         const CountingGrid& grid) {
  return ternary_sum<std::int64_t, __int128>(f, factor, e, grid);
}

std::uint64_t if_enumerate(const PatternHypergraph& f, const QuadraticFactor& factor, const LabelAssignment& e) {
  const TernaryPlan plan(f, factor, e);
  const __int128 total = plan.walk<__int128>(
      [](const std::vector<Index>&, const std::vector<Index>&, std::size_t, const std::vector<std::size_t>& zlist) {
        return static_cast<__int128>(zlist.size());
      });
  return static_cast<std::uint64_t>(total);
}

std::uint64_t witness_count_ternary(const PatternHypergraph& f, const QuadraticFactor& factor,
                                    const LabelAssignment& e, const SubsetBitmask& a) {
  const TernaryPlan plan(f, factor, e);
  const Space& sp = factor.space();
  const __int128 total = plan.walk<__int128>([&](const std::vector<Index>& x, const std::vector<Index>& y,
                                                 std::size_t w, const std::vector<std::size_t>& zlist) {
    __int128 hits = 0;
    const auto& atom = plan.z_atom(w);
    for (std::size_t k : zlist) {
      bool ok = true;
      for (std::size_t u = 0; u < x.size() && ok; ++u) {
        for (std::size_t v = 0; v < y.size() && ok; ++v) {
          const bool in = a.contains(sp.add(sp.add(x[u], y[v]), atom[k]));
          ok = in == f.has_edge(static_cast<int>(u), static_cast<int>(v), static_cast<int>(w));
        }
      }
      hits += ok;
    }
    return hits;
  });
  return static_cast<std::uint64_t>(total);
}

WeightedDensity weighted_ternary_density(const QuadraticFactor& factor, const DirectionTuple3& d,
                                         const SubsetBitmask& a) {
  const LocalContext3 ctx(factor, d);
  ctx.require_nondegenerate();
  const auto& target = ctx.target_members();
  if (target.empty()) throw Error(ErrorKind::EmptyAtom, "target atom B(Sigma(d)) is empty");
  const Space& sp = factor.space();
  const auto& xs = ctx.atom(0);
  const auto& ys = ctx.atom(1);
  const auto& zs = ctx.atom(2);
  const BitRows& a12 = ctx.adjacency(0);
  const BitRows& a13 = ctx.adjacency(1);
  const BitRows& a23 = ctx.adjacency(2);
  struct Counts {
    std::uint64_t hits = 0, all = 0;
  };
  const Counts counts = chunked_reduce<Counts>(
      xs.size(), default_chunk(xs.size()), Counts{},
      [&](std::size_t begin, std::size_t end) {
        Counts c;
        std::vector<std::uint64_t> zmask(a13.words());
        for (std::size_t i = begin; i < end; ++i) {
          for (std::size_t j : bit_positions(a12.row(i), a12.words())) {
            const Index xy = sp.add(xs[i], ys[j]);
            for (std::size_t w = 0; w < zmask.size(); ++w) zmask[w] = a13.row(i)[w] & a23.row(j)[w];
            for (std::size_t k : bit_positions(zmask.data(), zmask.size())) {
              ++c.all;
              c.hits += a.contains(sp.add(xy, zs[k]));
            }
          }
        }
        count_terms(c.all);
        return c;
      },
      [](Counts acc, const Counts& part) {
        acc.hits += part.hits;
        acc.all += part.all;
        return acc;
      });
  const double scale = ctx.mu(0) * ctx.mu(1) * ctx.mu(2) /
                       (static_cast<double>(xs.size()) * static_cast<double>(ys.size()) * static_cast<double>(zs.size()));
  WeightedDensity out;
  out.value = static_cast<double>(counts.hits) * scale;
  out.weight = static_cast<double>(counts.all) * scale;
  std::size_t in_target = 0;
  for (Index x : target) in_target += a.contains(x);
  out.alpha = static_cast<double>(in_target) / static_cast<double>(target.size());
  return out;
}

}  // namespace qflab
