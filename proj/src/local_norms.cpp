#include "qflab/local_norms.hpp"

#include <bit>

namespace qflab {

namespace {

template <typename Fn>
void for_each_bit(const std::uint64_t* words, std::size_t count, Fn fn) {
  for (std::size_t w = 0; w < count; ++w) {
    std::uint64_t bits = words[w];
    while (bits) {
      fn(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
}

void and_into(std::uint64_t* out, const std::uint64_t* a, const std::uint64_t* b, std::size_t count) {
  for (std::size_t w = 0; w < count; ++w) out[w] = a[w] & b[w];
}

}  // namespace

BitRows level_set_adjacency(const QuadraticFactor& factor, const std::vector<Index>& rows,
                            const std::vector<Index>& cols, const Label& b) {
  BitRows out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (factor.in_level_set(rows[i], cols[j], b)) out.set(i, j);
    }
  }
  return out;
}

LocalContext2::LocalContext2(const LinearFactor& linear, DirectionTuple2 d)
    : factor_(std::make_shared<const QuadraticFactor>(linear)), d_(std::move(d)) {
  if (static_cast<int>(d_.a1.size()) != linear.ell() || static_cast<int>(d_.a2.size()) != linear.ell()) {
    throw Error(ErrorKind::InvalidArgument, "direction tuple lengths differ from the linear complexity");
  }
}

namespace {

Complex local_u2_direct(const LocalContext2& ctx, const GroupFunction& f00, const GroupFunction& f01,
                        const GroupFunction& f10, const GroupFunction& f11) {
  const Space& sp = f00.space();
  const auto& xs = ctx.first();
  const auto& ys = ctx.second();
  const std::size_t nx = xs.size();
  const Complex total = chunked_complex_sum(nx * nx, [&](std::size_t begin, std::size_t end) {
    ComplexSum part;
    for (std::size_t idx = begin; idx < end; ++idx) {
      const Index x0 = xs[idx / nx];
      const Index x1 = xs[idx % nx];
      ComplexSum a, b;
      for (Index y : ys) {
        const Index s0 = sp.add(x0, y);
        const Index s1 = sp.add(x1, y);
        a.add(f00(s0) * std::conj(f10(s1)));
        b.add(std::conj(f01(s0)) * f11(s1));
      }
      part.add(a.value() * b.value());
    }
    count_terms(static_cast<std::uint64_t>(end - begin) * ys.size());
    return part.value();
  });
  const double dx = static_cast<double>(nx);
  const double dy = static_cast<double>(ys.size());
  return total / (dx * dx * dy * dy);
}

}  // namespace

SpectrumTable restricted_fourier(const GroupFunction& f, const LinearFactor& linear, const GroupVector& z) {
  const Space& sp = f.space();
  const auto basis = kernel_basis(linear.vectors(), sp.p(), sp.n());
  const Space sub(sp.p(), static_cast<int>(basis.size()));
  std::vector<Index> basis_index;
  for (const auto& b : basis) basis_index.push_back(b.index());
  const Index zi = sp.index(z);
  GroupFunction::Values g(sub.size());
  for (Index c = 0; c < sub.size(); ++c) {
    Index u = zi;
    for (int k = 0; k < sub.n(); ++k) {
      const int coeff = sub.coord(c, k);
      if (coeff) u = sp.add(u, sp.scale(coeff, basis_index[static_cast<std::size_t>(k)]));
    }
    g[c] = f(u);
  }
  return fourier_transform(GroupFunction(sub, g));
}

Complex local_u2_inner(const LocalContext2& ctx, const GroupFunction& f00, const GroupFunction& f01,
                       const GroupFunction& f10, const GroupFunction& f11, LocalU2Method method) {
  if (method == LocalU2Method::Direct) return local_u2_direct(ctx, f00, f01, f10, f11);
  const auto& target = ctx.target_members();
  const GroupVector z = f00.space().vector(target.front());
  const auto s00 = restricted_fourier(f00, ctx.linear(), z);
  const auto s01 = restricted_fourier(f01, ctx.linear(), z);
  const auto s10 = restricted_fourier(f10, ctx.linear(), z);
  const auto s11 = restricted_fourier(f11, ctx.linear(), z);
  ComplexSum s;
  for (Eigen::Index t = 0; t < s00.values.size(); ++t) {
    s.add(s00.values[t] * std::conj(s01.values[t]) * std::conj(s10.values[t]) * s11.values[t]);
  }
  return s.value();
}

double local_u2_norm(const LocalContext2& ctx, const GroupFunction& f, LocalU2Method method, double tol) {
  return diagonal_root(local_u2_inner(ctx, f, f, f, f, method), 4, tol);
}

LocalContext3::LocalContext3(const QuadraticFactor& factor, DirectionTuple3 d)
    : factor_(&factor), d_(std::move(d)) {
  const int len = factor.label_length();
  const auto q = static_cast<std::size_t>(factor.q());
  if (static_cast<int>(d_.a1.size()) != len || static_cast<int>(d_.a2.size()) != len ||
      static_cast<int>(d_.a3.size()) != len || d_.b12.size() != q || d_.b13.size() != q ||
      d_.b23.size() != q) {
    throw Error(ErrorKind::InvalidArgument, "direction tuple lengths differ from the factor complexity");
  }
  atoms_ = {&factor.members(d_.a1), &factor.members(d_.a2), &factor.members(d_.a3)};
  const std::array<const Label*, 3> labels = {&d_.b12, &d_.b13, &d_.b23};
  for (std::size_t k = 0; k < 3; ++k) {
    if (atoms_[k]->empty()) reason_ = "atom B(a" + std::to_string(k + 1) + ") is empty";
  }
  for (std::size_t k = 0; k < 3; ++k) {
    levels_[k] = factor.level_set(*labels[k]);
    if (levels_[k].empty() && reason_.empty()) {
      static const char* names[] = {"12", "13", "23"};
      reason_ = std::string("level set beta(b") + names[k] + ") is empty";
    }
  }
  if (!degenerate()) {
    adjacency_[0] = level_set_adjacency(factor, *atoms_[0], *atoms_[1], d_.b12);
    adjacency_[1] = level_set_adjacency(factor, *atoms_[0], *atoms_[2], d_.b13);
    adjacency_[2] = level_set_adjacency(factor, *atoms_[1], *atoms_[2], d_.b23);
  }
}

void LocalContext3::require_nondegenerate() const {
  if (degenerate()) throw Error(ErrorKind::DegenerateContext, reason_);
}

namespace {

/// Sum over weighted configurations of G0 * G1 (or |G0|^2 when diagonal), unnormalized.
Complex local_u3_raw(const LocalContext3& ctx, const Octuple& f, bool diagonal) {
  const Space& sp = ctx.factor().space();
  const auto& xs = ctx.atom(0);
  const auto& ys = ctx.atom(1);
  const auto& zs = ctx.atom(2);
  const BitRows& a12 = ctx.adjacency(0);
  const BitRows& a13 = ctx.adjacency(1);
  const BitRows& a23 = ctx.adjacency(2);
  std::array<GroupFunction::Values, 8> c;
  for (int e = 0; e < 8; ++e) {
    const auto& v = f[static_cast<std::size_t>(e)].values();
    c[static_cast<std::size_t>(e)] = std::popcount(static_cast<unsigned>(e)) % 2 ? v.conjugate().eval() : v;
  }
  const std::size_t nx = xs.size();
  return chunked_complex_sum(nx * nx, [&](std::size_t begin, std::size_t end) {
    std::vector<std::uint64_t> ymask(a12.words()), zx(a13.words()), zmask(a13.words());
    ComplexSum part;
    std::uint64_t visited = 0;
    for (std::size_t idx = begin; idx < end; ++idx) {
      const std::size_t i0 = idx / nx, i1 = idx % nx;
      const Index x0 = xs[i0], x1 = xs[i1];
      and_into(ymask.data(), a12.row(i0), a12.row(i1), a12.words());
      and_into(zx.data(), a13.row(i0), a13.row(i1), a13.words());
      for_each_bit(ymask.data(), ymask.size(), [&](std::size_t j0) {
        const Index y0 = ys[j0];
        const Index s00 = sp.add(x0, y0), s10 = sp.add(x1, y0);
        for_each_bit(ymask.data(), ymask.size(), [&](std::size_t j1) {
          const Index y1 = ys[j1];
          const Index s01 = sp.add(x0, y1), s11 = sp.add(x1, y1);
          and_into(zmask.data(), zx.data(), a23.row(j0), zmask.size());
          and_into(zmask.data(), zmask.data(), a23.row(j1), zmask.size());
          ComplexSum g0, g1;
          for_each_bit(zmask.data(), zmask.size(), [&](std::size_t k) {
            const Index z = zs[k];
            ++visited;
            const Index p00 = sp.add(s00, z), p01 = sp.add(s01, z);
            const Index p10 = sp.add(s10, z), p11 = sp.add(s11, z);
            g0.add(c[0][p00] * c[2][p01] * c[4][p10] * c[6][p11]);
            if (!diagonal) g1.add(c[1][p00] * c[3][p01] * c[5][p10] * c[7][p11]);
          });
          const Complex a = g0.value();
          part.add(diagonal ? Complex(std::norm(a), 0.0) : a * g1.value());
        });
      });
    }
    count_terms(visited + static_cast<std::uint64_t>(end - begin));
    return part.value();
  });
}

double local_u3_scale(const LocalContext3& ctx) {
  double scale = 1.0;
  for (int pair = 0; pair < 3; ++pair) scale *= std::pow(ctx.mu(pair), 4);
  for (int k = 0; k < 3; ++k) {
    const double s = static_cast<double>(ctx.atom(k).size());
    scale /= s * s;
  }
  return scale;
}

}  // namespace

Complex local_u3_inner(const LocalContext3& ctx, const Octuple& f) {
  ctx.require_nondegenerate();
  return local_u3_raw(ctx, f, false) * local_u3_scale(ctx);
}

double local_u3_norm(const LocalContext3& ctx, const GroupFunction& f, double tol) {
  ctx.require_nondegenerate();
  const Complex v = local_u3_raw(ctx, diagonal_octuple(f), true) * local_u3_scale(ctx);
  return diagonal_root(v, 8, tol);
}

DominationResult local_u3_dominates_check(const LinearFactor& linear, const Label& a1, const Label& a2,
                                          const Label& a3, const GroupFunction& f, double tol) {
  const QuadraticFactor factor(linear);
  const LocalContext3 ctx3(factor, DirectionTuple3{a1, a2, a3, {}, {}, {}});
  const LocalContext2 ctx2(linear, DirectionTuple2{add_labels(a1, a2, linear.space().p()), a3});
  DominationResult out;
  out.u3 = local_u3_norm(ctx3, f, tol);
  out.u2 = local_u2_norm(ctx2, f, LocalU2Method::Direct, tol);
  out.margin = out.u3 - out.u2;
  return out;
}

}  // namespace qflab
