#include "qflab/spectral.hpp"

#include <bit>
#include <cmath>

namespace qflab {

GroupFunction indicator(const SubsetBitmask& set) {
  GroupFunction::Values v = GroupFunction::Values::Zero(set.universe());
  for (Index x : set.elements()) v[x] = 1.0;
  return GroupFunction(set.space(), v);
}

CountingFunction counting_indicator(const SubsetBitmask& set) {
  CountingFunction::Values v = CountingFunction::Values::Zero(set.universe());
  for (Index x : set.elements()) v[x] = 1;
  return CountingFunction(set.space(), v);
}

GroupFunction balanced(const SubsetBitmask& set, double alpha) {
  GroupFunction::Values v = GroupFunction::Values::Constant(set.universe(), -alpha);
  for (Index x : set.elements()) v[x] = 1.0 - alpha;
  return GroupFunction(set.space(), v);
}

GroupFunction quadratic_phase(const SymmetricForm& m, const GroupVector& r) {
  const Space space(m.p(), m.n());
  const Index ri = space.index(r);
  GroupFunction::Values v(space.size());
  for (Index x = 0; x < space.size(); ++x) v[x] = omega(m.p(), m.quadratic(space, x) + space.dot(x, ri));
  return GroupFunction(space, v);
}

GroupFunction quadratic_phase(const SymmetricForm& m) {
  return quadratic_phase(m, GroupVector::zero(m.p(), m.n()));
}

GroupFunction character(const Space& space, const GroupVector& t) {
  const Index ti = space.index(t);
  GroupFunction::Values v(space.size());
  for (Index x = 0; x < space.size(); ++x) v[x] = omega(space.p(), space.dot(x, ti));
  return GroupFunction(space, v);
}

GroupFunction conj(const GroupFunction& f) { return GroupFunction(f.space(), f.values().conjugate()); }

GroupFunction to_complex(const CountingFunction& f) {
  return GroupFunction(f.space(), f.values().cast<double>().cast<Complex>());
}

Complex mean(const GroupFunction& f) {
  ComplexSum s;
  for (Index x = 0; x < f.size(); ++x) s.add(f(x));
  return s.value() / static_cast<double>(f.size());
}

double l2_norm(const GroupFunction& f) {
  CompensatedSum s;
  for (Index x = 0; x < f.size(); ++x) s.add(std::norm(f(x)));
  return std::sqrt(s.value() / static_cast<double>(f.size()));
}

double linf_norm(const GroupFunction& f) {
  double m = 0.0;
  for (Index x = 0; x < f.size(); ++x) m = std::max(m, std::abs(f(x)));
  return m;
}

bool one_bounded(const GroupFunction& f) { return linf_norm(f) <= 1.0 + 1e-12; }

double SpectrumTable::power_sum(int k) const {
  CompensatedSum s;
  for (Eigen::Index t = 0; t < values.size(); ++t) s.add(std::pow(std::abs(values[t]), k));
  return s.value();
}

double SpectrumTable::sup_norm() const {
  double m = 0.0;
  for (Eigen::Index t = 0; t < values.size(); ++t) m = std::max(m, std::abs(values[t]));
  return m;
}

namespace {

std::vector<Complex> omega_table(int p) {
  std::vector<Complex> w(static_cast<std::size_t>(p));
  for (int k = 0; k < p; ++k) w[static_cast<std::size_t>(k)] = omega(p, k);
  return w;
}

/// Length-p DFT along every coordinate; sign -1 is the normalized forward transform.
Eigen::VectorXcd dimensionwise_dft(const Space& space, Eigen::VectorXcd v, int sign) {
  const int p = space.p();
  const auto w = omega_table(p);
  const double scale = sign < 0 ? 1.0 / p : 1.0;
  std::vector<Complex> in(static_cast<std::size_t>(p)), out(static_cast<std::size_t>(p));
  Index stride = 1;
  for (int dim = 0; dim < space.n(); ++dim) {
    const Index block = stride * static_cast<Index>(p);
    for (Index base = 0; base < space.size(); base += block) {
      for (Index off = 0; off < stride; ++off) {
        for (int k = 0; k < p; ++k) in[static_cast<std::size_t>(k)] = v[base + off + static_cast<Index>(k) * stride];
        for (int t = 0; t < p; ++t) {
          ComplexSum s;
          for (int k = 0; k < p; ++k) {
            const int e = ((sign * k * t) % p + p) % p;
            s.add(in[static_cast<std::size_t>(k)] * w[static_cast<std::size_t>(e)]);
          }
          out[static_cast<std::size_t>(t)] = s.value() * scale;
        }
        for (int t = 0; t < p; ++t) v[base + off + static_cast<Index>(t) * stride] = out[static_cast<std::size_t>(t)];
      }
    }
    stride = block;
  }
  count_terms(static_cast<std::uint64_t>(space.n()) * space.size() * static_cast<std::uint64_t>(p));
  return v;
}

Eigen::VectorXcd naive_dft(const Space& space, const Eigen::VectorXcd& v, int sign) {
  const int p = space.p();
  const auto w = omega_table(p);
  const double scale = sign < 0 ? 1.0 / static_cast<double>(space.size()) : 1.0;
  Eigen::VectorXcd out(space.size());
  for (Index t = 0; t < space.size(); ++t) {
    ComplexSum s;
    for (Index x = 0; x < space.size(); ++x) {
      const int e = ((sign * space.dot(x, t)) % p + p) % p;
      s.add(v[x] * w[static_cast<std::size_t>(e)]);
    }
    out[t] = s.value() * scale;
  }
  count_terms(static_cast<std::uint64_t>(space.size()) * space.size());
  return out;
}

}  // namespace

SpectrumTable fourier_transform(const GroupFunction& f, FourierMethod method) {
  Eigen::VectorXcd v = f.values();
  if (method == FourierMethod::Naive) return {f.space(), naive_dft(f.space(), v, -1)};
  return {f.space(), dimensionwise_dft(f.space(), std::move(v), -1)};
}

GroupFunction inverse_transform(const SpectrumTable& spectrum, FourierMethod method) {
  if (method == FourierMethod::Naive) return GroupFunction(spectrum.space, naive_dft(spectrum.space, spectrum.values, 1));
  return GroupFunction(spectrum.space, dimensionwise_dft(spectrum.space, spectrum.values, 1));
}

double diagonal_root(const Complex& value, int root, double tol) {
  double re = value.real();
  if (re < -tol) {
    throw Error(ErrorKind::NegativeDiagonal,
                "diagonal inner product " + std::to_string(re) + " is below -tolerance");
  }
  if (re < 0.0) re = 0.0;
  return std::pow(re, 1.0 / root);
}

namespace {

void check_same_space(const GroupFunction& a, const GroupFunction& b) {
  if (a.space() != b.space()) throw Error(ErrorKind::InvalidArgument, "functions live on different spaces");
}

/// E_w a(w) b(w + h) for all h.
std::vector<Complex> shifted_correlation(const GroupFunction& a, const GroupFunction& b) {
  const Space& sp = a.space();
  std::vector<Complex> out(sp.size());
  for (Index h = 0; h < sp.size(); ++h) {
    ComplexSum s;
    for (Index w = 0; w < sp.size(); ++w) s.add(a(w) * b(sp.add(w, h)));
    out[h] = s.value() / static_cast<double>(sp.size());
  }
  count_terms(static_cast<std::uint64_t>(sp.size()) * sp.size());
  return out;
}

}  // namespace

Complex u2_inner(const GroupFunction& f00, const GroupFunction& f01, const GroupFunction& f10,
                 const GroupFunction& f11, GowersMethod method) {
  check_same_space(f00, f01);
  check_same_space(f00, f10);
  check_same_space(f00, f11);
  if (method == GowersMethod::Fourier) {
    const auto s00 = fourier_transform(f00);
    const auto s01 = fourier_transform(f01);
    const auto s10 = fourier_transform(f10);
    const auto s11 = fourier_transform(f11);
    ComplexSum s;
    for (Index t = 0; t < f00.size(); ++t) {
      s.add(s00(t) * std::conj(s01(t)) * std::conj(s10(t)) * s11(t));
    }
    return s.value();
  }
  const auto a = shifted_correlation(f00, conj(f10));
  const auto b = shifted_correlation(conj(f01), f11);
  ComplexSum s;
  for (Index h = 0; h < f00.size(); ++h) s.add(a[h] * b[h]);
  return s.value() / static_cast<double>(f00.size());
}

double u2_norm(const GroupFunction& f, GowersMethod method, double tol) {
  return diagonal_root(u2_inner(f, f, f, f, method), 4, tol);
}

Octuple diagonal_octuple(const GroupFunction& f) { return {f, f, f, f, f, f, f, f}; }

Complex u3_inner(const Octuple& f, GowersMethod method) {
  for (const auto& g : f) check_same_space(f[0], g);
  const Space& sp = f[0].space();
  const Index size = sp.size();
  if (method == GowersMethod::Fourier) {
    ComplexSum total;
    for (Index h3 = 0; h3 < size; ++h3) {
      std::array<GroupFunction::Values, 4> g;
      for (int e = 0; e < 4; ++e) {
        g[static_cast<std::size_t>(e)].resize(size);
        const auto& lower = f[static_cast<std::size_t>(2 * e)];
        const auto& upper = f[static_cast<std::size_t>(2 * e + 1)];
        for (Index y = 0; y < size; ++y) {
          g[static_cast<std::size_t>(e)][y] = lower(y) * std::conj(upper(sp.add(y, h3)));
        }
      }
      total.add(u2_inner(GroupFunction(sp, g[0]), GroupFunction(sp, g[1]), GroupFunction(sp, g[2]),
                         GroupFunction(sp, g[3]), GowersMethod::Fourier));
    }
    return total.value() / static_cast<double>(size);
  }
  // Conjugated copies so that slot e carries C^{|e|} f_e.
  std::array<GroupFunction::Values, 8> c;
  for (int e = 0; e < 8; ++e) {
    const int weight = std::popcount(static_cast<unsigned>(e));
    c[static_cast<std::size_t>(e)] =
        weight % 2 ? f[static_cast<std::size_t>(e)].values().conjugate().eval() : f[static_cast<std::size_t>(e)].values();
  }
  const std::size_t pairs = static_cast<std::size_t>(size) * size;
  const Complex total = chunked_complex_sum(pairs, [&](std::size_t begin, std::size_t end) {
    ComplexSum part;
    for (std::size_t idx = begin; idx < end; ++idx) {
      const Index h1 = static_cast<Index>(idx / size);
      const Index h2 = static_cast<Index>(idx % size);
      const Index h12 = sp.add(h1, h2);
      ComplexSum g0, g1;
      for (Index x = 0; x < size; ++x) {
        const Index x1 = sp.add(x, h1);
        const Index x2 = sp.add(x, h2);
        const Index x12 = sp.add(x, h12);
        g0.add(c[0][x] * c[2][x2] * c[4][x1] * c[6][x12]);
        g1.add(c[1][x] * c[3][x2] * c[5][x1] * c[7][x12]);
      }
      part.add(g0.value() * g1.value());
    }
    count_terms(static_cast<std::uint64_t>(end - begin) * size);
    return part.value();
  });
  const double s = static_cast<double>(size);
  return total / (s * s * s * s);
}

double u3_norm(const GroupFunction& f, GowersMethod method, double tol) {
  return diagonal_root(u3_inner(diagonal_octuple(f), method), 8, tol);
}

double u3_inductive_eighth_power(const GroupFunction& f) {
  const Space& sp = f.space();
  CompensatedSum total;
  GroupFunction::Values d(sp.size());
  for (Index h = 0; h < sp.size(); ++h) {
    for (Index x = 0; x < sp.size(); ++x) d[x] = f(x) * std::conj(f(sp.add(x, h)));
    total.add(fourier_transform(GroupFunction(sp, d)).power_sum(4));
  }
  return total.value() / static_cast<double>(sp.size());
}

Complex ap3_average(const GroupFunction& f) {
  const Space& sp = f.space();
  ComplexSum s;
  for (Index x = 0; x < sp.size(); ++x) {
    for (Index d = 0; d < sp.size(); ++d) {
      const Index x1 = sp.add(x, d);
      s.add(f(x) * f(x1) * f(sp.add(x1, d)));
    }
  }
  count_terms(static_cast<std::uint64_t>(sp.size()) * sp.size());
  const double n = static_cast<double>(sp.size());
  return s.value() / (n * n);
}

Complex ap4_average(const GroupFunction& f) {
  const Space& sp = f.space();
  ComplexSum s;
  for (Index x = 0; x < sp.size(); ++x) {
    for (Index d = 0; d < sp.size(); ++d) {
      const Index x1 = sp.add(x, d);
      const Index x2 = sp.add(x1, d);
      s.add(f(x) * f(x1) * f(x2) * f(sp.add(x2, d)));
    }
  }
  count_terms(static_cast<std::uint64_t>(sp.size()) * sp.size());
  const double n = static_cast<double>(sp.size());
  return s.value() / (n * n);
}

QuadraticCorrelation max_quadratic_correlation(const GroupFunction& f, const CorrelationOptions& options) {
  const Space& sp = f.space();
  const int p = sp.p();
  const int n = sp.n();
  std::vector<std::pair<int, int>> slots;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) slots.emplace_back(i, j);
  }
  const int linear_slots = options.joint_linear ? n : 0;
  const int total_slots = static_cast<int>(slots.size()) + linear_slots;
  long double candidates = 1;
  for (int k = 0; k < total_slots; ++k) candidates *= p;
  if (candidates > static_cast<long double>(options.cap)) {
    throw Error(ErrorKind::CapExceeded, "quadratic correlation search needs " +
                                            std::to_string(static_cast<double>(candidates)) +
                                            " candidates, above the cap " + std::to_string(options.cap));
  }
  // Per-point contribution of each slot, so that q(x) = sum_k e_k mono[x][k] mod p.
  std::vector<std::vector<int>> mono(sp.size(), std::vector<int>(static_cast<std::size_t>(total_slots)));
  for (Index x = 0; x < sp.size(); ++x) {
    for (std::size_t k = 0; k < slots.size(); ++k) {
      const auto [i, j] = slots[k];
      const int v = sp.coord(x, i) * sp.coord(x, j);
      mono[x][k] = (i == j ? v : 2 * v) % p;
    }
    for (int i = 0; i < linear_slots; ++i) mono[x][slots.size() + static_cast<std::size_t>(i)] = sp.coord(x, i);
  }
  const auto w = omega_table(p);
  std::vector<int> e(static_cast<std::size_t>(total_slots), 0);
  std::vector<int> best_e = e;
  double best = -1.0;
  const auto count = static_cast<std::uint64_t>(candidates);
  std::vector<ComplexSum> buckets(static_cast<std::size_t>(p));
  for (std::uint64_t c = 0; c < count; ++c) {
    for (auto& b : buckets) b = ComplexSum{};
    for (Index x = 0; x < sp.size(); ++x) {
      int q = 0;
      for (int k = 0; k < total_slots; ++k) q += e[static_cast<std::size_t>(k)] * mono[x][static_cast<std::size_t>(k)];
      buckets[static_cast<std::size_t>(q % p)].add(f(x));
    }
    ComplexSum s;
    for (int r = 0; r < p; ++r) s.add(buckets[static_cast<std::size_t>(r)].value() * w[static_cast<std::size_t>(r)]);
    const double value = std::abs(s.value()) / static_cast<double>(sp.size());
    if (value > best + 1e-12) {
      best = value;
      best_e = e;
    }
    count_terms(sp.size());
    for (int k = total_slots - 1; k >= 0; --k) {
      if (++e[static_cast<std::size_t>(k)] < p) break;
      e[static_cast<std::size_t>(k)] = 0;
    }
  }
  IntMatrix m = IntMatrix::Zero(n, n);
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const auto [i, j] = slots[k];
    m(i, j) = best_e[k];
    m(j, i) = best_e[k];
  }
  QuadraticCorrelation out{SymmetricForm(p, m), std::nullopt, best, count};
  if (options.joint_linear) {
    IntVector r(n);
    for (int i = 0; i < n; ++i) r[i] = best_e[slots.size() + static_cast<std::size_t>(i)];
    out.r = GroupVector(p, r);
  }
  return out;
}

}  // namespace qflab
