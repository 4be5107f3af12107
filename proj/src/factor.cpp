#include "qflab/factor.hpp"

#include <limits>

namespace qflab {

std::uint32_t encode_label(const Label& label, int p) {
  std::uint32_t code = 0;
  for (auto it = label.rbegin(); it != label.rend(); ++it) {
    code = code * static_cast<std::uint32_t>(p) + static_cast<std::uint32_t>(((*it % p) + p) % p);
  }
  return code;
}

Label decode_label(std::uint32_t code, int p, int length) {
  Label out(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) {
    out[static_cast<std::size_t>(i)] = static_cast<int>(code % static_cast<std::uint32_t>(p));
    code /= static_cast<std::uint32_t>(p);
  }
  return out;
}

Label add_labels(const Label& a, const Label& b, int p) {
  if (a.size() != b.size()) throw Error(ErrorKind::InvalidArgument, "label lengths differ");
  Label out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = ((a[i] + b[i]) % p + p) % p;
  return out;
}

LinearFactor::LinearFactor(const Space& space, std::vector<GroupVector> vectors)
    : space_(space), vectors_(std::move(vectors)) {
  IntMatrix m(static_cast<Eigen::Index>(vectors_.size()), space_.n());
  for (std::size_t i = 0; i < vectors_.size(); ++i) {
    if (vectors_[i].p != space_.p() || vectors_[i].n() != space_.n()) {
      throw Error(ErrorKind::InvalidArgument, "linear factor vector does not lie in the space");
    }
    m.row(static_cast<Eigen::Index>(i)) = vectors_[i].coords.transpose();
    vector_index_.push_back(vectors_[i].index());
  }
  if (!vectors_.empty() && matrix_rank(m, space_.p()) != static_cast<int>(vectors_.size())) {
    throw Error(ErrorKind::DependentVectors, "linear factor vectors are linearly dependent");
  }
}

Label LinearFactor::label_of(Index x) const {
  Label out(vectors_.size());
  for (std::size_t i = 0; i < vectors_.size(); ++i) out[i] = space_.dot(x, vector_index_[i]);
  return out;
}

LinearFactor new_linear_factor(const Space& space, std::vector<GroupVector> vectors) {
  return LinearFactor(space, std::move(vectors));
}

double BilinearLevelSet::weight() const {
  if (size == 0) throw Error(ErrorKind::EmptyLevelSet, "characteristic measure of an empty level set");
  return static_cast<double>(universe) / static_cast<double>(size);
}

namespace {

int factor_rank(const std::vector<SymmetricForm>& forms, int p, int n) {
  if (forms.empty()) return n + 1;
  const int q = static_cast<int>(forms.size());
  const auto combos = static_cast<std::uint32_t>(ipow(p, q));
  int best = std::numeric_limits<int>::max();
  for (std::uint32_t code = 1; code < combos; ++code) {
    const Label lambda = decode_label(code, p, q);
    IntMatrix sum = IntMatrix::Zero(n, n);
    for (int j = 0; j < q; ++j) sum += forms[static_cast<std::size_t>(j)].entries() * lambda[static_cast<std::size_t>(j)];
    best = std::min(best, matrix_rank(sum, p));
  }
  return best;
}

}  // namespace

QuadraticFactor::QuadraticFactor(LinearFactor linear, std::vector<SymmetricForm> forms)
    : linear_(std::move(linear)), forms_(std::move(forms)) {
  if (static_cast<int>(forms_.size()) > kMaxForms) {
    throw Error(ErrorKind::TooManyForms, "at most 6 quadratic forms are supported");
  }
  const Space& sp = linear_.space();
  for (const auto& f : forms_) {
    if (f.p() != sp.p() || f.n() != sp.n()) {
      throw Error(ErrorKind::InvalidArgument, "quadratic form dimension differs from the space");
    }
  }
  rank_ = factor_rank(forms_, sp.p(), sp.n());
  num_labels_ = static_cast<std::uint32_t>(ipow(sp.p(), label_length()));
  codes_.resize(sp.size());
  members_.assign(num_labels_, {});
  applied_.resize(forms_.size());
  for (std::size_t j = 0; j < forms_.size(); ++j) {
    applied_[j].resize(sp.size());
    for (Index x = 0; x < sp.size(); ++x) applied_[j][x] = forms_[j].apply(sp, x);
  }
  const int p = sp.p();
  std::vector<Index> linear_index;
  for (const auto& v : linear_.vectors()) linear_index.push_back(v.index());
  for (Index x = 0; x < sp.size(); ++x) {
    std::uint32_t code = 0;
    std::uint32_t scale = 1;
    for (Index r : linear_index) {
      code += scale * static_cast<std::uint32_t>(sp.dot(x, r));
      scale *= static_cast<std::uint32_t>(p);
    }
    for (std::size_t j = 0; j < forms_.size(); ++j) {
      code += scale * static_cast<std::uint32_t>(sp.dot(x, applied_[j][x]));
      scale *= static_cast<std::uint32_t>(p);
    }
    codes_[x] = code;
    members_[code].push_back(x);
  }
  count_terms(static_cast<std::uint64_t>(sp.size()) * (1 + forms_.size()));
}

std::uint32_t QuadraticFactor::encode(const Label& label) const {
  if (static_cast<int>(label.size()) != label_length()) {
    throw Error(ErrorKind::InvalidArgument, "atom label has length " + std::to_string(label.size()) +
                                                ", expected " + std::to_string(label_length()));
  }
  return encode_label(label, p());
}

Label QuadraticFactor::bilinear_label(Index x, Index y) const {
  Label out(forms_.size());
  for (std::size_t j = 0; j < forms_.size(); ++j) out[j] = space().dot(applied_[j][x], y);
  return out;
}

bool QuadraticFactor::in_level_set(Index x, Index y, const Label& b) const {
  for (std::size_t j = 0; j < forms_.size(); ++j) {
    if (space().dot(applied_[j][x], y) != b[j]) return false;
  }
  return true;
}

BilinearLevelSet QuadraticFactor::level_set(const Label& b) const {
  if (static_cast<int>(b.size()) != q()) {
    throw Error(ErrorKind::InvalidArgument, "bilinear label length differs from q");
  }
  const Space& sp = space();
  const int n = sp.n();
  const FieldPrime& field = sp.field();
  BilinearLevelSet out;
  out.b = b;
  out.universe = static_cast<std::uint64_t>(sp.size()) * sp.size();
  IntMatrix aug(q(), n + 1);
  for (Index x = 0; x < sp.size(); ++x) {
    for (int j = 0; j < q(); ++j) {
      const std::uint8_t* d = sp.digits(applied_[static_cast<std::size_t>(j)][x]);
      for (int k = 0; k < n; ++k) aug(j, k) = d[k];
      aug(j, n) = field.reduce(b[static_cast<std::size_t>(j)]);
    }
    const int r = matrix_rank(aug.leftCols(n), p());
    const int ra = matrix_rank(aug, p());
    if (r == ra) out.size += static_cast<std::uint64_t>(ipow(p(), n - r));
  }
  count_terms(sp.size());
  return out;
}

QuadraticFactor new_quadratic_factor(LinearFactor linear, std::vector<SymmetricForm> forms) {
  return QuadraticFactor(std::move(linear), std::move(forms));
}

Label atom_of(const QuadraticFactor& b, const GroupVector& x) { return b.label_of(b.space().index(x)); }

std::vector<GroupVector> atom_members(const QuadraticFactor& b, const Label& label) {
  std::vector<GroupVector> out;
  for (Index x : b.members(label)) out.push_back(b.space().vector(x));
  return out;
}

std::size_t atom_size(const QuadraticFactor& b, const Label& label) { return b.members(label).size(); }

BilinearLevelSet bilinear_level_set(const QuadraticFactor& b, const Label& blabel) {
  if (b.q() == 0) throw Error(ErrorKind::InvalidArgument, "bilinear level sets need q >= 1");
  return b.level_set(blabel);
}

GroupFunction project_onto_factor(const GroupFunction& f, const QuadraticFactor& b) {
  if (f.space() != b.space()) throw Error(ErrorKind::InvalidArgument, "function and factor spaces differ");
  GroupFunction::Values out(f.size());
  for (std::uint32_t code = 0; code < b.num_labels(); ++code) {
    const auto& mem = b.members(code);
    if (mem.empty()) continue;
    ComplexSum s;
    for (Index x : mem) s.add(f(x));
    const Complex avg = s.value() / static_cast<double>(mem.size());
    for (Index x : mem) out[x] = avg;
  }
  return GroupFunction(f.space(), out);
}

bool refines(const QuadraticFactor& finer, const QuadraticFactor& coarser) {
  if (finer.space() != coarser.space()) throw Error(ErrorKind::InvalidArgument, "factor spaces differ");
  for (std::uint32_t code = 0; code < finer.num_labels(); ++code) {
    const auto& mem = finer.members(code);
    if (mem.empty()) continue;
    const std::uint32_t target = coarser.label_code(mem.front());
    for (Index x : mem) {
      if (coarser.label_code(x) != target) return false;
    }
  }
  return true;
}

Label sigma2(const DirectionTuple2& d, int p) { return add_labels(d.a1, d.a2, p); }

Label sigma3(const DirectionTuple3& d, int ell, int p) {
  Label out = add_labels(add_labels(d.a1, d.a2, p), d.a3, p);
  const std::size_t q = d.b12.size();
  if (d.b13.size() != q || d.b23.size() != q || out.size() != static_cast<std::size_t>(ell) + q) {
    throw Error(ErrorKind::InvalidArgument, "direction tuple component lengths are inconsistent");
  }
  for (std::size_t j = 0; j < q; ++j) {
    const int extra = 2 * (d.b12[j] + d.b13[j] + d.b23[j]);
    out[static_cast<std::size_t>(ell) + j] = ((out[static_cast<std::size_t>(ell) + j] + extra) % p + p) % p;
  }
  return out;
}

}  // namespace qflab
