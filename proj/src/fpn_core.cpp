#include "qflab/fpn_core.hpp"

#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <tuple>

namespace qflab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::CapExceeded: return "CapExceeded";
    case ErrorKind::DependentBasis: return "DependentBasis";
    case ErrorKind::DependentVectors: return "DependentVectors";
    case ErrorKind::AsymmetricForm: return "AsymmetricForm";
    case ErrorKind::TooManyForms: return "TooManyForms";
    case ErrorKind::EmptyLevelSet: return "EmptyLevelSet";
    case ErrorKind::EmptyAtom: return "EmptyAtom";
    case ErrorKind::NegativeDiagonal: return "NegativeDiagonal";
    case ErrorKind::DegenerateContext: return "DegenerateContext";
    case ErrorKind::UnknownExperiment: return "UnknownExperiment";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Error";
}

namespace {
std::atomic<int> g_threads{1};
}

void set_thread_count(int threads) { g_threads.store(std::max(1, threads)); }
int thread_count() { return g_threads.load(); }

namespace {
std::atomic<std::uint64_t> g_terms{0};
}  // namespace

void count_terms(std::uint64_t terms) { g_terms.fetch_add(terms, std::memory_order_relaxed); }
std::uint64_t terms_counted() { return g_terms.load(); }
void reset_term_counter() { g_terms.store(0); }

long long ipow(long long base, int exp) {
  long long r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

FieldPrime::FieldPrime(int p) : p_(p) {
  const bool allowed = p == 3 || p == 5 || p == 7 || p == 11 || p == 13;
  if (!allowed) {
    throw Error(ErrorKind::InvalidArgument,
                "p must be an odd prime between 3 and 13, got " + std::to_string(p));
  }
}

int FieldPrime::inv(int a) const {
  a = reduce(a);
  if (a == 0) throw Error(ErrorKind::InvalidArgument, "inverse of zero");
  int r = 1;
  for (int e = p_ - 2, b = a; e > 0; e >>= 1) {
    if (e & 1) r = mul(r, b);
    b = mul(b, b);
  }
  return r;
}

GroupVector::GroupVector(int prime, IntVector c) : p(prime), coords(std::move(c)) {
  for (Eigen::Index i = 0; i < coords.size(); ++i) {
    coords[i] = ((coords[i] % p) + p) % p;
  }
}

GroupVector GroupVector::zero(int prime, int n) { return GroupVector(prime, IntVector::Zero(n)); }

GroupVector GroupVector::unit(int prime, int n, int i) {
  IntVector c = IntVector::Zero(n);
  c[i] = 1;
  return GroupVector(prime, c);
}

GroupVector GroupVector::from_index(int prime, int n, Index index) {
  IntVector c(n);
  for (int i = 0; i < n; ++i) {
    c[i] = static_cast<int>(index % prime);
    index /= prime;
  }
  return GroupVector(prime, c);
}

Index GroupVector::index() const {
  Index idx = 0;
  for (int i = n() - 1; i >= 0; --i) idx = idx * p + static_cast<Index>(coords[i]);
  return idx;
}

GroupVector GroupVector::operator+(const GroupVector& other) const {
  return GroupVector(p, coords + other.coords);
}
GroupVector GroupVector::operator-(const GroupVector& other) const {
  return GroupVector(p, coords - other.coords);
}
GroupVector GroupVector::operator-() const { return GroupVector(p, -coords); }
GroupVector GroupVector::scaled(int c) const { return GroupVector(p, coords * c); }
int GroupVector::dot(const GroupVector& other) const {
  long long s = 0;
  for (int i = 0; i < n(); ++i) s += static_cast<long long>(coords[i]) * other.coords[i];
  return static_cast<int>(s % p);
}

namespace detail {

struct SpaceTables {
  FieldPrime field;
  int n;
  Index size;
  std::vector<Index> powers;
  std::vector<std::uint8_t> digits;
  std::vector<std::uint16_t> add_table;

  SpaceTables(int p, int dim) : field(p), n(dim) {
    size = static_cast<Index>(ipow(p, n));
    powers.resize(n + 1);
    powers[0] = 1;
    for (int i = 1; i <= n; ++i) powers[i] = powers[i - 1] * p;
    digits.resize(static_cast<std::size_t>(size) * std::max(n, 1));
    for (Index x = 0; x < size; ++x) {
      Index r = x;
      for (int i = 0; i < n; ++i) {
        digits[static_cast<std::size_t>(x) * n + i] = static_cast<std::uint8_t>(r % p);
        r /= p;
      }
    }
    if (size <= 2187) {
      add_table.resize(static_cast<std::size_t>(size) * size);
      for (Index a = 0; a < size; ++a) {
        for (Index b = 0; b < size; ++b) {
          add_table[static_cast<std::size_t>(a) * size + b] =
              static_cast<std::uint16_t>(slow_add(a, b));
        }
      }
    }
  }

  Index slow_add(Index a, Index b) const {
    const int p = field.value();
    Index r = 0;
    const std::uint8_t* da = &digits[static_cast<std::size_t>(a) * n];
    const std::uint8_t* db = &digits[static_cast<std::size_t>(b) * n];
    for (int i = 0; i < n; ++i) {
      int s = da[i] + db[i];
      if (s >= p) s -= p;
      r += static_cast<Index>(s) * powers[i];
    }
    return r;
  }
};

}  // namespace detail

namespace {

std::shared_ptr<const detail::SpaceTables> cached_tables(int p, int n) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const detail::SpaceTables>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[{p, n}];
  if (!slot) slot = std::make_shared<const detail::SpaceTables>(p, n);
  return slot;
}

}  // namespace

Space::Space(int p, int n, std::uint64_t cap) {
  FieldPrime field(p);
  if (n < 0) throw Error(ErrorKind::InvalidArgument, "negative dimension");
  long double size = 1;
  for (int i = 0; i < n; ++i) size *= p;
  if (size > static_cast<long double>(cap)) {
    throw Error(ErrorKind::CapExceeded, std::to_string(p) + "^" + std::to_string(n) +
                                            " exceeds the enumeration cap " + std::to_string(cap));
  }
  t_ = cached_tables(p, n);
}

int Space::p() const { return t_->field.value(); }
int Space::n() const { return t_->n; }
Index Space::size() const { return t_->size; }
const FieldPrime& Space::field() const { return t_->field; }

int Space::coord(Index x, int i) const { return t_->digits[static_cast<std::size_t>(x) * t_->n + i]; }
const std::uint8_t* Space::digits(Index x) const {
  return &t_->digits[static_cast<std::size_t>(x) * t_->n];
}

Index Space::add(Index a, Index b) const {
  if (!t_->add_table.empty()) return t_->add_table[static_cast<std::size_t>(a) * t_->size + b];
  return t_->slow_add(a, b);
}

Index Space::neg(Index a) const {
  const int p = this->p();
  Index r = 0;
  const std::uint8_t* da = digits(a);
  for (int i = 0; i < n(); ++i) r += static_cast<Index>((p - da[i]) % p) * t_->powers[i];
  return r;
}

Index Space::sub(Index a, Index b) const { return add(a, neg(b)); }

Index Space::scale(int c, Index a) const {
  const int p = this->p();
  c = field().reduce(c);
  Index r = 0;
  const std::uint8_t* da = digits(a);
  for (int i = 0; i < n(); ++i) r += static_cast<Index>((c * da[i]) % p) * t_->powers[i];
  return r;
}

int Space::dot(Index a, Index b) const {
  const std::uint8_t* da = digits(a);
  const std::uint8_t* db = digits(b);
  int s = 0;
  for (int i = 0; i < n(); ++i) s += da[i] * db[i];
  return s % p();
}

GroupVector Space::vector(Index x) const {
  IntVector c(n());
  for (int i = 0; i < n(); ++i) c[i] = coord(x, i);
  GroupVector v;
  v.p = p();
  v.coords = c;
  return v;
}

Index Space::index(const GroupVector& v) const {
  if (v.p != p() || v.n() != n()) {
    throw Error(ErrorKind::InvalidArgument, "vector does not belong to this space");
  }
  return v.index();
}

std::vector<GroupVector> Space::enumerate() const {
  std::vector<GroupVector> out;
  out.reserve(size());
  for (Index x = 0; x < size(); ++x) out.push_back(vector(x));
  return out;
}

std::vector<GroupVector> enumerate_group(int p, int n, std::uint64_t cap) {
  return Space(p, n, cap).enumerate();
}

SymmetricForm::SymmetricForm(int p, const IntMatrix& entries) : p_(p), entries_(entries) {
  FieldPrime field(p);
  if (entries_.rows() != entries_.cols()) {
    throw Error(ErrorKind::AsymmetricForm, "form matrix is not square");
  }
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) entries_(i, j) = field.reduce(entries_(i, j));
  }
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      if (entries_(i, j) != entries_(j, i)) {
        throw Error(ErrorKind::AsymmetricForm, "entry (" + std::to_string(i) + "," +
                                                   std::to_string(j) + ") differs from its transpose");
      }
    }
  }
}

SymmetricForm SymmetricForm::zero(int p, int n) { return SymmetricForm(p, IntMatrix::Zero(n, n)); }
SymmetricForm SymmetricForm::identity(int p, int n) {
  return SymmetricForm(p, IntMatrix::Identity(n, n));
}
SymmetricForm SymmetricForm::diagonal(int p, const std::vector<int>& diag) {
  const int n = static_cast<int>(diag.size());
  IntMatrix m = IntMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = diag[i];
  return SymmetricForm(p, m);
}

int SymmetricForm::quadratic(const GroupVector& x) const { return bilinear(x, x); }

int SymmetricForm::bilinear(const GroupVector& x, const GroupVector& y) const {
  long long s = 0;
  for (int i = 0; i < n(); ++i) {
    if (x.coords[i] == 0) continue;
    long long row = 0;
    for (int j = 0; j < n(); ++j) row += static_cast<long long>(entries_(i, j)) * y.coords[j];
    s += row * x.coords[i];
  }
  return static_cast<int>(s % p_);
}

int SymmetricForm::quadratic(const Space& space, Index x) const { return bilinear(space, x, x); }

int SymmetricForm::bilinear(const Space& space, Index x, Index y) const {
  const std::uint8_t* dx = space.digits(x);
  const std::uint8_t* dy = space.digits(y);
  long long s = 0;
  for (int i = 0; i < n(); ++i) {
    if (dx[i] == 0) continue;
    long long row = 0;
    for (int j = 0; j < n(); ++j) row += entries_(i, j) * dy[j];
    s += row * dx[i];
  }
  return static_cast<int>(s % p_);
}

Index SymmetricForm::apply(const Space& space, Index x) const {
  const std::uint8_t* dx = space.digits(x);
  Index r = 0;
  Index power = 1;
  for (int i = 0; i < n(); ++i) {
    long long row = 0;
    for (int j = 0; j < n(); ++j) row += entries_(i, j) * dx[j];
    r += static_cast<Index>(row % p_) * power;
    power *= p_;
  }
  return r;
}

SymmetricForm SymmetricForm::operator+(const SymmetricForm& other) const {
  return SymmetricForm(p_, entries_ + other.entries_);
}
SymmetricForm SymmetricForm::scaled(int c) const { return SymmetricForm(p_, entries_ * c); }

int matrix_rank(const IntMatrix& input, int p) {
  FieldPrime field(p);
  IntMatrix m = input;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = field.reduce(m(i, j));
  }
  int rank = 0;
  for (Eigen::Index col = 0; col < m.cols() && rank < m.rows(); ++col) {
    Eigen::Index pivot = -1;
    for (Eigen::Index r = rank; r < m.rows(); ++r) {
      if (m(r, col) != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    m.row(pivot).swap(m.row(rank));
    const int inv = field.inv(m(rank, col));
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(rank, j) = field.mul(m(rank, j), inv);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (r == rank || m(r, col) == 0) continue;
      const int factor = m(r, col);
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        m(r, j) = field.sub(m(r, j), field.mul(factor, m(rank, j)));
      }
    }
    ++rank;
  }
  return rank;
}

int matrix_rank(const SymmetricForm& m) { return matrix_rank(m.entries(), m.p()); }

std::vector<GroupVector> kernel_basis(const std::vector<GroupVector>& rows, int p, int n) {
  FieldPrime field(p);
  IntMatrix m(static_cast<Eigen::Index>(rows.size()), n);
  for (std::size_t r = 0; r < rows.size(); ++r) m.row(static_cast<Eigen::Index>(r)) = rows[r].coords.transpose();
  std::vector<int> pivot_col;
  int rank = 0;
  for (int col = 0; col < n && rank < m.rows(); ++col) {
    Eigen::Index pivot = -1;
    for (Eigen::Index r = rank; r < m.rows(); ++r) {
      if (m(r, col) != 0) {
        pivot = r;
        break;
      }
    }
    if (pivot < 0) continue;
    m.row(pivot).swap(m.row(rank));
    const int inv = field.inv(m(rank, col));
    for (int j = 0; j < n; ++j) m(rank, j) = field.mul(m(rank, j), inv);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (r == rank || m(r, col) == 0) continue;
      const int factor = m(r, col);
      for (int j = 0; j < n; ++j) m(r, j) = field.sub(m(r, j), field.mul(factor, m(rank, j)));
    }
    pivot_col.push_back(col);
    ++rank;
  }
  std::vector<bool> is_pivot(n, false);
  for (int c : pivot_col) is_pivot[c] = true;
  std::vector<GroupVector> basis;
  for (int free = 0; free < n; ++free) {
    if (is_pivot[free]) continue;
    IntVector v = IntVector::Zero(n);
    v[free] = 1;
    for (int r = 0; r < rank; ++r) v[pivot_col[r]] = field.neg(m(r, free));
    basis.emplace_back(p, v);
  }
  return basis;
}

SymmetricForm restrict_form(const SymmetricForm& m, const std::vector<GroupVector>& basis) {
  const int k = static_cast<int>(basis.size());
  IntMatrix b(m.n(), k);
  for (int j = 0; j < k; ++j) {
    if (basis[j].n() != m.n() || basis[j].p != m.p()) {
      throw Error(ErrorKind::InvalidArgument, "basis vector dimension mismatch");
    }
    b.col(j) = basis[j].coords;
  }
  if (matrix_rank(b, m.p()) != k) {
    throw Error(ErrorKind::DependentBasis, "basis vectors are linearly dependent");
  }
  const IntMatrix r = b.transpose() * m.entries() * b;
  return SymmetricForm(m.p(), r);
}

CyclotomicValue::CyclotomicValue(int p) : p_(p), coeffs_(Coeffs::Zero(p - 1)) { FieldPrime check(p); }

CyclotomicValue::CyclotomicValue(int p, const Coeffs& coeffs) : p_(p), coeffs_(coeffs) {
  FieldPrime check(p);
  if (coeffs_.size() != p - 1) {
    throw Error(ErrorKind::InvalidArgument, "cyclotomic coefficient vector must have length p-1");
  }
}

CyclotomicValue CyclotomicValue::from_full(int p, const std::vector<long long>& full) {
  Coeffs c(p - 1);
  const long long top = full[p - 1];
  for (int k = 0; k < p - 1; ++k) c[k] = full[k] - top;
  return CyclotomicValue(p, c);
}

CyclotomicValue CyclotomicValue::integer(int p, long long value) {
  std::vector<long long> full(p, 0);
  full[0] = value;
  return from_full(p, full);
}

CyclotomicValue CyclotomicValue::omega_power(int p, long long k) {
  std::vector<long long> full(p, 0);
  full[static_cast<std::size_t>(((k % p) + p) % p)] = 1;
  return from_full(p, full);
}

CyclotomicValue CyclotomicValue::from_exponent_counts(int p, const std::vector<long long>& counts) {
  if (static_cast<int>(counts.size()) != p) {
    throw Error(ErrorKind::InvalidArgument, "exponent count vector must have length p");
  }
  return from_full(p, counts);
}

CyclotomicValue CyclotomicValue::operator+(const CyclotomicValue& o) const {
  return CyclotomicValue(p_, coeffs_ + o.coeffs_);
}
CyclotomicValue CyclotomicValue::operator-(const CyclotomicValue& o) const {
  return CyclotomicValue(p_, coeffs_ - o.coeffs_);
}
CyclotomicValue CyclotomicValue::operator*(long long c) const { return CyclotomicValue(p_, coeffs_ * c); }

CyclotomicValue CyclotomicValue::operator*(const CyclotomicValue& o) const {
  std::vector<long long> full(p_, 0);
  for (int i = 0; i < p_ - 1; ++i) {
    if (coeffs_[i] == 0) continue;
    for (int j = 0; j < p_ - 1; ++j) full[(i + j) % p_] += coeffs_[i] * o.coeffs_[j];
  }
  return from_full(p_, full);
}

CyclotomicValue CyclotomicValue::conj() const {
  std::vector<long long> full(p_, 0);
  for (int k = 0; k < p_ - 1; ++k) full[(p_ - k) % p_] += coeffs_[k];
  return from_full(p_, full);
}

CyclotomicValue CyclotomicValue::abs2_exact() const { return *this * conj(); }

bool CyclotomicValue::is_integer() const {
  for (int k = 1; k < p_ - 1; ++k) {
    if (coeffs_[k] != 0) return false;
  }
  return true;
}

long long CyclotomicValue::integer_value() const {
  if (!is_integer()) throw Error(ErrorKind::InvalidArgument, "cyclotomic value is not an integer");
  return coeffs_[0];
}

Complex omega(int p, long long k) {
  const long long r = ((k % p) + p) % p;
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / p;
  return {std::cos(angle), std::sin(angle)};
}

Complex CyclotomicValue::to_complex() const {
  ComplexSum s;
  for (int k = 0; k < p_ - 1; ++k) s.add(omega(p_, k) * static_cast<double>(coeffs_[k]));
  return s.value();
}

std::string CyclotomicValue::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (int k = 0; k < p_ - 1; ++k) {
    if (coeffs_[k] == 0) continue;
    if (!first) os << " + ";
    os << coeffs_[k];
    if (k > 0) os << "*w^" << k;
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

namespace {

/// Reduces w-exponent tallies into a normalized complex expectation.
Complex normalized(const CyclotomicValue& v, long long denominator) {
  return v.to_complex() / static_cast<double>(denominator);
}

}  // namespace

CyclotomicValue linear_char_sum_exact(const GroupVector& r) {
  const Space space(r.p, r.n());
  const Index rx = space.index(r);
  std::vector<long long> counts(r.p, 0);
  for (Index y = 0; y < space.size(); ++y) ++counts[space.dot(rx, y)];
  count_terms(space.size());
  return CyclotomicValue::from_exponent_counts(r.p, counts);
}

Complex linear_char_sum(const GroupVector& r) {
  return normalized(linear_char_sum_exact(r), ipow(r.p, r.n()));
}

Complex multi_char_sum(int p, const std::vector<int>& residues) {
  IntVector c(static_cast<Eigen::Index>(residues.size()));
  for (std::size_t i = 0; i < residues.size(); ++i) c[static_cast<Eigen::Index>(i)] = residues[i];
  return linear_char_sum(GroupVector(p, c));
}

CyclotomicValue quad_char_sum_exact(const SymmetricForm& m, const GroupVector& b) {
  const Space space(m.p(), m.n());
  const Index bi = space.index(b);
  std::vector<long long> counts(m.p(), 0);
  for (Index x = 0; x < space.size(); ++x) {
    ++counts[(m.quadratic(space, x) + space.dot(bi, x)) % m.p()];
  }
  count_terms(space.size());
  return CyclotomicValue::from_exponent_counts(m.p(), counts);
}

Complex quad_char_sum(const SymmetricForm& m, const GroupVector& b) {
  return normalized(quad_char_sum_exact(m, b), ipow(m.p(), m.n()));
}

CyclotomicValue bilinear_char_sum_exact(const SymmetricForm& m, const GroupVector& c,
                                        const GroupVector& d) {
  const Space space(m.p(), m.n());
  const Index ci = space.index(c);
  const Index neg_d = space.neg(space.index(d));
  std::vector<long long> counts(m.p(), 0);
  for (Index x = 0; x < space.size(); ++x) {
    if (m.apply(space, x) == neg_d) ++counts[space.dot(ci, x)];
  }
  count_terms(space.size());
  return CyclotomicValue::from_exponent_counts(m.p(), counts) * static_cast<long long>(space.size());
}

Complex bilinear_char_sum(const SymmetricForm& m, const GroupVector& c, const GroupVector& d) {
  const long long size = ipow(m.p(), m.n());
  return normalized(bilinear_char_sum_exact(m, c, d), size * size);
}

}  // namespace qflab
