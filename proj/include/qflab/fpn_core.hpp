#pragma once

#include <Eigen/Core>
#include <complex>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qflab/errors.hpp"
#include "qflab/numeric.hpp"

namespace qflab {

using Index = std::uint32_t;
using IntVector = Eigen::VectorXi;
using IntMatrix = Eigen::MatrixXi;

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 20;

/// An odd prime 3 <= p <= 13.
class FieldPrime {
 public:
  explicit FieldPrime(int p);

  int value() const { return p_; }
  operator int() const { return p_; }

  int reduce(long long x) const {
    const long long r = x % p_;
    return static_cast<int>(r < 0 ? r + p_ : r);
  }
  int add(int a, int b) const { return reduce(a + b); }
  int sub(int a, int b) const { return reduce(a - b); }
  int mul(int a, int b) const { return reduce(static_cast<long long>(a) * b); }
  int neg(int a) const { return reduce(-a); }
  int inv(int a) const;

 private:
  int p_;
};

/// An element of F_p^n.
struct GroupVector {
  int p = 3;
  IntVector coords;

  GroupVector() = default;
  GroupVector(int prime, IntVector c);
  static GroupVector zero(int prime, int n);
  static GroupVector unit(int prime, int n, int i);
  static GroupVector from_index(int prime, int n, Index index);

  int n() const { return static_cast<int>(coords.size()); }
  Index index() const;
  bool is_zero() const { return (coords.array() == 0).all(); }

  GroupVector operator+(const GroupVector& other) const;
  GroupVector operator-(const GroupVector& other) const;
  GroupVector operator-() const;
  GroupVector scaled(int c) const;
  int dot(const GroupVector& other) const;
  bool operator==(const GroupVector& other) const {
    return p == other.p && coords == other.coords;
  }
  bool operator!=(const GroupVector& other) const { return !(*this == other); }
};

namespace detail {
struct SpaceTables;
}

/// The group F_p^n with canonical little-endian indexing and cached digit tables.
class Space {
 public:
  Space(int p, int n, std::uint64_t cap = kDefaultEnumerationCap);

  int p() const;
  int n() const;
  Index size() const;
  const FieldPrime& field() const;

  int coord(Index x, int i) const;
  const std::uint8_t* digits(Index x) const;
  Index add(Index a, Index b) const;
  Index sub(Index a, Index b) const;
  Index neg(Index a) const;
  Index scale(int c, Index a) const;
  int dot(Index a, Index b) const;

  GroupVector vector(Index x) const;
  Index index(const GroupVector& v) const;
  std::vector<GroupVector> enumerate() const;

  bool operator==(const Space& other) const { return p() == other.p() && n() == other.n(); }
  bool operator!=(const Space& other) const { return !(*this == other); }

 private:
  std::shared_ptr<const detail::SpaceTables> t_;
};

/// All p^n vectors in canonical-index order.
std::vector<GroupVector> enumerate_group(int p, int n, std::uint64_t cap = kDefaultEnumerationCap);

/// Symmetric n x n matrix over F_p.
class SymmetricForm {
 public:
  SymmetricForm(int p, const IntMatrix& entries);
  static SymmetricForm zero(int p, int n);
  static SymmetricForm identity(int p, int n);
  static SymmetricForm diagonal(int p, const std::vector<int>& diag);

  int p() const { return p_; }
  int n() const { return static_cast<int>(entries_.rows()); }
  const IntMatrix& entries() const { return entries_; }
  int operator()(int i, int j) const { return entries_(i, j); }

  int quadratic(const GroupVector& x) const;
  int bilinear(const GroupVector& x, const GroupVector& y) const;
  int quadratic(const Space& space, Index x) const;
  int bilinear(const Space& space, Index x, Index y) const;
  /// Index of the vector M x.
  Index apply(const Space& space, Index x) const;

  SymmetricForm operator+(const SymmetricForm& other) const;
  SymmetricForm scaled(int c) const;
  bool operator==(const SymmetricForm& other) const {
    return p_ == other.p_ && entries_ == other.entries_;
  }

 private:
  int p_;
  IntMatrix entries_;
};

/// Rank over F_p by row reduction.
int matrix_rank(const IntMatrix& m, int p);
int matrix_rank(const SymmetricForm& m);

/// Basis of the kernel {x : R x = 0} where the rows of R are given vectors.
std::vector<GroupVector> kernel_basis(const std::vector<GroupVector>& rows, int p, int n);

/// B^T M B for the basis matrix B of a subspace.
SymmetricForm restrict_form(const SymmetricForm& m, const std::vector<GroupVector>& basis);

/// Element of Z[w], w a primitive p-th root of unity, in the basis 1, w, ..., w^{p-2}.
class CyclotomicValue {
 public:
  using Coeffs = Eigen::Matrix<long long, Eigen::Dynamic, 1>;

  explicit CyclotomicValue(int p);
  CyclotomicValue(int p, const Coeffs& coeffs);
  static CyclotomicValue integer(int p, long long value);
  static CyclotomicValue omega_power(int p, long long k);
  /// sum_k counts[k] w^k for a length-p vector of counts.
  static CyclotomicValue from_exponent_counts(int p, const std::vector<long long>& counts);

  int p() const { return p_; }
  const Coeffs& coeffs() const { return coeffs_; }

  CyclotomicValue operator+(const CyclotomicValue& o) const;
  CyclotomicValue operator-(const CyclotomicValue& o) const;
  CyclotomicValue operator*(const CyclotomicValue& o) const;
  CyclotomicValue operator*(long long c) const;
  CyclotomicValue conj() const;
  /// v * conj(v), exactly; an element of the real subfield.
  CyclotomicValue abs2_exact() const;
  bool operator==(const CyclotomicValue& o) const { return p_ == o.p_ && coeffs_ == o.coeffs_; }
  bool operator!=(const CyclotomicValue& o) const { return !(*this == o); }

  bool is_zero() const { return (coeffs_.array() == 0).all(); }
  bool is_integer() const;
  long long integer_value() const;
  Complex to_complex() const;
  std::string to_string() const;

 private:
  static CyclotomicValue from_full(int p, const std::vector<long long>& full);

  int p_;
  Coeffs coeffs_;
};

/// w^k as a complex number.
Complex omega(int p, long long k);

/// Exact sum over y in F_p^n of w^{r.y}; the normalized value is this divided by p^n.
CyclotomicValue linear_char_sum_exact(const GroupVector& r);
Complex linear_char_sum(const GroupVector& r);
/// E_{w in F_p^t} w^{sum_i c_i w_i} for residues c_1..c_t.
Complex multi_char_sum(int p, const std::vector<int>& residues);

CyclotomicValue quad_char_sum_exact(const SymmetricForm& m, const GroupVector& b);
Complex quad_char_sum(const SymmetricForm& m, const GroupVector& b);

CyclotomicValue bilinear_char_sum_exact(const SymmetricForm& m, const GroupVector& c,
                                        const GroupVector& d);
Complex bilinear_char_sum(const SymmetricForm& m, const GroupVector& c, const GroupVector& d);

long long ipow(long long base, int exp);

}  // namespace qflab
