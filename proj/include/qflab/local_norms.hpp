#pragma once

#include <array>
#include <memory>
#include <string>

#include "qflab/factor.hpp"
#include "qflab/spectral.hpp"

namespace qflab {

/// Row-major bit matrix; row i holds the admissible partners of the i-th element.
class BitRows {
 public:
  BitRows() = default;
  BitRows(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), words_((cols + 63) / 64), data_(rows * words_, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t words() const { return words_; }
  const std::uint64_t* row(std::size_t i) const { return data_.data() + i * words_; }
  void set(std::size_t i, std::size_t j) { data_[i * words_ + (j >> 6)] |= std::uint64_t{1} << (j & 63); }
  bool test(std::size_t i, std::size_t j) const { return (row(i)[j >> 6] >> (j & 63)) & 1u; }

 private:
  std::size_t rows_ = 0, cols_ = 0, words_ = 0;
  std::vector<std::uint64_t> data_;
};

/// Bit (i, j) set iff (rows[i], cols[j]) lies in beta(b).
BitRows level_set_adjacency(const QuadraticFactor& factor, const std::vector<Index>& rows,
                            const std::vector<Index>& cols, const Label& b);

class LocalContext2 {
 public:
  LocalContext2(const LinearFactor& linear, DirectionTuple2 d);

  const LinearFactor& linear() const { return factor_->linear(); }
  const QuadraticFactor& partition() const { return *factor_; }
  const DirectionTuple2& direction() const { return d_; }
  const std::vector<Index>& first() const { return factor_->members(d_.a1); }
  const std::vector<Index>& second() const { return factor_->members(d_.a2); }
  Label target() const { return sigma2(d_, factor_->p()); }
  const std::vector<Index>& target_members() const { return factor_->members(target()); }

 private:
  std::shared_ptr<const QuadraticFactor> factor_;
  DirectionTuple2 d_;
};

enum class LocalU2Method { Direct, Fourier };

Complex local_u2_inner(const LocalContext2& ctx, const GroupFunction& f00, const GroupFunction& f01,
                       const GroupFunction& f10, const GroupFunction& f11,
                       LocalU2Method method = LocalU2Method::Direct);
double local_u2_norm(const LocalContext2& ctx, const GroupFunction& f,
                     LocalU2Method method = LocalU2Method::Direct, double tol = kDefaultTolerance);

/// Spectrum of h(u) = f(z + u) on H = L(0), with characters of H read in the coordinates of
/// the kernel basis returned by kernel_basis.
SpectrumTable restricted_fourier(const GroupFunction& f, const LinearFactor& linear, const GroupVector& z);

class LocalContext3 {
 public:
  /// The factor must outlive the context.
  LocalContext3(const QuadraticFactor& factor, DirectionTuple3 d);

  const QuadraticFactor& factor() const { return *factor_; }
  const DirectionTuple3& direction() const { return d_; }
  bool degenerate() const { return !reason_.empty(); }
  const std::string& degeneracy_reason() const { return reason_; }
  void require_nondegenerate() const;

  /// Atoms B(a1), B(a2), B(a3).
  const std::vector<Index>& atom(int k) const { return *atoms_[static_cast<std::size_t>(k)]; }
  /// Level sets in the order (12), (13), (23).
  const BilinearLevelSet& level(int pair) const { return levels_[static_cast<std::size_t>(pair)]; }
  double mu(int pair) const { return levels_[static_cast<std::size_t>(pair)].weight(); }
  /// (12): rows B(a1), columns B(a2); (13): rows B(a1), columns B(a3); (23): rows B(a2), columns B(a3).
  const BitRows& adjacency(int pair) const { return adjacency_[static_cast<std::size_t>(pair)]; }
  Label target() const { return sigma3(d_, factor_->ell(), factor_->p()); }
  const std::vector<Index>& target_members() const { return factor_->members(target()); }

 private:
  const QuadraticFactor* factor_;
  DirectionTuple3 d_;
  std::array<const std::vector<Index>*, 3> atoms_{};
  std::array<BilinearLevelSet, 3> levels_;
  std::array<BitRows, 3> adjacency_;
  std::string reason_;
};

Complex local_u3_inner(const LocalContext3& ctx, const Octuple& f);
double local_u3_norm(const LocalContext3& ctx, const GroupFunction& f, double tol = kDefaultTolerance);

struct DominationResult {
  double u3 = 0.0;
  double u2 = 0.0;
  double margin = 0.0;
};

/// ||f||_{U3(a1,a2,a3)} against ||f||_{U2((a1 + a2, a3))} for a linear factor.
DominationResult local_u3_dominates_check(const LinearFactor& linear, const Label& a1, const Label& a2,
                                          const Label& a3, const GroupFunction& f,
                                          double tol = kDefaultTolerance);

}  // namespace qflab
