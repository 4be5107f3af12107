#pragma once

#include <array>
#include <optional>

#include "qflab/fpn_core.hpp"
#include "qflab/group_function.hpp"

namespace qflab {

/// Fourier coefficients indexed by the dual group, identified with F_p^n.
struct SpectrumTable {
  Space space;
  Eigen::VectorXcd values;

  Complex operator()(Index t) const { return values[t]; }
  /// sum_t |F(t)|^k.
  double power_sum(int k) const;
  double sup_norm() const;
};

enum class FourierMethod { Naive, Fast };

/// f^(t) = E_x f(x) w^{-x.t}.
SpectrumTable fourier_transform(const GroupFunction& f, FourierMethod method = FourierMethod::Fast);
/// f(x) = sum_t F(t) w^{x.t}.
GroupFunction inverse_transform(const SpectrumTable& spectrum, FourierMethod method = FourierMethod::Fast);

enum class GowersMethod { Factorized, Fourier };

/// E_{x0,x1,y0,y1} f00(x0+y0) conj f01(x0+y1) conj f10(x1+y0) f11(x1+y1).
Complex u2_inner(const GroupFunction& f00, const GroupFunction& f01, const GroupFunction& f10,
                 const GroupFunction& f11, GowersMethod method = GowersMethod::Factorized);
double u2_norm(const GroupFunction& f, GowersMethod method = GowersMethod::Factorized,
               double tol = kDefaultTolerance);

/// Octuple indexed by 4 e1 + 2 e2 + e3 for e in {0,1}^3.
using Octuple = std::array<GroupFunction, 8>;
Octuple diagonal_octuple(const GroupFunction& f);

Complex u3_inner(const Octuple& f, GowersMethod method = GowersMethod::Factorized);
double u3_norm(const GroupFunction& f, GowersMethod method = GowersMethod::Factorized,
               double tol = kDefaultTolerance);
/// E_h ||D_h f||_{U2}^4 with D_h f(x) = f(x) conj f(x+h), computed through the Fourier transform.
double u3_inductive_eighth_power(const GroupFunction& f);

/// Takes the fourth or eighth root of a diagonal inner product after the sign check.
double diagonal_root(const Complex& value, int root, double tol);

/// E_{x,d} f(x) f(x+d) f(x+2d).
Complex ap3_average(const GroupFunction& f);
/// E_{x,d} f(x) f(x+d) f(x+2d) f(x+3d).
Complex ap4_average(const GroupFunction& f);

struct QuadraticCorrelation {
  SymmetricForm m;
  std::optional<GroupVector> r;
  double value = 0.0;
  std::uint64_t candidates = 0;
};

struct CorrelationOptions {
  bool joint_linear = false;
  std::uint64_t cap = 59049;
};

/// max over symmetric M (and r when joint) of |E_x f(x) w^{x^T M x (+ r.x)}|, ties to the
/// lexicographically least upper triangle in row-major order.
QuadraticCorrelation max_quadratic_correlation(const GroupFunction& f, const CorrelationOptions& options = {});

}  // namespace qflab
