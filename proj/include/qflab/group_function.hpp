#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "qflab/fpn_core.hpp"
#include "qflab/subset.hpp"

namespace qflab {

/// Dense table of values on F_p^n indexed canonically.
template <typename Scalar>
class BasicGroupFunction {
 public:
  using Values = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit BasicGroupFunction(const Space& space)
      : space_(space), values_(Values::Zero(space.size())) {}
  BasicGroupFunction(const Space& space, Values values) : space_(space), values_(std::move(values)) {
    if (values_.size() != static_cast<Eigen::Index>(space_.size())) {
      throw Error(ErrorKind::InvalidArgument, "function table length differs from p^n");
    }
  }

  static BasicGroupFunction constant(const Space& space, Scalar c) {
    return BasicGroupFunction(space, Values::Constant(space.size(), c));
  }

  const Space& space() const { return space_; }
  const Values& values() const { return values_; }
  Index size() const { return space_.size(); }
  Scalar operator()(Index x) const { return values_[x]; }

  BasicGroupFunction operator+(const BasicGroupFunction& o) const {
    return BasicGroupFunction(space_, values_ + o.values_);
  }
  BasicGroupFunction operator-(const BasicGroupFunction& o) const {
    return BasicGroupFunction(space_, values_ - o.values_);
  }
  BasicGroupFunction operator-() const { return BasicGroupFunction(space_, -values_); }
  BasicGroupFunction operator*(Scalar c) const { return BasicGroupFunction(space_, values_ * c); }
  /// Pointwise product.
  BasicGroupFunction cwise(const BasicGroupFunction& o) const {
    return BasicGroupFunction(space_, values_.cwiseProduct(o.values_));
  }

 private:
  Space space_;
  Values values_;
};

using GroupFunction = BasicGroupFunction<Complex>;
using CountingFunction = BasicGroupFunction<std::int64_t>;

GroupFunction indicator(const SubsetBitmask& set);
CountingFunction counting_indicator(const SubsetBitmask& set);
/// 1_A - alpha.
GroupFunction balanced(const SubsetBitmask& set, double alpha);
/// x -> w^{x^T M x + r^T x}.
GroupFunction quadratic_phase(const SymmetricForm& m, const GroupVector& r);
GroupFunction quadratic_phase(const SymmetricForm& m);
/// x -> w^{x^T t}.
GroupFunction character(const Space& space, const GroupVector& t);
GroupFunction conj(const GroupFunction& f);
GroupFunction to_complex(const CountingFunction& f);

Complex mean(const GroupFunction& f);
/// (E_x |f(x)|^2)^{1/2}.
double l2_norm(const GroupFunction& f);
double linf_norm(const GroupFunction& f);
bool one_bounded(const GroupFunction& f);

}  // namespace qflab
