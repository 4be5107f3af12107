#include "qflab/random.hpp"

#include <cmath>
#include <numbers>

namespace qflab {

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % bound);
  std::uint64_t v = engine_();
  while (v >= limit) v = engine_();
  return v % bound;
}

Complex Rng::disc() {
  const double r = std::sqrt(uniform());
  const double t = 2.0 * std::numbers::pi * uniform();
  return {r * std::cos(t), r * std::sin(t)};
}

Complex Rng::unit_circle() {
  const double t = 2.0 * std::numbers::pi * uniform();
  return {std::cos(t), std::sin(t)};
}

GroupVector random_vector(Rng& rng, int p, int n) {
  IntVector c(n);
  for (int i = 0; i < n; ++i) c[i] = rng.residue(p);
  return GroupVector(p, c);
}

SymmetricForm random_form(Rng& rng, int p, int n) {
  IntMatrix m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      m(i, j) = rng.residue(p);
      m(j, i) = m(i, j);
    }
  }
  return SymmetricForm(p, m);
}

GroupFunction random_bounded_function(Rng& rng, const Space& space) {
  GroupFunction::Values v(space.size());
  for (Index x = 0; x < space.size(); ++x) v[x] = rng.disc();
  return GroupFunction(space, v);
}

GroupFunction random_phase_function(Rng& rng, const Space& space) {
  GroupFunction::Values v(space.size());
  for (Index x = 0; x < space.size(); ++x) v[x] = rng.unit_circle();
  return GroupFunction(space, v);
}

GroupFunction random_function(Rng& rng, const Space& space) {
  GroupFunction::Values v(space.size());
  for (Index x = 0; x < space.size(); ++x) {
    double re = 0.0, im = 0.0;
    for (int k = 0; k < 4; ++k) {
      re += rng.uniform() - 0.5;
      im += rng.uniform() - 0.5;
    }
    v[x] = Complex(re, im);
  }
  return GroupFunction(space, v);
}

SubsetBitmask random_set(Rng& rng, const Space& space, double density) {
  SubsetBitmask s(space);
  for (Index x = 0; x < space.size(); ++x) {
    if (rng.coin(density)) s.insert(x);
  }
  return s;
}

}  // namespace qflab
