#pragma once

#include <cstdint>
#include <random>

#include "qflab/group_function.hpp"
#include "qflab/subset.hpp"

namespace qflab {

/// Seeded generator with platform-independent derived distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t bits() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  int residue(int p) { return static_cast<int>(below(static_cast<std::uint64_t>(p))); }
  bool coin(double probability) { return uniform() < probability; }
  /// Uniform point of the closed unit disc.
  Complex disc();
  Complex unit_circle();

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

GroupVector random_vector(Rng& rng, int p, int n);
SymmetricForm random_form(Rng& rng, int p, int n);
/// Values uniform in the unit disc.
GroupFunction random_bounded_function(Rng& rng, const Space& space);
/// Unimodular values.
GroupFunction random_phase_function(Rng& rng, const Space& space);
/// Real and imaginary parts standard-normal-ish (sum of uniforms), no bound.
GroupFunction random_function(Rng& rng, const Space& space);
SubsetBitmask random_set(Rng& rng, const Space& space, double density);

}  // namespace qflab
