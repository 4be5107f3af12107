#pragma once

#include <cmath>
#include <vector>

#include "common.hpp"

namespace qflab::lab::detail {

/// Number of direction tuples (a1, a2, a3, b12, b13, b23) for complexity (ell, q).
inline double direction_space(int p, int ell, int q) {
  return std::pow(static_cast<double>(p), 3 * (ell + q) + 3 * q);
}

inline double direction_count(int p, int ell, int q, std::size_t samples) {
  return std::min(direction_space(p, ell, q), static_cast<double>(samples));
}

/// Every direction tuple in code order when there are at most `samples`, otherwise
/// `samples` uniform draws from a fixed stream.
inline std::vector<DirectionTuple3> direction_list(const QuadraticFactor& f, std::size_t samples, std::uint64_t seed,
                                                   std::uint64_t stream) {
  const int p = f.p(), len = f.label_length(), q = f.q();
  const double total = direction_space(p, f.ell(), q);
  std::vector<DirectionTuple3> out;
  if (total <= static_cast<double>(samples)) {
    const auto count = static_cast<std::uint64_t>(total);
    for (std::uint64_t code = 0; code < count; ++code) {
      std::uint64_t rest = code;
      const auto take = [&](int length) {
        Label l(static_cast<std::size_t>(length));
        for (auto& v : l) {
          v = static_cast<int>(rest % static_cast<std::uint64_t>(p));
          rest /= static_cast<std::uint64_t>(p);
        }
        return l;
      };
      DirectionTuple3 d;
      d.a1 = take(len);
      d.a2 = take(len);
      d.a3 = take(len);
      d.b12 = take(q);
      d.b13 = take(q);
      d.b23 = take(q);
      out.push_back(std::move(d));
    }
    return out;
  }
  Rng rng = trial_rng(seed, 0xd1u ^ (stream << 8), 0);
  for (std::size_t k = 0; k < samples; ++k) out.push_back(random_direction3(rng, f));
  return out;
}

/// Predicted visited terms of one local U3 evaluation with atoms of size b and p^q level classes.
inline double u3_local_estimate(double b, double pq) {
  return b * b + std::pow(b, 5) / std::pow(pq, 8) + 2 * std::pow(b, 4) / std::pow(pq, 4) + std::pow(b, 3) / (pq * pq);
}

}  // namespace qflab::lab::detail
