#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "qflab/lab/registry.hpp"
#include "qflab/random.hpp"
#include "qflab/spectral.hpp"

namespace qflab::lab::detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Independent stream for trial `index` of stream `stream`.
inline Rng trial_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  return Rng(splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ index));
}

/// Runs fn(i) for i in [0, count) on the worker pool and concatenates in index order.
template <typename Fn>
std::vector<TrialRecord> parallel_trials(std::size_t count, Fn fn) {
  return chunked_reduce(
      count, 1, std::vector<TrialRecord>{}, [&](std::size_t b, std::size_t) { return fn(b); },
      [](std::vector<TrialRecord> acc, const std::vector<TrialRecord>& part) {
        acc.insert(acc.end(), part.begin(), part.end());
        return acc;
      });
}

/// Same, for arbitrary per-index results.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t count, Fn fn) {
  std::vector<std::optional<T>> slots = chunked_reduce(
      count, 1, std::vector<std::optional<T>>{},
      [&](std::size_t b, std::size_t) { return std::vector<std::optional<T>>{std::optional<T>(fn(b))}; },
      [](std::vector<std::optional<T>> acc, const std::vector<std::optional<T>>& part) {
        acc.insert(acc.end(), part.begin(), part.end());
        return acc;
      });
  std::vector<T> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

inline Octuple random_octuple(Rng& rng, const Space& space) {
  Octuple f = diagonal_octuple(GroupFunction(space));
  for (auto& g : f) g = random_bounded_function(rng, space);
  return f;
}

inline double powd(double base, double exp) { return std::pow(base, exp); }

inline double group_size(int p, int n) { return std::pow(static_cast<double>(p), n); }

inline Label random_label(Rng& rng, int p, int length) {
  Label out(static_cast<std::size_t>(length));
  for (auto& v : out) v = rng.residue(p);
  return out;
}

inline DirectionTuple3 random_direction3(Rng& rng, const QuadraticFactor& f) {
  const int len = f.label_length();
  const int q = f.q();
  return DirectionTuple3{random_label(rng, f.p(), len), random_label(rng, f.p(), len), random_label(rng, f.p(), len),
                         random_label(rng, f.p(), q),   random_label(rng, f.p(), q),   random_label(rng, f.p(), q)};
}

/// Resamples until the context has nonempty atoms and level sets.
inline std::optional<DirectionTuple3> nondegenerate_direction3(Rng& rng, const QuadraticFactor& f, int attempts = 64) {
  for (int k = 0; k < attempts; ++k) {
    DirectionTuple3 d = random_direction3(rng, f);
    bool ok = !f.members(d.a1).empty() && !f.members(d.a2).empty() && !f.members(d.a3).empty();
    for (const Label* b : {&d.b12, &d.b13, &d.b23}) ok = ok && !f.level_set(*b).empty();
    if (ok) return d;
  }
  return std::nullopt;
}

/// The configured factor when one is given, otherwise the (ell, q) default.
inline QuadraticFactor config_factor(const ExperimentConfig& c, const Space& space, int ell, int q) {
  if (!c.factor.is_null()) return factor_from_json(c.factor, space);
  return default_factor(space, c.get_int("ell", ell), c.get_int("q", q));
}

/// Mean atom size of the (ell, q) factor: p^{n - ell - q}.
inline double atom_estimate(int p, int n, int ell, int q) { return std::pow(static_cast<double>(p), n - ell - q); }

inline double density(const SubsetBitmask& a, const std::vector<Index>& atom) {
  std::size_t hits = 0;
  for (Index x : atom) hits += a.contains(x);
  return atom.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(atom.size());
}

inline Json label_json(const Label& l) { return Json(l); }

}  // namespace qflab::lab::detail
