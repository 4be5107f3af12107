#include "qflab/combinatorics.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>

#include "qflab/numeric.hpp"

namespace qflab {

namespace {

std::string describe(const Space& sp, Index x) {
  std::string out = "(";
  for (int i = 0; i < sp.n(); ++i) out += (i ? "," : "") + std::to_string(sp.coord(x, i));
  return out + ")";
}

std::vector<char> membership(const SubsetBitmask& a) {
  std::vector<char> in(a.universe());
  for (Index x = 0; x < a.universe(); ++x) in[x] = a.contains(x);
  return in;
}

void check_search_cost(double terms, const char* what) {
  if (terms > kSearchCap) {
    throw Error(ErrorKind::CapExceeded,
                std::string(what) + " search would visit about " + std::to_string(terms) + " terms");
  }
}

/// Runs `search(first)` for first = 0..count-1 concurrently and keeps the result with the least
/// `first`; searches starting beyond an already found index are skipped.
template <typename Search>
std::optional<WitnessCertificate> least_over(std::size_t count, Search search) {
  std::atomic<std::size_t> found{std::numeric_limits<std::size_t>::max()};
  using Partial = std::optional<WitnessCertificate>;
  return chunked_reduce<Partial>(
      count, default_chunk(count), Partial{},
      [&](std::size_t begin, std::size_t end) -> Partial {
        for (std::size_t first = begin; first < end; ++first) {
          if (first > found.load()) return std::nullopt;
          if (auto cert = search(first)) {
            std::size_t cur = found.load();
            while (first < cur && !found.compare_exchange_weak(cur, first)) {
            }
            return cert;
          }
        }
        return std::nullopt;
      },
      [](Partial acc, const Partial& part) { return acc ? acc : part; });
}

/// Depth-first search for the k-IP with a_1 = 0 and a_2 < ... < a_k.
class IpSearch {
 public:
  IpSearch(const SubsetBitmask& a, int k) : sp_(a.space()), in_(membership(a)), k_(k) {}

  /// The case k = 1: a_1 = 0 with a member and a non-member translate.
  std::optional<WitnessCertificate> single() const {
    std::vector<std::uint8_t> trace(sp_.size());
    bool seen[2] = {false, false};
    for (Index b = 0; b < sp_.size(); ++b) {
      trace[b] = in_[b];
      seen[trace[b]] = true;
    }
    count_terms(sp_.size());
    if (!(seen[0] && seen[1])) return std::nullopt;
    return certificate({0}, trace);
  }

  std::optional<WitnessCertificate> from(Index a2) const {
    const Index size = sp_.size();
    std::vector<std::vector<std::uint8_t>> trace(static_cast<std::size_t>(k_));
    trace[0].resize(size);
    for (Index b = 0; b < size; ++b) trace[0][b] = in_[b];
    std::vector<Index> chosen{0, a2};
    std::uint64_t visited = size;
    const bool ok = extend(trace, chosen, 1, visited);
    count_terms(visited);
    if (!ok) return std::nullopt;
    return certificate(chosen, trace.back());
  }

 private:
  bool extend(std::vector<std::vector<std::uint8_t>>& trace, std::vector<Index>& chosen, int level,
              std::uint64_t& visited) const {
    const Index size = sp_.size();
    const Index aj = chosen[static_cast<std::size_t>(level)];
    auto& cur = trace[static_cast<std::size_t>(level)];
    const auto& prev = trace[static_cast<std::size_t>(level - 1)];
    cur.resize(size);
    std::vector<char> seen(std::size_t{1} << (level + 1), 0);
    std::size_t distinct = 0;
    for (Index b = 0; b < size; ++b) {
      cur[b] = static_cast<std::uint8_t>(prev[b] | (in_[sp_.add(aj, b)] << level));
      if (!seen[cur[b]]) {
        seen[cur[b]] = 1;
        ++distinct;
      }
    }
    visited += size;
    if (distinct < seen.size()) return false;
    if (level + 1 == k_) return true;
    for (Index next = aj + 1; next < size; ++next) {
      chosen.push_back(next);
      if (extend(trace, chosen, level + 1, visited)) return true;
      chosen.pop_back();
    }
    return false;
  }

  WitnessCertificate certificate(const std::vector<Index>& chosen, const std::vector<std::uint8_t>& trace) const {
    WitnessCertificate cert;
    cert.kind = WitnessKind::IP;
    cert.order = k_;
    cert.a = chosen;
    const std::size_t patterns = std::size_t{1} << k_;
    cert.b.assign(patterns, 0);
    std::vector<char> have(patterns, 0);
    for (Index b = 0; b < sp_.size(); ++b) {
      if (!have[trace[b]]) {
        have[trace[b]] = 1;
        cert.b[trace[b]] = b;
      }
    }
    return cert;
  }

  Space sp_;
  std::vector<char> in_;
  int k_;
};

/// Depth-first search for the k-order property with a_1 = 0.
class OpSearch {
 public:
  OpSearch(const SubsetBitmask& a, int k) : sp_(a.space()), in_(membership(a)), k_(k) {}

  std::optional<WitnessCertificate> from(Index a2) const {
    std::vector<std::vector<std::uint8_t>> trace(static_cast<std::size_t>(k_));
    const Index size = sp_.size();
    trace[0].resize(size);
    for (Index b = 0; b < size; ++b) trace[0][b] = in_[b];
    std::uint64_t visited = size;
    std::vector<Index> chosen{0};
    if (k_ == 1) {
      count_terms(visited);
      if (!prefixes_ok(trace[0], 1)) return std::nullopt;
      return certificate(chosen, trace[0]);
    }
    if (!prefixes_ok(trace[0], 1)) return std::nullopt;
    chosen.push_back(a2);
    const bool ok = extend(trace, chosen, 1, visited);
    count_terms(visited);
    if (!ok) return std::nullopt;
    return certificate(chosen, trace.back());
  }

 private:
  /// Every prefix trace {1..s}, s = 1..t, restricted to the first t indices, is realized.
  bool prefixes_ok(const std::vector<std::uint8_t>& trace, int t) const {
    std::vector<char> seen(std::size_t{1} << t, 0);
    for (Index b = 0; b < sp_.size(); ++b) seen[trace[b]] = 1;
    for (int s = 1; s <= t; ++s) {
      if (!seen[(std::size_t{1} << s) - 1]) return false;
    }
    return true;
  }

  bool extend(std::vector<std::vector<std::uint8_t>>& trace, std::vector<Index>& chosen, int level,
              std::uint64_t& visited) const {
    const Index size = sp_.size();
    const Index aj = chosen[static_cast<std::size_t>(level)];
    auto& cur = trace[static_cast<std::size_t>(level)];
    const auto& prev = trace[static_cast<std::size_t>(level - 1)];
    cur.resize(size);
    for (Index b = 0; b < size; ++b) cur[b] = static_cast<std::uint8_t>(prev[b] | (in_[sp_.add(aj, b)] << level));
    visited += size;
    if (!prefixes_ok(cur, level + 1)) return false;
    if (level + 1 == k_) return true;
    for (Index next = 1; next < size; ++next) {
      if (std::find(chosen.begin(), chosen.end(), next) != chosen.end()) continue;
      chosen.push_back(next);
      if (extend(trace, chosen, level + 1, visited)) return true;
      chosen.pop_back();
    }
    return false;
  }

  WitnessCertificate certificate(const std::vector<Index>& chosen, const std::vector<std::uint8_t>& trace) const {
    WitnessCertificate cert;
    cert.kind = WitnessKind::OP;
    cert.order = k_;
    cert.a = chosen;
    cert.b.assign(static_cast<std::size_t>(k_), 0);
    for (int j = 1; j <= k_; ++j) {
      const std::size_t want = (std::size_t{1} << j) - 1;
      for (Index b = 0; b < sp_.size(); ++b) {
        if (trace[b] == want) {
          cert.b[static_cast<std::size_t>(j - 1)] = b;
          break;
        }
      }
    }
    return cert;
  }

  Space sp_;
  std::vector<char> in_;
  int k_;
};

}  // namespace

ReplayResult replay(const WitnessCertificate& cert, const SubsetBitmask& a) {
  const Space& sp = a.space();
  ReplayResult out;
  const auto check = [&](Index sum, bool want, const std::string& what) {
    ++out.checks;
    if (a.contains(sum) != want) {
      out.ok = false;
      out.failures.push_back(what + " = " + describe(sp, sum) + (want ? " should lie in A" : " should avoid A"));
    }
  };
  const int k = cert.order;
  switch (cert.kind) {
    case WitnessKind::IP:
      if (cert.a.size() != static_cast<std::size_t>(k) || cert.b.size() != (std::size_t{1} << k)) {
        return {false, 0, {"certificate has the wrong shape"}};
      }
      for (int i = 0; i < k; ++i)
        for (std::size_t s = 0; s < cert.b.size(); ++s)
          check(sp.add(cert.a[static_cast<std::size_t>(i)], cert.b[s]), (s >> i) & 1,
                "a" + std::to_string(i + 1) + " + b_S[" + std::to_string(s) + "]");
      break;
    case WitnessKind::OP:
      if (cert.a.size() != static_cast<std::size_t>(k) || cert.b.size() != static_cast<std::size_t>(k)) {
        return {false, 0, {"certificate has the wrong shape"}};
      }
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          check(sp.add(cert.a[static_cast<std::size_t>(i)], cert.b[static_cast<std::size_t>(j)]), i <= j,
                "a" + std::to_string(i + 1) + " + b" + std::to_string(j + 1));
      break;
    case WitnessKind::IP2:
      if (cert.a.size() != static_cast<std::size_t>(k) || cert.b.size() != static_cast<std::size_t>(k) ||
          cert.c.size() != (std::size_t{1} << (k * k))) {
        return {false, 0, {"certificate has the wrong shape"}};
      }
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
          for (std::size_t s = 0; s < cert.c.size(); ++s)
            check(sp.add(sp.add(cert.a[static_cast<std::size_t>(i)], cert.b[static_cast<std::size_t>(j)]), cert.c[s]),
                  (s >> (i * k + j)) & 1,
                  "a" + std::to_string(i + 1) + " + b" + std::to_string(j + 1) + " + c_S[" + std::to_string(s) + "]");
      break;
  }
  return out;
}

std::optional<WitnessCertificate> has_k_ip(const SubsetBitmask& a, int k) {
  if (k < 0 || k > 4) throw Error(ErrorKind::CapExceeded, "has_k_ip supports k <= 4");
  const Space& sp = a.space();
  const double n = sp.size();
  if (k == 0) return WitnessCertificate{WitnessKind::IP, 0, {}, {0}, {}};
  if (k == 1) return IpSearch(a, 1).single();
  double cost = n;
  for (int j = 1; j < k; ++j) cost *= n / j;
  check_search_cost(cost, "k-IP");
  const IpSearch search(a, k);
  return least_over(sp.size() - 1, [&](std::size_t i) { return search.from(static_cast<Index>(i + 1)); });
}

std::optional<WitnessCertificate> has_k_op(const SubsetBitmask& a, int k) {
  if (k < 1 || k > 4) throw Error(ErrorKind::CapExceeded, "has_k_op supports 1 <= k <= 4");
  const Space& sp = a.space();
  const OpSearch search(a, k);
  if (k == 1) return search.from(0);
  double cost = sp.size();
  for (int j = 1; j < k; ++j) cost *= sp.size();
  check_search_cost(cost, "k-order");
  return least_over(sp.size() - 1, [&](std::size_t i) { return search.from(static_cast<Index>(i + 1)); });
}

std::optional<WitnessCertificate> has_m_ip2(const SubsetBitmask& a, int m) {
  if (m < 0 || m > 2) throw Error(ErrorKind::CapExceeded, "has_m_ip2 supports m <= 2");
  const Space& sp = a.space();
  const Index size = sp.size();
  if (m == 0) return WitnessCertificate{WitnessKind::IP2, 0, {}, {}, {0}};
  const std::vector<char> in = membership(a);
  if (m == 1) {
    WitnessCertificate cert{WitnessKind::IP2, 1, {0}, {0}, {0, 0}};
    bool have_in = false, have_out = false;
    for (Index c = 0; c < size; ++c) {
      if (in[c] && !have_in) {
        cert.c[1] = c;
        have_in = true;
      }
      if (!in[c] && !have_out) {
        cert.c[0] = c;
        have_out = true;
      }
    }
    count_terms(size);
    if (!(have_in && have_out)) return std::nullopt;
    return cert;
  }
  check_search_cost(std::pow(static_cast<double>(size), 3) * 4, "2-IP2");
  return least_over(size, [&](std::size_t a2) -> std::optional<WitnessCertificate> {
    std::array<Index, 16> first{};
    for (Index b2 = 0; b2 < size; ++b2) {
      std::array<char, 16> seen{};
      int distinct = 0;
      const Index a2b1 = static_cast<Index>(a2), a1b2 = b2, a2b2 = sp.add(static_cast<Index>(a2), b2);
      for (Index c = 0; c < size; ++c) {
        const unsigned pattern = static_cast<unsigned>(in[c]) | (static_cast<unsigned>(in[sp.add(a1b2, c)]) << 1) |
                                 (static_cast<unsigned>(in[sp.add(a2b1, c)]) << 2) |
                                 (static_cast<unsigned>(in[sp.add(a2b2, c)]) << 3);
        if (!seen[pattern]) {
          seen[pattern] = 1;
          first[pattern] = c;
          ++distinct;
        }
      }
      count_terms(static_cast<std::uint64_t>(size) * 4);
      if (distinct == 16) {
        WitnessCertificate cert{WitnessKind::IP2, 2, {0, static_cast<Index>(a2)}, {0, b2}, {}};
        cert.c.assign(first.begin(), first.end());
        return cert;
      }
    }
    return std::nullopt;
  });
}

DimensionResult vc_dimension(const SubsetBitmask& a, int cap) {
  if (cap < 0 || cap > 4) throw Error(ErrorKind::CapExceeded, "VC-dimension cap must be at most 4");
  DimensionResult out;
  for (int k = 1; k <= cap; ++k) {
    auto cert = has_k_ip(a, k);
    if (!cert) return out;
    out.dimension = k;
    out.witness = std::move(cert);
  }
  out.capped = true;
  return out;
}

DimensionResult vc2_dimension(const SubsetBitmask& a, int cap) {
  if (cap < 0 || cap > 2) throw Error(ErrorKind::CapExceeded, "VC2-dimension cap must be at most 2");
  DimensionResult out;
  for (int m = 1; m <= cap; ++m) {
    auto cert = has_m_ip2(a, m);
    if (!cert) return out;
    out.dimension = m;
    out.witness = std::move(cert);
  }
  out.capped = true;
  return out;
}

CubeResidues cube_identity_check(const SymmetricForm& m, const GroupVector& r, const GroupVector& x0,
                                 const GroupVector& x1, const GroupVector& y0, const GroupVector& y1,
                                 const GroupVector& z0, const GroupVector& z1) {
  const int p = m.p();
  const std::array<const GroupVector*, 2> xs{&x0, &x1}, ys{&y0, &y1}, zs{&z0, &z1};
  long long quad = 0, lin = 0;
  for (int e = 0; e < 8; ++e) {
    const GroupVector corner = *xs[static_cast<std::size_t>((e >> 2) & 1)] +
                               *ys[static_cast<std::size_t>((e >> 1) & 1)] + *zs[static_cast<std::size_t>(e & 1)];
    const int sign = std::popcount(static_cast<unsigned>(e)) % 2 ? -1 : 1;
    quad += sign * m.quadratic(corner);
    lin += sign * r.dot(corner);
  }
  return {static_cast<int>(((quad % p) + p) % p), static_cast<int>(((lin % p) + p) % p)};
}

DensityProfile density_profile(const SubsetBitmask& a, const QuadraticFactor& factor) {
  if (a.space() != factor.space()) throw Error(ErrorKind::InvalidArgument, "set and factor spaces differ");
  DensityProfile out;
  for (std::uint32_t code = 0; code < factor.num_labels(); ++code) {
    const auto& members = factor.members(code);
    if (members.empty()) {
      ++out.empty_atoms;
      continue;
    }
    AtomDensity d;
    d.code = code;
    d.label = factor.decode(code);
    d.size = members.size();
    for (Index x : members) d.hits += a.contains(x);
    out.atoms.push_back(std::move(d));
    count_terms(members.size());
  }
  return out;
}

RegularityConclusion regularity_conclusion(const SubsetBitmask& a, const QuadraticFactor& factor, double mu) {
  const DensityProfile profile = density_profile(a, factor);
  RegularityConclusion out;
  out.empty_atoms = profile.empty_atoms;
  out.nonempty_atoms = profile.atoms.size();
  for (const auto& atom : profile.atoms) {
    const double d = atom.density();
    if (d < mu || d > 1.0 - mu) ++out.trivial_atoms;
  }
  out.fraction = out.nonempty_atoms ? static_cast<double>(out.trivial_atoms) / static_cast<double>(out.nonempty_atoms) : 0.0;
  return out;
}

AtomUnionApprox best_atom_union_approx(const SubsetBitmask& a, const QuadraticFactor& factor) {
  const DensityProfile profile = density_profile(a, factor);
  AtomUnionApprox out{SubsetBitmask(a.space()), 0};
  for (const auto& atom : profile.atoms) {
    if (2 * atom.hits > atom.size) {
      for (Index x : factor.members(atom.code)) out.y.insert(x);
      out.symdiff += atom.size - atom.hits;
    } else {
      out.symdiff += atom.hits;
    }
  }
  return out;
}

}  // namespace qflab
