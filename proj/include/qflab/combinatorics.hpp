#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qflab/factor.hpp"
#include "qflab/subset.hpp"

namespace qflab {

enum class WitnessKind { IP, OP, IP2 };

/// Explicit witness of a pattern in a set.
///  IP:  a_i + b_S in A iff i in S, with b indexed by the bitmask S over [k].
///  OP:  a_i + b_j in A iff i <= j.
///  IP2: a_i + b_j + c_S in A iff (i, j) in S, with c indexed by the bitmask S (bit i*m + j).
struct WitnessCertificate {
  WitnessKind kind = WitnessKind::IP;
  int order = 0;
  std::vector<Index> a, b, c;
};

struct ReplayResult {
  bool ok = true;
  std::uint64_t checks = 0;
  std::vector<std::string> failures;
};

ReplayResult replay(const WitnessCertificate& cert, const SubsetBitmask& a);

/// Search space bound for the witness searches.
inline constexpr double kSearchCap = 2e10;

std::optional<WitnessCertificate> has_k_ip(const SubsetBitmask& a, int k);
std::optional<WitnessCertificate> has_k_op(const SubsetBitmask& a, int k);
std::optional<WitnessCertificate> has_m_ip2(const SubsetBitmask& a, int m);

struct DimensionResult {
  int dimension = 0;
  /// True when a witness exists at the cap, so the true dimension may be larger.
  bool capped = false;
  std::optional<WitnessCertificate> witness;
};

DimensionResult vc_dimension(const SubsetBitmask& a, int cap = 4);
DimensionResult vc2_dimension(const SubsetBitmask& a, int cap = 2);

struct CubeResidues {
  int quadratic = 0;
  int linear = 0;
};

/// Alternating sums over the eight corners x_e1 + y_e2 + z_e3 of the quadratic and linear parts, mod p.
CubeResidues cube_identity_check(const SymmetricForm& m, const GroupVector& r, const GroupVector& x0,
                                 const GroupVector& x1, const GroupVector& y0, const GroupVector& y1,
                                 const GroupVector& z0, const GroupVector& z1);

struct AtomDensity {
  std::uint32_t code = 0;
  Label label;
  std::uint64_t size = 0;
  std::uint64_t hits = 0;
  double density() const { return static_cast<double>(hits) / static_cast<double>(size); }
};

struct DensityProfile {
  std::vector<AtomDensity> atoms;  ///< nonempty atoms in label-code order
  std::size_t empty_atoms = 0;
};

DensityProfile density_profile(const SubsetBitmask& a, const QuadraticFactor& factor);

struct RegularityConclusion {
  double fraction = 0.0;
  std::size_t trivial_atoms = 0;
  std::size_t nonempty_atoms = 0;
  std::size_t empty_atoms = 0;
};

/// Share of nonempty atoms whose density lies in [0, mu) or (1 - mu, 1].
RegularityConclusion regularity_conclusion(const SubsetBitmask& a, const QuadraticFactor& factor, double mu);

struct AtomUnionApprox {
  SubsetBitmask y;
  std::uint64_t symdiff = 0;
};

/// Union of the atoms where A has density strictly above one half.
AtomUnionApprox best_atom_union_approx(const SubsetBitmask& a, const QuadraticFactor& factor);

}  // namespace qflab
