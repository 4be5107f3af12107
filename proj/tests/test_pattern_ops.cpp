#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qflab/pattern_ops.hpp"
#include "qflab/random.hpp"

using namespace qflab;

namespace {

Label rlabel(Rng& rng, int p, int len) {
  Label l(static_cast<std::size_t>(len));
  for (auto& v : l) v = rng.residue(p);
  return l;
}

ComplexGrid random_grid(Rng& rng, std::array<int, 3> dims, const Space& s) {
  ComplexGrid g(dims, GroupFunction(s));
  for (int i = 0; i < dims[0]; ++i)
    for (int j = 0; j < dims[1]; ++j)
      for (int k = 0; k < dims[2]; ++k) g.at(i, j, k) = random_bounded_function(rng, s);
  return g;
}

double min_norm(const ComplexGrid& g, const std::function<double(const GroupFunction&)>& norm) {
  double m = 1e300;
  for (const auto& f : g.cells()) m = std::min(m, norm(f));
  return m;
}

/// Random ternary assignment whose atoms and level sets are all nonempty.
LabelAssignment random_assignment(Rng& rng, const PatternHypergraph& F, const QuadraticFactor& f) {
  for (;;) {
    LabelAssignment e;
    const int len = f.label_length(), q = f.q(), p = f.p();
    for (int u = 0; u < F.u(); ++u) e.a.push_back(rlabel(rng, p, len));
    for (int v = 0; v < F.v(); ++v) e.b.push_back(rlabel(rng, p, len));
    for (int w = 0; w < F.w(); ++w) e.c.push_back(rlabel(rng, p, len));
    for (int k = 0; k < F.u() * F.v(); ++k) e.d_uv.push_back(rlabel(rng, p, q));
    for (int k = 0; k < F.u() * F.w(); ++k) e.d_uw.push_back(rlabel(rng, p, q));
    for (int k = 0; k < F.v() * F.w(); ++k) e.d_vw.push_back(rlabel(rng, p, q));
    try {
      (void)ternary_normalization(F, f, e);
      return e;
    } catch (const Error&) {
    }
  }
}

struct Scene {
  Space s{3, 3};
  oracle::Grp g{3, 3};
  LinearFactor lin{s, {GroupVector::unit(3, 3, 0)}};
  QuadraticFactor f11{lin, {SymmetricForm::identity(3, 3)}};
  std::vector<Index> rs{GroupVector::unit(3, 3, 0).index()};
};

DirectionTuple3 rdir3(Rng& rng, const QuadraticFactor& f) {
  for (;;) {
    DirectionTuple3 d{rlabel(rng, 3, 2), rlabel(rng, 3, 2), rlabel(rng, 3, 2),
                      rlabel(rng, 3, 1), rlabel(rng, 3, 1), rlabel(rng, 3, 1)};
    if (!LocalContext3(f, d).degenerate()) return d;
  }
}

}  // namespace

TEST(Ip, ConstantsAndPatternExamples) {
  const Space s(3, 2);
  const auto one = GroupFunction::constant(s, 1.0);
  EXPECT_NEAR(std::abs(t_ip(2, ComplexGrid::ip(2, one, one)) - 1.0), 0, 1e-12);
  const auto full = indicator(SubsetBitmask::full(s));
  const auto empty = indicator(SubsetBitmask(s));
  EXPECT_NEAR(std::abs(t_ip(2, ComplexGrid::ip(2, full, full)) - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(t_ip(2, ComplexGrid::ip(2, empty, one - empty))), 0.0, 1e-12);
}

TEST(Ip, MatchesNestedSum) {
  Rng rng(1);
  const Space s(3, 2);
  const oracle::Grp g(3, 2);
  std::vector<Index> all(9);
  for (Index x = 0; x < 9; ++x) all[x] = x;
  for (int t = 0; t < 2; ++t) {
    const ComplexGrid grid = random_grid(rng, {2, 4, 1}, s);
    EXPECT_NEAR(std::abs(t_ip(2, grid) - oracle::t_ip_m2(g, all, all, grid)), 0, 1e-12);
  }
}

TEST(Ip, LocalMatchesNestedSum) {
  Rng rng(2);
  Scene st;
  for (int t = 0; t < 2; ++t) {
    const DirectionTuple2 d{rlabel(rng, 3, 1), rlabel(rng, 3, 1)};
    const ComplexGrid grid = random_grid(rng, {2, 4, 1}, st.s);
    const Complex ref = oracle::t_ip_m2(st.g, oracle::coset(st.g, st.rs, d.a1), oracle::coset(st.g, st.rs, d.a2), grid);
    EXPECT_NEAR(std::abs(t_ip_local(2, st.lin, d, grid) - ref), 0, 1e-12);
  }
}

TEST(Ip, ControlledByU2) {
  Rng rng(3);
  Scene st;
  for (int t = 0; t < 30; ++t) {
    const ComplexGrid grid = random_grid(rng, {2, 4, 1}, st.s);
    EXPECT_LE(std::abs(t_ip(2, grid)), min_norm(grid, [](const GroupFunction& f) { return u2_norm(f); }) + 1e-9);
    const DirectionTuple2 d{rlabel(rng, 3, 1), rlabel(rng, 3, 1)};
    const LocalContext2 ctx(st.lin, d);
    EXPECT_LE(std::abs(t_ip_local(2, st.lin, d, grid)),
              min_norm(grid, [&](const GroupFunction& f) { return local_u2_norm(ctx, f); }) + 1e-9);
  }
}

TEST(Ip2, GlobalMatchesPerSubsetOracle) {
  Rng rng(4);
  const Space s(3, 1);
  const oracle::Grp g(3, 1);
  const auto one = GroupFunction::constant(s, 1.0);
  EXPECT_NEAR(std::abs(t_ip2(2, ComplexGrid::ip2(2, one, one)) - 1.0), 0, 1e-12);
  for (int t = 0; t < 5; ++t) {
    const ComplexGrid grid = random_grid(rng, {2, 2, 16}, s);
    EXPECT_NEAR(std::abs(t_ip2(2, grid) - oracle::t_ip2_m2(g, grid)), 0, 1e-12);
  }
}

TEST(Ip2, ControlledByU3) {
  Rng rng(5);
  const Space s(3, 2);
  for (int t = 0; t < 10; ++t) {
    const ComplexGrid grid = random_grid(rng, {2, 2, 16}, s);
    EXPECT_LE(std::abs(t_ip2(2, grid)), min_norm(grid, [](const GroupFunction& f) { return u3_norm(f); }) + 1e-9);
  }
}

TEST(Ip2, LocalMatchesWeightedOracle) {
  Rng rng(6);
  Scene st;
  const auto of = oracle::factor_from(st.g, st.f11);
  const auto one = GroupFunction::constant(st.s, 1.0);
  for (int t = 0; t < 4; ++t) {
    const DirectionTuple3 d = rdir3(rng, st.f11);
    const Complex constant = oracle::t_ip2_local_m2(of, d, ComplexGrid::ip2(2, one, one));
    EXPECT_LE(std::abs(t_ip2_local(2, st.f11, d, ComplexGrid::ip2(2, one, one)) - constant), 1e-10 * (1 + std::abs(constant)));
    const ComplexGrid grid = random_grid(rng, {2, 2, 16}, st.s);
    const Complex ref = oracle::t_ip2_local_m2(of, d, grid);
    EXPECT_LE(std::abs(t_ip2_local(2, st.f11, d, grid) - ref), 1e-10 * (1 + std::abs(constant)));
  }
}

TEST(Ip2Hypergraph, ShapeAndEquivalence) {
  const PatternHypergraph h1 = ip2_hypergraph(1);
  EXPECT_EQ(h1.u(), 1);
  EXPECT_EQ(h1.v(), 1);
  EXPECT_EQ(h1.w(), 2);
  EXPECT_EQ(h1.edge_count(), 1u);
  const PatternHypergraph h2 = ip2_hypergraph(2);
  EXPECT_EQ(h2.w(), 16);
  EXPECT_EQ(h2.edge_count(), 32u);

  Rng rng(7);
  Scene st;
  for (int t = 0; t < 4; ++t) {
    const DirectionTuple3 d = rdir3(rng, st.f11);
    const SubsetBitmask a = random_set(rng, st.s, 0.5);
    const ComplexGrid grid = ComplexGrid::ip2(2, indicator(a), indicator(a.complement()));
    const Complex via_hyper = t_ternary(h2, st.f11, LabelAssignment::constant(h2, d), grid);
    EXPECT_NEAR(std::abs(via_hyper - t_ip2_local(2, st.f11, d, grid)), 0, 1e-9);
  }
}

TEST(Bipartite, OperatorAndWitnessesMatchOracle) {
  Rng rng(8);
  Scene st;
  const PatternHypergraph F = PatternHypergraph::bipartite(2, 2, {{0, 0}, {1, 1}});
  for (int t = 0; t < 20; ++t) {
    BipartiteLabels labels{{rlabel(rng, 3, 1), rlabel(rng, 3, 1)}, {rlabel(rng, 3, 1), rlabel(rng, 3, 1)}};
    const SubsetBitmask a = random_set(rng, st.s, 0.5);
    const ComplexGrid grid = ComplexGrid::pattern(F, indicator(a), indicator(a.complement()));
    const Complex T = t_bipartite(F, st.lin, labels, grid);
    EXPECT_NEAR(std::abs(T - oracle::t_bipartite(st.g, st.rs, F, labels, grid)), 0, 1e-12);
    const std::uint64_t w = witness_count_bipartite(F, st.lin, labels, a);
    EXPECT_EQ(w, oracle::witnesses_bipartite(st.g, st.rs, F, labels, a));
    EXPECT_EQ(bipartite_normalization(F, st.lin, labels), 9.0 * 9 * 9 * 9);
    EXPECT_NEAR(T.real() * bipartite_normalization(F, st.lin, labels), static_cast<double>(w), 1e-6);
    const CountingGrid cg = CountingGrid::pattern(F, counting_indicator(a), counting_indicator(a.complement()));
    EXPECT_EQ(bipartite_raw_sum(F, st.lin, labels, cg), static_cast<__int128>(w));
  }
}

TEST(Bipartite, Examples) {
  Rng rng(9);
  Scene st;
  const SubsetBitmask a = random_set(rng, st.s, 0.4);
  const PatternHypergraph edge = PatternHypergraph::bipartite(1, 1, {{0, 0}});
  const BipartiteLabels l1 = BipartiteLabels::constant(edge, {1}, {1});
  const ComplexGrid g1 = ComplexGrid::pattern(edge, indicator(a), indicator(a.complement()));
  double hits = 0;
  for (Index x : oracle::coset(st.g, st.rs, {2})) hits += a.contains(x);
  EXPECT_NEAR(t_bipartite(edge, st.lin, l1, g1).real(), hits / 9, 1e-12);

  SubsetBitmask cosets(st.s);
  for (Index x : oracle::coset(st.g, st.rs, {0})) cosets.insert(x);
  for (Index x : oracle::coset(st.g, st.rs, {2})) cosets.insert(x);
  const PatternHypergraph k22 = PatternHypergraph::bipartite(2, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  const ComplexGrid g2 = ComplexGrid::pattern(k22, indicator(cosets), indicator(cosets.complement()));
  const BipartiteLabels l2{{{0}, {1}}, {{0}, {1}}};
  // Targets are 0, 1, 1, 2: densities 1, 0, 0, 1.
  EXPECT_NEAR(std::abs(t_bipartite(k22, st.lin, l2, g2)), 0.0, 1e-12);
  const BipartiteLabels l3{{{0}, {0}}, {{0}, {2}}};
  EXPECT_NEAR(std::abs(t_bipartite(k22, st.lin, l3, g2) - 1.0), 0.0, 1e-12);
}

TEST(Bipartite, MultiLocalControl) {
  Rng rng(10);
  Scene st;
  const PatternHypergraph F = PatternHypergraph::bipartite(2, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
  for (int t = 0; t < 30; ++t) {
    BipartiteLabels labels{{rlabel(rng, 3, 1), rlabel(rng, 3, 1)}, {rlabel(rng, 3, 1), rlabel(rng, 3, 1)}};
    const ComplexGrid grid = random_grid(rng, {2, 2, 1}, st.s);
    double m = 1e300;
    for (int u = 0; u < 2; ++u)
      for (int v = 0; v < 2; ++v)
        m = std::min(m, local_u2_norm(LocalContext2(st.lin, {labels.du[static_cast<std::size_t>(u)], labels.dv[static_cast<std::size_t>(v)]}),
                                      grid.at(u, v)));
    EXPECT_LE(std::abs(t_bipartite(F, st.lin, labels, grid)), m + 1e-9);
  }
}

TEST(Ternary, WitnessIdentityAgainstEnumeration) {
  Rng rng(11);
  Scene st;
  const auto of = oracle::factor_from(st.g, st.f11);
  const std::vector<PatternHypergraph> shapes{
      PatternHypergraph::ternary(1, 1, 1, {{0, 0, 0}}), PatternHypergraph::ternary(1, 1, 1, {}),
      PatternHypergraph::ternary(2, 1, 2, {{0, 0, 0}, {1, 0, 1}}),
      PatternHypergraph::ternary(2, 2, 2, {{0, 0, 0}, {1, 1, 1}, {0, 1, 0}})};
  for (int t = 0; t < 20; ++t) {
    const PatternHypergraph& F = shapes[static_cast<std::size_t>(t) % shapes.size()];
    const LabelAssignment e = random_assignment(rng, F, st.f11);
    const SubsetBitmask a = random_set(rng, st.s, 0.5);
    const oracle::TernaryCounts ref = oracle::ternary_counts(of, F, e, a);
    EXPECT_EQ(if_enumerate(F, st.f11, e), ref.configurations);
    const std::uint64_t w = witness_count_ternary(F, st.f11, e, a);
    EXPECT_EQ(w, ref.witnesses);
    const ComplexGrid grid = ComplexGrid::pattern(F, indicator(a), indicator(a.complement()));
    const CountingGrid cg = CountingGrid::pattern(F, counting_indicator(a), counting_indicator(a.complement()));
    EXPECT_EQ(ternary_raw_sum(F, st.f11, e, cg), static_cast<__int128>(w));
    const double norm = ternary_normalization(F, st.f11, e).value();
    EXPECT_NEAR(t_ternary(F, st.f11, e, grid).real() * norm, static_cast<double>(w), 1e-6 * std::max(1.0, static_cast<double>(w)));
  }
}

TEST(Ternary, TrivialPatterns) {
  Rng rng(12);
  Scene st;
  const PatternHypergraph triple = PatternHypergraph::ternary(1, 1, 1, {{0, 0, 0}});
  const PatternHypergraph none = PatternHypergraph::ternary(1, 1, 1, {});
  for (int t = 0; t < 5; ++t) {
    const LabelAssignment e = random_assignment(rng, triple, st.f11);
    const SubsetBitmask full = SubsetBitmask::full(st.s), empty(st.s);
    EXPECT_EQ(witness_count_ternary(triple, st.f11, e, full), if_enumerate(triple, st.f11, e));
    EXPECT_EQ(witness_count_ternary(none, st.f11, e, empty), if_enumerate(none, st.f11, e));
    const double norm = ternary_normalization(triple, st.f11, e).value();
    const ComplexGrid g = ComplexGrid::pattern(triple, indicator(full), indicator(empty));
    EXPECT_NEAR(t_ternary(triple, st.f11, e, g).real() * norm, static_cast<double>(if_enumerate(triple, st.f11, e)), 1e-6);
  }
}

TEST(WeightedDensity, ExamplesAndOracle) {
  Rng rng(13);
  Scene st;
  const auto of = oracle::factor_from(st.g, st.f11);
  const PatternHypergraph triple = PatternHypergraph::ternary(1, 1, 1, {{0, 0, 0}});
  for (int t = 0; t < 6; ++t) {
    const DirectionTuple3 d = rdir3(rng, st.f11);
    const LocalContext3 ctx(st.f11, d);
    const WeightedDensity full = weighted_ternary_density(st.f11, d, SubsetBitmask::full(st.s));
    EXPECT_NEAR(full.value, full.weight, 1e-12);
    EXPECT_NEAR(full.alpha, 1.0, 1e-12);

    SubsetBitmask off = SubsetBitmask::full(st.s);
    for (Index x : ctx.target_members()) off.erase(x);
    EXPECT_NEAR(weighted_ternary_density(st.f11, d, off).value, 0.0, 1e-12);

    const SubsetBitmask a = random_set(rng, st.s, 0.5);
    const LabelAssignment e = LabelAssignment::constant(triple, d);
    const oracle::TernaryCounts ref = oracle::ternary_counts(of, triple, e, a);
    const double sizes = static_cast<double>(of.atom(d.a1).size() * of.atom(d.a2).size() * of.atom(d.a3).size());
    double levels = 1;
    for (const Label* b : {&d.b12, &d.b13, &d.b23}) levels *= static_cast<double>(of.beta_size(*b)) / 729.0;
    EXPECT_NEAR(weighted_ternary_density(st.f11, d, a).value, static_cast<double>(ref.witnesses) / (sizes * levels), 1e-10);
  }
}

TEST(Operators, CapExceeded) {
  const Space big(3, 6);
  const auto bone = GroupFunction::constant(big, 1.0);
  try {
    (void)t_ip2(2, ComplexGrid::ip2(2, bone, bone));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CapExceeded);
  }
}
