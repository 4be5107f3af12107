#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qflab/local_norms.hpp"
#include "qflab/random.hpp"

using namespace qflab;

namespace {

Label rlabel(Rng& rng, int p, int len) {
  Label l(static_cast<std::size_t>(len));
  for (auto& v : l) v = rng.residue(p);
  return l;
}

DirectionTuple2 rdir2(Rng& rng, int p, int ell) { return {rlabel(rng, p, ell), rlabel(rng, p, ell)}; }

DirectionTuple3 rdir3(Rng& rng, const QuadraticFactor& f) {
  for (;;) {
    DirectionTuple3 d{rlabel(rng, f.p(), f.label_length()), rlabel(rng, f.p(), f.label_length()),
                      rlabel(rng, f.p(), f.label_length()), rlabel(rng, f.p(), f.q()),
                      rlabel(rng, f.p(), f.q()), rlabel(rng, f.p(), f.q())};
    if (!LocalContext3(f, d).degenerate()) return d;
  }
}

Octuple random_octuple(Rng& rng, const Space& s) {
  Octuple f = diagonal_octuple(GroupFunction(s));
  for (auto& g : f) g = random_bounded_function(rng, s);
  return f;
}

struct Scene {
  Space s{3, 3};
  oracle::Grp g{3, 3};
  LinearFactor lin{s, {GroupVector::unit(3, 3, 0)}};
  QuadraticFactor f11{lin, {SymmetricForm::identity(3, 3)}};
  QuadraticFactor f10{lin};
};

}  // namespace

TEST(LocalU2, InnerMatchesDefinition) {
  Scene st;
  Rng rng(1);
  const std::vector<Index> rs{GroupVector::unit(3, 3, 0).index()};
  for (int t = 0; t < 10; ++t) {
    const DirectionTuple2 d = rdir2(rng, 3, 1);
    const LocalContext2 ctx(st.lin, d);
    const auto a = random_bounded_function(rng, st.s), b = random_bounded_function(rng, st.s),
               c = random_bounded_function(rng, st.s), e = random_bounded_function(rng, st.s);
    const Complex ref = oracle::local_u2_inner(st.g, rs, d, a, b, c, e);
    EXPECT_NEAR(std::abs(local_u2_inner(ctx, a, b, c, e, LocalU2Method::Direct) - ref), 0, 1e-10);
    EXPECT_NEAR(std::abs(local_u2_inner(ctx, a, b, c, e, LocalU2Method::Fourier) - ref), 0, 1e-10);
  }
}

TEST(LocalU2, Examples) {
  Scene st;
  const LocalContext2 ctx(st.lin, {{1}, {2}});
  EXPECT_NEAR(local_u2_norm(ctx, GroupFunction::constant(st.s, Complex(0.4, 0.3))), 0.5, 1e-12);
  SubsetBitmask off(st.s);
  for (Index x = 0; x < st.s.size(); ++x)
    if (st.s.coord(x, 0) != 0) off.insert(x);
  EXPECT_NEAR(local_u2_norm(ctx, indicator(off)), 0.0, 1e-12);
  Rng rng(2);
  const GroupFunction f = random_bounded_function(rng, st.s);
  EXPECT_NEAR(local_u2_norm(LocalContext2(st.lin, {{0}, {1}}), f), local_u2_norm(LocalContext2(st.lin, {{2}, {2}}), f),
              1e-12);
}

TEST(LocalU2, SigmaInvarianceAndSemiNorm) {
  Scene st;
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const DirectionTuple2 d = rdir2(rng, 3, 1);
    DirectionTuple2 e = d;
    const int shift = rng.residue(3);
    e.a1[0] = (e.a1[0] + shift) % 3;
    e.a2[0] = (e.a2[0] + 3 - shift) % 3;
    const GroupFunction f = random_bounded_function(rng, st.s), g = random_bounded_function(rng, st.s);
    const LocalContext2 c1(st.lin, d), c2(st.lin, e);
    EXPECT_NEAR(local_u2_norm(c1, f), local_u2_norm(c2, f), 1e-12);
    EXPECT_LE(local_u2_norm(c1, f + g), local_u2_norm(c1, f) + local_u2_norm(c1, g) + 1e-9);
    const Complex c(-0.3, 0.8);
    EXPECT_NEAR(local_u2_norm(c1, f * c), std::abs(c) * local_u2_norm(c1, f), 1e-12);
  }
}

TEST(RestrictedFourier, LocalU2IdentityAndZIndependence) {
  const Space s(3, 4);
  const oracle::Grp g(3, 4);
  const LinearFactor lin(s, {GroupVector::unit(3, 4, 1)});
  const std::vector<Index> rs{GroupVector::unit(3, 4, 1).index()};
  Rng rng(4);
  const SpectrumTable one = restricted_fourier(GroupFunction::constant(s, 1.0), lin, GroupVector::zero(3, 4));
  for (Eigen::Index t = 0; t < one.values.size(); ++t) EXPECT_NEAR(std::abs(one.values[t] - (t == 0 ? 1.0 : 0.0)), 0, 1e-12);
  for (int t = 0; t < 5; ++t) {
    const DirectionTuple2 d = rdir2(rng, 3, 1);
    const GroupFunction f = random_bounded_function(rng, s);
    const Complex ref = oracle::local_u2_inner(g, rs, d, f, f, f, f);
    const auto target = oracle::coset(g, rs, sigma2(d, 3));
    const SpectrumTable h1 = restricted_fourier(f, lin, s.vector(target.front()));
    const SpectrumTable h2 = restricted_fourier(f, lin, s.vector(target.back()));
    EXPECT_NEAR(h1.power_sum(4), ref.real(), 1e-9);
    EXPECT_NEAR(h2.power_sum(4), h1.power_sum(4), 1e-9);
  }
}

TEST(LocalU3, InnerMatchesSixFoldDefinition) {
  Scene st;
  Rng rng(5);
  const auto of = oracle::factor_from(st.g, st.f11);
  for (int t = 0; t < 6; ++t) {
    const DirectionTuple3 d = rdir3(rng, st.f11);
    const LocalContext3 ctx(st.f11, d);
    const Octuple f = random_octuple(rng, st.s);
    EXPECT_NEAR(std::abs(local_u3_inner(ctx, f) - oracle::local_u3_inner(of, d, f)), 0, 1e-10);
  }
}

TEST(LocalU3, ConstantPhaseAndOffSupport) {
  Scene st;
  Rng rng(6);
  const auto of = oracle::factor_from(st.g, st.f11);
  const GroupFunction one = GroupFunction::constant(st.s, 1.0);
  const GroupFunction phase = quadratic_phase(SymmetricForm::identity(3, 3));
  for (int t = 0; t < 6; ++t) {
    const DirectionTuple3 d = rdir3(rng, st.f11);
    const LocalContext3 ctx(st.f11, d);
    const Complex weight = oracle::local_u3_inner(of, d, diagonal_octuple(one));
    EXPECT_NEAR(std::pow(local_u3_norm(ctx, one), 8), weight.real(), 1e-10);
    EXPECT_NEAR(std::abs(local_u3_inner(ctx, diagonal_octuple(phase))), weight.real(), 1e-10);

    SubsetBitmask off = SubsetBitmask::full(st.s);
    for (Index x : ctx.target_members()) off.erase(x);
    EXPECT_NEAR(local_u3_norm(ctx, indicator(off)), 0.0, 1e-12);
  }
}

TEST(LocalU3, DegenerateContextRejected) {
  const Space s(3, 2);
  const QuadraticFactor zero(LinearFactor::trivial(s), {SymmetricForm::zero(3, 2)});
  const LocalContext3 ctx(zero, {{0}, {0}, {0}, {1}, {0}, {0}});
  EXPECT_TRUE(ctx.degenerate());
  try {
    (void)local_u3_norm(ctx, GroupFunction::constant(s, 1.0));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateContext);
  }
}

TEST(LocalU3, GowersCauchySchwarz) {
  Scene st;
  Rng rng(7);
  for (int t = 0; t < 50; ++t) {
    const DirectionTuple3 d = rdir3(rng, st.f11);
    const LocalContext3 ctx(st.f11, d);
    const Octuple f = random_octuple(rng, st.s);
    double prod = 1;
    for (const auto& g : f) prod *= local_u3_norm(ctx, g);
    EXPECT_LE(std::abs(local_u3_inner(ctx, f)), prod + 1e-9);
  }
}

TEST(LocalU3, SemiNormAxioms) {
  Scene st;
  Rng rng(8);
  for (const QuadraticFactor* f : {&st.f10, &st.f11}) {
    for (int t = 0; t < 50; ++t) {
      const DirectionTuple3 d = rdir3(rng, *f);
      const LocalContext3 ctx(*f, d);
      const GroupFunction a = random_bounded_function(rng, st.s), b = random_bounded_function(rng, st.s);
      EXPECT_LE(local_u3_norm(ctx, a + b), local_u3_norm(ctx, a) + local_u3_norm(ctx, b) + 1e-9);
      const Complex c(1.2, -0.5);
      EXPECT_NEAR(local_u3_norm(ctx, a * c), std::abs(c) * local_u3_norm(ctx, a), 1e-10);
    }
  }
}

TEST(LocalU3, DependsOnTupleNotOnlySigma) {
  Scene st;
  Rng rng(9);
  const GroupFunction f = random_bounded_function(rng, st.s);
  bool differs = false;
  for (int t = 0; t < 200 && !differs; ++t) {
    const DirectionTuple3 d = rdir3(rng, st.f11);
    const DirectionTuple3 e = rdir3(rng, st.f11);
    if (sigma3(d, 1, 3) != sigma3(e, 1, 3)) continue;
    differs = std::abs(local_u3_norm(LocalContext3(st.f11, d), f) - local_u3_norm(LocalContext3(st.f11, e), f)) > 1e-6;
  }
  EXPECT_TRUE(differs);
}

TEST(LocalU3, DominatesLocalU2OnLinearFactors) {
  Scene st;
  Rng rng(10);
  const GroupFunction one = GroupFunction::constant(st.s, 1.0);
  const DominationResult r1 = local_u3_dominates_check(st.lin, {0}, {1}, {2}, one);
  EXPECT_NEAR(r1.u3, 1.0, 1e-12);
  EXPECT_NEAR(r1.u2, 1.0, 1e-12);
  EXPECT_NEAR(r1.margin, 0.0, 1e-12);
  const DominationResult rc = local_u3_dominates_check(st.lin, {2}, {1}, {1}, character(st.s, GroupVector::unit(3, 3, 2)));
  EXPECT_NEAR(rc.u3, 1.0, 1e-12);
  EXPECT_NEAR(rc.u2, 1.0, 1e-12);
  for (int t = 0; t < 50; ++t) {
    const Label a1 = rlabel(rng, 3, 1), a2 = rlabel(rng, 3, 1), a3 = rlabel(rng, 3, 1);
    const GroupFunction f = random_bounded_function(rng, st.s);
    const DominationResult r = local_u3_dominates_check(st.lin, a1, a2, a3, f);
    EXPECT_GE(r.u3, r.u2 - 1e-9);
    const LocalContext2 ctx2(st.lin, {add_labels(a1, a2, 3), a3});
    EXPECT_NEAR(r.u2, local_u2_norm(ctx2, f), 1e-12);
    const LocalContext3 ctx3(st.f10, {a1, a2, a3, {}, {}, {}});
    EXPECT_NEAR(r.u3, local_u3_norm(ctx3, f), 1e-12);
  }
}
