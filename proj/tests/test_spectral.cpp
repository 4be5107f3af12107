#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qflab/random.hpp"
#include "qflab/spectral.hpp"

using namespace qflab;

namespace {

double l2(const GroupFunction& f) { return l2_norm(f); }

double l2_spec(const SpectrumTable& s) { return std::sqrt(s.power_sum(2)); }

Octuple random_octuple(Rng& rng, const Space& s) {
  Octuple f = diagonal_octuple(GroupFunction(s));
  for (auto& g : f) g = random_bounded_function(rng, s);
  return f;
}

}  // namespace

TEST(Fourier, MatchesNaiveDft) {
  Rng rng(1);
  for (int p : {3, 5}) {
    const Space s(p, 3);
    const oracle::Grp g(p, 3);
    const GroupFunction f = random_function(rng, s);
    const auto ref = oracle::dft(g, f);
    const SpectrumTable fast = fourier_transform(f, FourierMethod::Fast);
    const SpectrumTable naive = fourier_transform(f, FourierMethod::Naive);
    for (Index t = 0; t < s.size(); ++t) {
      EXPECT_NEAR(std::abs(fast(t) - ref[t]), 0, 1e-10);
      EXPECT_NEAR(std::abs(naive(t) - fast(t)), 0, 1e-10);
    }
  }
}

TEST(Fourier, Examples) {
  const Space s(3, 3);
  SubsetBitmask zero(s);
  zero.insert(0);
  const SpectrumTable d = fourier_transform(indicator(zero));
  for (Index t = 0; t < s.size(); ++t) EXPECT_NEAR(std::abs(d(t) - 1.0 / 27), 0, 1e-12);

  const GroupVector t0 = GroupVector::from_index(3, 3, 14);
  const SpectrumTable c = fourier_transform(character(s, t0));
  for (Index t = 0; t < s.size(); ++t) EXPECT_NEAR(std::abs(c(t) - (t == 14 ? 1.0 : 0.0)), 0, 1e-12);
}

TEST(Fourier, ParsevalAndInversion) {
  Rng rng(2);
  const Space s(3, 4);
  for (int t = 0; t < 100; ++t) {
    const GroupFunction f = random_function(rng, s);
    const SpectrumTable F = fourier_transform(f);
    EXPECT_NEAR(l2(f), l2_spec(F), 1e-9);
    EXPECT_LE((inverse_transform(F).values() - f.values()).cwiseAbs().maxCoeff(), 1e-9);
    if (t < 5) {
      EXPECT_LE((inverse_transform(F, FourierMethod::Naive).values() - f.values()).cwiseAbs().maxCoeff(), 1e-9);
    }
  }
}

TEST(U2, InnerMatchesNaive) {
  Rng rng(3);
  const Space s(3, 3);
  const oracle::Grp g(3, 3);
  for (int t = 0; t < 3; ++t) {
    const auto a = random_bounded_function(rng, s), b = random_bounded_function(rng, s),
               c = random_bounded_function(rng, s), d = random_bounded_function(rng, s);
    const Complex ref = oracle::u2_inner(g, a, b, c, d);
    EXPECT_NEAR(std::abs(u2_inner(a, b, c, d, GowersMethod::Factorized) - ref), 0, 1e-10);
    EXPECT_NEAR(std::abs(u2_inner(a, b, c, d, GowersMethod::Fourier) - ref), 0, 1e-10);
  }
}

TEST(U2, ExamplesAndFourierChain) {
  const Space s(3, 3);
  EXPECT_NEAR(u2_norm(GroupFunction::constant(s, Complex(0.0, -0.7))), 0.7, 1e-12);
  EXPECT_NEAR(u2_norm(character(s, GroupVector::from_index(3, 3, 5))), 1.0, 1e-12);
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const GroupFunction f = random_bounded_function(rng, s);
    const SpectrumTable F = fourier_transform(f);
    const double u4 = std::pow(u2_norm(f), 4);
    const double sup = F.sup_norm();
    EXPECT_NEAR(u4, F.power_sum(4), 1e-9);
    EXPECT_LE(std::pow(sup, 4), u4 + 1e-9);
    EXPECT_LE(u4, sup * sup + 1e-9);
    EXPECT_NEAR(u2_norm(f, GowersMethod::Fourier), u2_norm(f), 1e-10);
  }
}

TEST(U3, InnerMatchesNaiveSixFoldSum) {
  Rng rng(5);
  const Space s(3, 2);
  const oracle::Grp g(3, 2);
  for (int t = 0; t < 3; ++t) {
    const Octuple f = random_octuple(rng, s);
    const Complex ref = oracle::u3_inner(g, f);
    EXPECT_NEAR(std::abs(u3_inner(f, GowersMethod::Factorized) - ref), 0, 1e-10);
    EXPECT_NEAR(std::abs(u3_inner(f, GowersMethod::Fourier) - ref), 0, 1e-10);
  }
}

TEST(U3, ExamplesNestingAndInduction) {
  const Space s(3, 3);
  EXPECT_NEAR(u3_norm(GroupFunction::constant(s, 1.0)), 1.0, 1e-12);
  Rng rng(6);
  for (int t = 0; t < 10; ++t) {
    const SymmetricForm m = random_form(rng, 3, 3);
    EXPECT_NEAR(u3_norm(quadratic_phase(m)), 1.0, 1e-10);
    const GroupFunction f = random_bounded_function(rng, s);
    const double u3 = u3_norm(f);
    EXPECT_LE(u2_norm(f), u3 + 1e-9);
    EXPECT_NEAR(std::pow(u3, 8), u3_inductive_eighth_power(f), 1e-9);
    EXPECT_NEAR(u3_norm(f, GowersMethod::Fourier), u3, 1e-10);
  }
}

TEST(U3, NegativeDiagonalRejected) {
  try {
    (void)diagonal_root(Complex(-0.5, 0.0), 8, 1e-9);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NegativeDiagonal);
  }
  EXPECT_EQ(diagonal_root(Complex(-1e-12, 0.0), 4, 1e-9), 0.0);
}

TEST(Gcs, GlobalGowersCauchySchwarz) {
  Rng rng(7);
  const Space s(3, 3);
  for (int t = 0; t < 50; ++t) {
    const Octuple f = random_octuple(rng, s);
    double prod = 1;
    for (const auto& g : f) prod *= u3_norm(g);
    EXPECT_LE(std::abs(u3_inner(f)), prod + 1e-9);
    const double u2prod = u2_norm(f[0]) * u2_norm(f[1]) * u2_norm(f[2]) * u2_norm(f[3]);
    EXPECT_LE(std::abs(u2_inner(f[0], f[1], f[2], f[3])), u2prod + 1e-9);
  }
}

TEST(Triangle, GlobalNorms) {
  Rng rng(8);
  const Space s(3, 3);
  for (int t = 0; t < 30; ++t) {
    const GroupFunction f = random_bounded_function(rng, s), g = random_bounded_function(rng, s);
    EXPECT_LE(u2_norm(f + g), u2_norm(f) + u2_norm(g) + 1e-9);
    EXPECT_LE(u3_norm(f + g), u3_norm(f) + u3_norm(g) + 1e-9);
    const Complex c(0.6, -1.1);
    EXPECT_NEAR(u2_norm(f * c), std::abs(c) * u2_norm(f), 1e-10);
    EXPECT_NEAR(u3_norm(f * c), std::abs(c) * u3_norm(f), 1e-10);
  }
}

TEST(Ap, AveragesMatchNaiveAndBounds) {
  Rng rng(9);
  const Space s(3, 3);
  const oracle::Grp g(3, 3);
  EXPECT_NEAR(std::abs(ap3_average(GroupFunction::constant(s, 1.0)) - 1.0), 0, 1e-12);
  EXPECT_NEAR(std::abs(ap4_average(GroupFunction::constant(s, 1.0)) - 1.0), 0, 1e-12);
  EXPECT_NEAR(std::abs(ap3_average(character(s, GroupVector::from_index(3, 3, 7))) - 1.0), 0, 1e-12);
  const Space s5(5, 2);
  EXPECT_NEAR(std::abs(ap3_average(character(s5, GroupVector::from_index(5, 2, 7)))), 0, 1e-12);
  for (int t = 0; t < 20; ++t) {
    const GroupFunction f = t % 2 ? random_bounded_function(rng, s) : balanced(random_set(rng, s, 0.5), 0.5);
    const Complex a3 = ap3_average(f), a4 = ap4_average(f);
    EXPECT_NEAR(std::abs(a3 - oracle::ap(g, f, 3)), 0, 1e-10);
    EXPECT_NEAR(std::abs(a4 - oracle::ap(g, f, 4)), 0, 1e-10);
    EXPECT_LE(std::abs(a3), fourier_transform(f).sup_norm() + 1e-9);
    EXPECT_LE(std::abs(a4), u3_norm(f) + 1e-9);
  }
}

TEST(Ap4, BoundUnderL2Normalisation) {
  Rng rng(10);
  const Space s(5, 2);
  for (int t = 0; t < 20; ++t) {
    GroupFunction f = random_function(rng, s);
    f = f * Complex(1.0 / l2_norm(f), 0.0);
    EXPECT_LE(std::abs(ap4_average(f)), u3_norm(f) + 1e-9);
  }
}

TEST(InverseOracle, RecoversConjugateForm) {
  Rng rng(11);
  const Space s(3, 3);
  for (int t = 0; t < 5; ++t) {
    const SymmetricForm m0 = random_form(rng, 3, 3);
    const GroupFunction f = quadratic_phase(m0);
    const QuadraticCorrelation c = max_quadratic_correlation(f);
    EXPECT_NEAR(c.value, 1.0, 1e-9);
    EXPECT_EQ(c.candidates, 729u);
    const GroupFunction product = f.cwise(quadratic_phase(c.m));
    for (Index x = 0; x < s.size(); ++x) EXPECT_NEAR(std::abs(product(x) - product(0)), 0, 1e-9);
    EXPECT_EQ(c.m, m0.scaled(2));
  }
}

TEST(InverseOracle, ZeroFunctionAndAtomScan) {
  const Space s2(3, 2);
  const QuadraticCorrelation z = max_quadratic_correlation(GroupFunction(s2));
  EXPECT_EQ(z.value, 0.0);
  EXPECT_EQ(z.m, SymmetricForm::zero(3, 2));

  SubsetBitmask atom(s2);
  for (Index x = 0; x < s2.size(); ++x)
    if ((s2.coord(x, 0) * s2.coord(x, 0) + s2.coord(x, 1) * s2.coord(x, 1)) % 3 == 0) atom.insert(x);
  const GroupFunction f = balanced(atom, static_cast<double>(atom.count()) / 9);
  const QuadraticCorrelation c = max_quadratic_correlation(f);
  EXPECT_EQ(c.candidates, 27u);
  const oracle::Grp g(3, 2);
  double best = -1;
  for (const auto& e : {0, 1, 2})
    for (int b = 0; b < 3; ++b)
      for (int d = 0; d < 3; ++d) {
        IntMatrix m(2, 2);
        m << e, b, b, d;
        Complex sum = 0;
        for (Index x = 0; x < 9; ++x) sum += f(x) * g.w(g.form(m, x, x));
        best = std::max(best, std::abs(sum) / 9);
      }
  EXPECT_NEAR(c.value, best, 1e-12);
}

TEST(InverseOracle, CapExceeded) {
  const Space s(3, 5);
  try {
    (void)max_quadratic_correlation(GroupFunction(s));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CapExceeded);
  }
}
