#include <gtest/gtest.h>

#include <map>
#include <set>

#include "oracles.hpp"
#include "qflab/factor.hpp"
#include "qflab/random.hpp"

using namespace qflab;

namespace {

GroupVector vec(int p, std::vector<int> c) {
  IntVector v(static_cast<int>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) v(static_cast<int>(i)) = c[i];
  return GroupVector(p, v);
}

QuadraticFactor full_rank_single(const Space& s) {
  return new_quadratic_factor(LinearFactor::trivial(s), {SymmetricForm::identity(s.p(), s.n())});
}

}  // namespace

TEST(LinearFactor, Construction) {
  const Space s(3, 3);
  EXPECT_EQ(new_linear_factor(s, {vec(3, {1, 0, 0})}).ell(), 1);
  try {
    new_linear_factor(s, {vec(3, {1, 0, 0}), vec(3, {2, 0, 0})});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DependentVectors);
  }
  EXPECT_EQ(new_linear_factor(s, {vec(3, {1, 1, 0}), vec(3, {0, 1, 1})}).ell(), 2);
}

TEST(QuadraticFactor, RankExamples) {
  const Space s(3, 4);
  EXPECT_EQ(full_rank_single(s).rank(), 4);
  const auto two = new_quadratic_factor(LinearFactor::trivial(s),
                                        {SymmetricForm::identity(3, 4), SymmetricForm::diagonal(3, {1, 1, 0, 0})});
  EXPECT_EQ(two.rank(), 2);
  int brute = 5;
  for (int l1 = 0; l1 < 3; ++l1)
    for (int l2 = 0; l2 < 3; ++l2) {
      if (l1 == 0 && l2 == 0) continue;
      brute = std::min(brute, matrix_rank(SymmetricForm::identity(3, 4).scaled(l1) +
                                          SymmetricForm::diagonal(3, {1, 1, 0, 0}).scaled(l2)));
    }
  EXPECT_EQ(brute, 2);
  EXPECT_EQ(QuadraticFactor(LinearFactor::trivial(s)).rank(), 5);
}

TEST(QuadraticFactor, Errors) {
  const Space s(3, 2);
  std::vector<SymmetricForm> seven(7, SymmetricForm::identity(3, 2));
  try {
    new_quadratic_factor(LinearFactor::trivial(s), seven);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::TooManyForms);
  }
  IntMatrix asym(2, 2);
  asym << 0, 1, 2, 0;
  EXPECT_THROW(SymmetricForm(3, asym), Error);
}

TEST(Atoms, LabelExamples) {
  const Space s2(3, 2);
  const auto b = full_rank_single(s2);
  EXPECT_EQ(atom_of(b, GroupVector::zero(3, 2)), Label({0}));
  EXPECT_EQ(atom_of(b, vec(3, {1, 1})), Label({2}));
  const auto lb = new_quadratic_factor(new_linear_factor(s2, {vec(3, {1, 0})}), {SymmetricForm::identity(3, 2)});
  EXPECT_EQ(atom_of(lb, vec(3, {1, 2})), Label({1, 2}));
}

TEST(Atoms, SizeExamples) {
  const Space s2(3, 2);
  EXPECT_EQ(atom_size(QuadraticFactor(LinearFactor::trivial(s2)), {}), 9u);
  const auto b = full_rank_single(s2);
  EXPECT_EQ(atom_size(b, {0}), 1u);
  EXPECT_EQ(atom_size(b, {1}), 4u);
  EXPECT_EQ(atom_size(b, {2}), 4u);
  const Space s3(3, 3);
  const auto lin = QuadraticFactor(new_linear_factor(s3, {vec(3, {1, 2, 0})}));
  for (int a = 0; a < 3; ++a) EXPECT_EQ(atom_size(lin, {a}), 9u);
}

TEST(Atoms, PartitionExhaustive) {
  Rng rng(4);
  for (int n = 1; n <= 5; ++n) {
    const Space s(3, n);
    const oracle::Grp g(3, n);
    for (int t = 0; t < 3; ++t) {
      std::vector<GroupVector> rs;
      if (t > 0) rs.push_back(GroupVector::unit(3, n, 0));
      std::vector<SymmetricForm> ms;
      for (int j = 0; j < t; ++j) ms.push_back(random_form(rng, 3, n));
      const QuadraticFactor f(LinearFactor(s, rs), ms);
      const oracle::Factor of = oracle::factor_from(g, f);
      std::set<Index> seen;
      std::uint64_t total = 0;
      for (std::uint32_t code = 0; code < f.num_labels(); ++code) {
        for (Index x : f.members(code)) {
          EXPECT_TRUE(seen.insert(x).second);
          EXPECT_EQ(f.label_of(x), f.decode(code));
          EXPECT_EQ(of.label(x), f.decode(code));
        }
        total += f.members(code).size();
      }
      EXPECT_EQ(total, s.size());
    }
  }
}

TEST(BilinearLevelSet, Examples) {
  const Space s(3, 2);
  const auto b = full_rank_single(s);
  const oracle::Grp g(3, 2);
  const auto of = oracle::factor_from(g, b);
  EXPECT_EQ(bilinear_level_set(b, {0}).size, 33u);
  EXPECT_EQ(of.beta_size({0}), 33u);
  EXPECT_EQ(bilinear_level_set(b, {1}).size, 24u);
  EXPECT_EQ(of.beta_size({1}), 24u);
  EXPECT_DOUBLE_EQ(bilinear_level_set(b, {1}).weight(), 81.0 / 24);

  const auto zero = new_quadratic_factor(LinearFactor::trivial(s), {SymmetricForm::zero(3, 2)});
  const auto empty = bilinear_level_set(zero, {1});
  EXPECT_TRUE(empty.empty());
  try {
    (void)empty.weight();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyLevelSet);
  }
}

TEST(BilinearLevelSet, SizesMatchOracle) {
  Rng rng(9);
  const Space s(3, 3);
  const oracle::Grp g(3, 3);
  for (int t = 0; t < 5; ++t) {
    const QuadraticFactor f(LinearFactor::trivial(s), {random_form(rng, 3, 3), random_form(rng, 3, 3)});
    const auto of = oracle::factor_from(g, f);
    for (int b1 = 0; b1 < 3; ++b1)
      for (int b2 = 0; b2 < 3; ++b2) EXPECT_EQ(bilinear_level_set(f, {b1, b2}).size, of.beta_size({b1, b2}));
  }
}

TEST(Projection, ExamplesAndIdempotence) {
  Rng rng(2);
  const Space s(3, 3);
  const auto c = GroupFunction::constant(s, Complex(0.3, -0.2));
  const auto b = full_rank_single(s);
  EXPECT_LE((project_onto_factor(c, b).values() - c.values()).norm(), 1e-12);

  SubsetBitmask atom(s);
  for (Index x : b.members(Label{1})) atom.insert(x);
  EXPECT_LE((project_onto_factor(indicator(atom), b).values() - indicator(atom).values()).norm(), 1e-12);

  const auto lin = QuadraticFactor(new_linear_factor(s, {GroupVector::unit(3, 3, 0)}));
  const GroupFunction f = random_function(rng, s);
  const GroupFunction e = project_onto_factor(f, lin);
  Complex means[3] = {0, 0, 0};
  for (Index x = 0; x < s.size(); ++x) means[s.coord(x, 0)] += f(x) / 9.0;
  for (Index x = 0; x < s.size(); ++x) EXPECT_NEAR(std::abs(e(x) - means[s.coord(x, 0)]), 0, 1e-12);

  for (int t = 0; t < 20; ++t) {
    const GroupVector r = random_vector(rng, 3, 3);
    const QuadraticFactor q(r.is_zero() ? LinearFactor::trivial(s) : LinearFactor(s, {r}), {random_form(rng, 3, 3)});
    const GroupFunction h = random_function(rng, s);
    const GroupFunction ph = project_onto_factor(h, q);
    EXPECT_LE((project_onto_factor(ph, q).values() - ph.values()).norm(), 1e-12);
    EXPECT_NEAR(std::abs(mean(ph) - mean(h)), 0, 1e-12);
  }
}

TEST(Refines, Examples) {
  const Space s(3, 2);
  const auto b = full_rank_single(s);
  EXPECT_TRUE(refines(b, b));
  const auto finer = new_quadratic_factor(new_linear_factor(s, {GroupVector::unit(3, 2, 0)}), {SymmetricForm::identity(3, 2)});
  EXPECT_TRUE(refines(finer, b));
  const QuadraticFactor e1(new_linear_factor(s, {GroupVector::unit(3, 2, 0)}));
  const QuadraticFactor e2(new_linear_factor(s, {GroupVector::unit(3, 2, 1)}));
  EXPECT_FALSE(refines(e1, e2));
  // (0,0) and (0,1) share an e1-atom but not an e2-atom.
  EXPECT_EQ(e1.label_of(0), e1.label_of(3));
  EXPECT_NE(e2.label_of(0), e2.label_of(3));
}

TEST(Sigma, Examples) {
  EXPECT_EQ(sigma2({{0}, {0}}, 3), Label({0}));
  EXPECT_EQ(sigma2({{1, 2}, {2, 2}}, 3), Label({0, 1}));
  DirectionTuple3 d{{0, 0}, {0, 0}, {0, 0}, {1}, {0}, {0}};
  EXPECT_EQ(sigma3(d, 1, 3), Label({0, 2}));
}

TEST(Sigma, MembershipConsistencyExhaustive) {
  const Space s(3, 3);
  const auto f = new_quadratic_factor(new_linear_factor(s, {GroupVector::unit(3, 3, 0)}),
                                      {SymmetricForm::identity(3, 3)});
  std::uint64_t checked = 0;
  for (Index x = 0; x < s.size(); ++x)
    for (Index y = 0; y < s.size(); ++y)
      for (Index z = 0; z < s.size(); ++z) {
        DirectionTuple3 d{f.label_of(x), f.label_of(y), f.label_of(z),
                          f.bilinear_label(x, y), f.bilinear_label(x, z), f.bilinear_label(y, z)};
        ASSERT_EQ(f.label_of(s.add(s.add(x, y), z)), sigma3(d, 1, 3));
        ++checked;
      }
  EXPECT_EQ(checked, 19683u);
}

TEST(AtomSizes, RegularityTrendFullRank) {
  std::vector<double> dev;
  for (int n : {2, 4, 6, 8}) {
    const Space s(3, n);
    const auto b = full_rank_single(s);
    double worst = 0;
    for (int a = 0; a < 3; ++a)
      worst = std::max(worst, std::abs(static_cast<double>(atom_size(b, {a})) * std::pow(3.0, 1 - n) - 1));
    dev.push_back(worst);
  }
  for (std::size_t i = 1; i < dev.size(); ++i) EXPECT_LE(dev[i], dev[i - 1] * 1.05 + 1e-12);
}
