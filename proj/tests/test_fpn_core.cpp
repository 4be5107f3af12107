#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qflab/fpn_core.hpp"
#include "qflab/random.hpp"

using namespace qflab;

namespace {

IntMatrix mat(std::initializer_list<std::initializer_list<int>> rows) {
  const int n = static_cast<int>(rows.size());
  IntMatrix m(n, n);
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (int v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

/// Rank by Gaussian elimination written out separately, used as the reference.
int reference_rank(IntMatrix m, int p) {
  int rank = 0;
  for (int c = 0; c < m.cols() && rank < m.rows(); ++c) {
    int piv = -1;
    for (int r = rank; r < m.rows(); ++r)
      if (((m(r, c) % p) + p) % p != 0) piv = r;
    if (piv < 0) continue;
    m.row(piv).swap(m.row(rank));
    int inv = 1;
    while ((((m(rank, c) * inv) % p) + p) % p != 1) ++inv;
    for (int r = 0; r < m.rows(); ++r) {
      if (r == rank) continue;
      const int f = ((m(r, c) * inv) % p + p) % p;
      for (int k = 0; k < m.cols(); ++k) m(r, k) = (((m(r, k) - f * m(rank, k)) % p) + p) % p;
    }
    ++rank;
  }
  return rank;
}

}  // namespace

TEST(Enumerate, ResidueListAndIndexFormula) {
  const auto one = enumerate_group(3, 1);
  ASSERT_EQ(one.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(one[static_cast<std::size_t>(i)].coords(0), i);

  const auto two = enumerate_group(3, 2);
  ASSERT_EQ(two.size(), 9u);
  GroupVector v(3, IntVector::Zero(2));
  v.coords << 1, 2;
  EXPECT_EQ(v.index(), 7u);
  EXPECT_EQ(two[7], v);
  for (Index i = 0; i < 9; ++i) EXPECT_EQ(two[i].index(), i);

  const auto zero = enumerate_group(5, 0);
  ASSERT_EQ(zero.size(), 1u);
  EXPECT_EQ(zero[0].n(), 0);
}

TEST(Enumerate, CapExceeded) {
  try {
    enumerate_group(3, 5, 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::CapExceeded);
  }
  EXPECT_THROW(Space(13, 6), Error);
}

TEST(Field, RejectsNonPrimes) {
  EXPECT_THROW(FieldPrime(2), Error);
  EXPECT_THROW(FieldPrime(9), Error);
  EXPECT_THROW(FieldPrime(17), Error);
  const FieldPrime f(7);
  for (int a = 1; a < 7; ++a) EXPECT_EQ(f.mul(a, f.inv(a)), 1);
}

TEST(SpaceArithmetic, MatchesDigitOracle) {
  for (int p : {3, 5}) {
    const Space s(p, 3);
    const oracle::Grp g(p, 3);
    for (Index a = 0; a < s.size(); a += 3)
      for (Index b = 0; b < s.size(); b += 2) {
        EXPECT_EQ(s.add(a, b), g.add(a, b));
        EXPECT_EQ(s.add(s.sub(a, b), b), a);
        EXPECT_EQ(s.dot(a, b), g.dot(a, b));
      }
  }
}

TEST(Rank, Examples) {
  EXPECT_EQ(matrix_rank(SymmetricForm::zero(3, 3)), 0);
  EXPECT_EQ(matrix_rank(SymmetricForm::identity(3, 3)), 3);
  EXPECT_EQ(matrix_rank(SymmetricForm(3, mat({{1, 2}, {2, 1}}))), 1);
  EXPECT_EQ(reference_rank(mat({{1, 2}, {2, 1}}), 3), 1);
}

TEST(Rank, AgreesWithReferenceOnRandomForms) {
  Rng rng(11);
  for (int t = 0; t < 200; ++t) {
    const int p = t % 2 ? 3 : 5;
    const SymmetricForm m = random_form(rng, p, 4);
    EXPECT_EQ(matrix_rank(m), reference_rank(m.entries(), p));
  }
}

TEST(Rank, AsymmetricFormRejected) {
  try {
    SymmetricForm(3, mat({{1, 1}, {0, 1}}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::AsymmetricForm);
  }
}

TEST(RestrictForm, Examples) {
  const SymmetricForm i3 = SymmetricForm::identity(3, 3);
  std::vector<GroupVector> full;
  for (int i = 0; i < 3; ++i) full.push_back(GroupVector::unit(3, 3, i));
  EXPECT_EQ(restrict_form(i3, full), i3);
  const SymmetricForm r = restrict_form(i3, {GroupVector::unit(3, 3, 0), GroupVector::unit(3, 3, 1)});
  EXPECT_EQ(r, SymmetricForm::identity(3, 2));
  EXPECT_EQ(matrix_rank(r), 2);
  const GroupVector e1 = GroupVector::unit(3, 3, 0);
  try {
    restrict_form(i3, {e1, e1.scaled(2)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DependentBasis);
  }
}

TEST(RestrictForm, RankDropBoundedByCodimension) {
  Rng rng(5);
  int tested = 0, beyond_one = 0;
  for (int t = 0; t < 400 && tested < 100; ++t) {
    const int n = 5;
    const SymmetricForm m = random_form(rng, 3, n);
    const GroupVector r = random_vector(rng, 3, n);
    if (r.is_zero()) continue;
    const auto basis = kernel_basis({r}, 3, n);
    ASSERT_EQ(basis.size(), 4u);
    const SymmetricForm w = restrict_form(m, basis);
    IntMatrix b(n, 4);
    for (int j = 0; j < 4; ++j) b.col(j) = basis[static_cast<std::size_t>(j)].coords;
    IntMatrix explicit_restriction = b.transpose() * m.entries() * b;
    explicit_restriction = explicit_restriction.unaryExpr([](int v) { return ((v % 3) + 3) % 3; });
    EXPECT_EQ(w.entries(), explicit_restriction);
    EXPECT_GE(matrix_rank(w), matrix_rank(m) - 2);
    beyond_one += matrix_rank(w) < matrix_rank(m) - 1;
    ++tested;
  }
  EXPECT_EQ(tested, 100);
  RecordProperty("drops_beyond_codimension", beyond_one);
}

TEST(RestrictForm, HyperbolicPlaneLosesTwoOnALine) {
  IntMatrix h = IntMatrix::Zero(2, 2);
  h(0, 1) = h(1, 0) = 1;
  const SymmetricForm m(3, h);
  ASSERT_EQ(matrix_rank(m), 2);
  EXPECT_EQ(matrix_rank(restrict_form(m, {GroupVector::unit(3, 2, 0)})), 0);
}

TEST(RestrictForm, RankFourOnCodimensionOne) {
  Rng rng(8);
  int tested = 0;
  while (tested < 30) {
    const SymmetricForm m = random_form(rng, 3, 5);
    if (matrix_rank(m) != 4) continue;
    const GroupVector r = random_vector(rng, 3, 5);
    if (r.is_zero()) continue;
    EXPECT_GE(matrix_rank(restrict_form(m, kernel_basis({r}, 3, 5))), 2);
    ++tested;
  }
}

TEST(LinearCharSum, ExactForAllSmallGroups) {
  for (int p : {3, 5, 7}) {
    for (int n = 0; n <= 5; ++n) {
      if (ipow(p, n) > ipow(3, 5)) continue;
      for (const auto& r : enumerate_group(p, n)) {
        const CyclotomicValue v = linear_char_sum_exact(r);
        ASSERT_TRUE(v.is_integer());
        EXPECT_EQ(v.integer_value(), r.is_zero() ? ipow(p, n) : 0);
        EXPECT_EQ(linear_char_sum(r), Complex(r.is_zero() ? 1.0 : 0.0, 0.0));
      }
    }
  }
  EXPECT_EQ(multi_char_sum(5, {0, 0, 0}), Complex(1.0, 0.0));
  EXPECT_NEAR(std::abs(multi_char_sum(5, {0, 2, 0})), 0.0, 1e-12);
}

TEST(QuadCharSum, Examples) {
  const GroupVector zero = GroupVector::zero(3, 2);
  EXPECT_NEAR(std::abs(quad_char_sum(SymmetricForm::zero(3, 2), zero) - 1.0), 0, 1e-12);
  EXPECT_NEAR(std::abs(quad_char_sum(SymmetricForm::zero(3, 2), GroupVector::unit(3, 2, 0))), 0, 1e-12);
  const Complex v = quad_char_sum(SymmetricForm::identity(3, 2), zero);
  EXPECT_NEAR(v.real(), -1.0 / 3, 1e-12);
  EXPECT_NEAR(v.imag(), 0.0, 1e-12);
  EXPECT_EQ(quad_char_sum_exact(SymmetricForm::identity(3, 2), zero), CyclotomicValue::integer(3, -3));
}

TEST(QuadCharSum, BoundAndOracle) {
  Rng rng(21);
  const oracle::Grp g(3, 4);
  for (int t = 0; t < 200; ++t) {
    const SymmetricForm m = random_form(rng, 3, 4);
    const GroupVector b = random_vector(rng, 3, 4);
    const Complex v = quad_char_sum(m, b);
    Complex direct = 0;
    const Index bi = b.index();
    for (Index x = 0; x < g.size; ++x) direct += g.w(g.form(m.entries(), x, x) + g.dot(bi, x));
    direct /= static_cast<double>(g.size);
    EXPECT_NEAR(std::abs(v - direct), 0.0, 1e-10);
    EXPECT_LE(std::abs(v), std::pow(3.0, -matrix_rank(m) / 2.0) + 1e-9);
  }
}

TEST(BilinearCharSum, Examples) {
  const GroupVector z = GroupVector::zero(3, 2);
  EXPECT_NEAR(std::abs(bilinear_char_sum(SymmetricForm::zero(3, 2), z, z) - 1.0), 0, 1e-12);
  EXPECT_NEAR(std::abs(bilinear_char_sum(SymmetricForm::identity(3, 2), z, z) - 1.0 / 9), 0, 1e-12);
  EXPECT_NEAR(std::abs(bilinear_char_sum(SymmetricForm::zero(3, 2), GroupVector::unit(3, 2, 1), z)), 0, 1e-12);
}

TEST(BilinearCharSum, BoundAndOracle) {
  Rng rng(22);
  const oracle::Grp g(3, 4);
  for (int t = 0; t < 200; ++t) {
    const SymmetricForm m = random_form(rng, 3, 4);
    const GroupVector c = random_vector(rng, 3, 4), d = random_vector(rng, 3, 4);
    const Complex v = bilinear_char_sum(m, c, d);
    if (t < 20) {
      Complex direct = 0;
      for (Index x = 0; x < g.size; ++x)
        for (Index y = 0; y < g.size; ++y) direct += g.w(g.form(m.entries(), x, y) + g.dot(c.index(), x) + g.dot(d.index(), y));
      direct /= static_cast<double>(g.size) * g.size;
      EXPECT_NEAR(std::abs(v - direct), 0.0, 1e-10);
    }
    EXPECT_LE(std::abs(v), std::pow(3.0, -matrix_rank(m)) + 1e-9);
  }
}

TEST(Cyclotomic, RingLawsAndExactModulus) {
  Rng rng(3);
  for (int p : {3, 5, 7}) {
    const auto rnd = [&] {
      CyclotomicValue::Coeffs c(p - 1);
      for (auto& v : c) v = static_cast<long long>(rng.below(21)) - 10;
      return CyclotomicValue(p, c);
    };
    for (int t = 0; t < 50; ++t) {
      const auto a = rnd(), b = rnd(), c = rnd();
      EXPECT_EQ((a * b) * c, a * (b * c));
      EXPECT_EQ(a * (b + c), a * b + a * c);
      EXPECT_EQ(a + b, b + a);
      EXPECT_EQ(a - a, CyclotomicValue(p));
      const double exact = a.abs2_exact().to_complex().real();
      const double fl = std::norm(a.to_complex());
      EXPECT_LE(std::abs(exact - fl), 1e-9 * std::max(1.0, fl));
      EXPECT_NEAR(a.abs2_exact().to_complex().imag(), 0.0, 1e-9);
    }
    CyclotomicValue sum(p);
    for (int k = 0; k < p; ++k) sum = sum + CyclotomicValue::omega_power(p, k);
    EXPECT_TRUE(sum.is_zero());
  }
}
