#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "sosperturb/parse.hpp"
#include "sosperturb/polynomial.hpp"

using namespace sosperturb;

namespace {

Polynomial random_poly(std::size_t n, int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Polynomial::TermMap t;
  const MonomialBasis b(n, d);
  for (const auto& a : b.entries()) t[a] = u(rng);
  return Polynomial(n, std::move(t));
}

}  // namespace

TEST(Multidegree, TotalIsSumOfExponents) {
  Multidegree a{3, 0, 2};
  EXPECT_EQ(a.total(), 5);
  EXPECT_EQ((a + Multidegree{1, 1, 1}).total(), 8);
  EXPECT_THROW(Multidegree({1, -1}), InvalidArgument);
  EXPECT_THROW(Multidegree({1}) + Multidegree({1, 0}), DimensionMismatch);
}

TEST(Multidegree, GradedLexOrder) {
  EXPECT_LT(Multidegree({0, 0}), Multidegree({0, 1}));
  EXPECT_LT(Multidegree({1, 0}), Multidegree({0, 1}));
  EXPECT_LT(Multidegree({0, 2}), Multidegree({3, 0}));
  EXPECT_LT(Multidegree({2, 0}), Multidegree({1, 1}));
}

TEST(Basis, TwoVariablesDegreeTwo) {
  const MonomialBasis b = basis(2, 2);
  const std::vector<Multidegree> expected{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  EXPECT_EQ(b.entries(), expected);
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_EQ(b.index_of(b[i]), i);
  EXPECT_EQ(b.index_of(Multidegree{3, 0}), b.size());
}

TEST(Basis, SmallCases) {
  EXPECT_EQ(basis(1, 4).size(), 5u);
  ASSERT_EQ(basis(3, 0).size(), 1u);
  EXPECT_EQ(basis(3, 0)[0], Multidegree::zero(3));
}

TEST(Basis, LengthIsBinomial) {
  for (std::size_t n = 1; n <= 4; ++n) {
    for (int r = 0; r <= 10; ++r) {
      EXPECT_EQ(basis(n, r).size(), binomial(n + r, n)) << "n=" << n << " r=" << r;
    }
  }
}

TEST(Polynomial, DropsZeroTermsAndZeroHasDegreeZero) {
  Polynomial f(1, {{Multidegree{2}, 1e-16}, {Multidegree{0}, 1.0}});
  EXPECT_EQ(f.num_terms(), 1u);
  Polynomial z(3);
  EXPECT_TRUE(z.is_zero());
  EXPECT_EQ(z.degree(), 0);
  EXPECT_TRUE((f - f).is_zero());
}

TEST(Polynomial, Arithmetic) {
  const Polynomial x = Polynomial::variable(1, 0);
  const Polynomial one = Polynomial::constant(1, 1.0);
  EXPECT_EQ(add(one - x * x, x * x), one);
  EXPECT_EQ(mul(x, one - x), x - x * x);
  EXPECT_THROW(add(x, Polynomial::variable(2, 0)), DimensionMismatch);
}

TEST(Polynomial, MotzkinVanishesAtOnes) {
  const Polynomial m = parse("1 + x1^2*x2^2*(x1^2 + x2^2 - 3)", 2);
  EXPECT_DOUBLE_EQ(eval(m, std::vector<double>{1.0, 1.0}), 0.0);
}

TEST(Polynomial, L1Norm) {
  EXPECT_DOUBLE_EQ(l1_norm(parse("1 - x1^2", 1)), 2.0);
  EXPECT_DOUBLE_EQ(l1_norm(Polynomial(2)), 0.0);
  const double eps = 0.125;
  EXPECT_DOUBLE_EQ(l1_norm(theta_big(2, 3) * eps), 3 * eps);
}

TEST(Polynomial, EvalMatchesArithmetic) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + trial % 3;
    const Polynomial f = random_poly(n, 3, rng);
    const Polynomial g = random_poly(n, 2, rng);
    std::vector<double> x(n);
    for (auto& v : x) v = u(rng);
    const double fx = f.eval(x), gx = g.eval(x);
    EXPECT_NEAR((f + g).eval(x), fx + gx, 1e-10 * (1 + std::abs(fx + gx)));
    EXPECT_NEAR((f * g).eval(x), fx * gx, 1e-10 * (1 + std::abs(fx * gx)));
  }
}

TEST(Theta, Big) {
  EXPECT_EQ(theta_big(1, 2), parse("1 + x1^4", 1));
  EXPECT_EQ(theta_big(2, 1), parse("1 + x1^2 + x2^2", 2));
  const Polynomial t = theta_big(3, 5);
  EXPECT_EQ(t.num_terms(), 4u);
  EXPECT_EQ(t.degree(), 10);
  EXPECT_THROW(theta_big(0, 1), InvalidArgument);
  EXPECT_THROW(theta_big(1, 0), InvalidArgument);
}

TEST(Theta, Small) {
  EXPECT_EQ(theta_small(1, 1), parse("1 + x1^2", 1));
  EXPECT_EQ(theta_small(2, 2), parse("2 + x1^2 + 1/2*x1^4 + x2^2 + 1/2*x2^4", 2));
  EXPECT_EQ(theta_small(1, 0), Polynomial::constant(1, 1.0));
  EXPECT_THROW(theta_small(0, 1), InvalidArgument);
}

TEST(Theta, TermCounts) {
  for (int n = 1; n <= 4; ++n) {
    for (int r = 1; r <= 6; ++r) {
      EXPECT_EQ(theta_big(n, r).num_terms(), static_cast<std::size_t>(n + 1));
      EXPECT_EQ(theta_small(n, r).num_terms(), static_cast<std::size_t>(n * r + 1));
      EXPECT_DOUBLE_EQ(theta_small(n, r).coeff(Multidegree::zero(n)), n);
    }
  }
}

TEST(ScaleBox, Substitution) {
  EXPECT_EQ(scale_box(parse("1 - x1^2", 1), 2.0), parse("1 - 4*x1^2", 1));
  EXPECT_EQ(scale_box(parse("x1*x2", 2), 3.0), parse("9*x1*x2", 2));
  const Polynomial f = parse("3 - x1 + 2*x1*x2^3", 2);
  EXPECT_EQ(scale_box(f, 1.0), f);
  EXPECT_THROW(scale_box(f, 0.0), InvalidArgument);
  EXPECT_THROW(scale_box(f, -1.0), InvalidArgument);
}

TEST(ScaleBox, RoundTrip) {
  std::mt19937_64 rng(3);
  for (double l : {0.3, 1.7, 2.0, 5.5}) {
    const Polynomial f = random_poly(2, 5, rng);
    const Polynomial back = scale_box(scale_box(f, l), 1.0 / l);
    for (const auto& [a, c] : f.terms()) EXPECT_NEAR(back.coeff(a), c, 1e-12 * std::abs(c));
  }
}

TEST(Parse, Literals) {
  const Polynomial f = parse("1 - x1^2", 1);
  EXPECT_EQ(f.num_terms(), 2u);
  EXPECT_DOUBLE_EQ(f.coeff(Multidegree{0}), 1.0);
  EXPECT_DOUBLE_EQ(f.coeff(Multidegree{2}), -1.0);
  const Polynomial m = parse("1 + x1^2*x2^2*(x1^2 + x2^2 - 3)", 2);
  EXPECT_EQ(m.num_terms(), 4u);
  EXPECT_DOUBLE_EQ(m.coeff(Multidegree{4, 2}), 1.0);
  EXPECT_DOUBLE_EQ(m.coeff(Multidegree{2, 4}), 1.0);
  EXPECT_DOUBLE_EQ(m.coeff(Multidegree{2, 2}), -3.0);
  EXPECT_TRUE(parse("0", 3).is_zero());
  EXPECT_DOUBLE_EQ(parse("4/27", 1).coeff(Multidegree{0}), 4.0 / 27.0);
  EXPECT_DOUBLE_EQ(parse("1.5e-2*x1", 1).coeff(Multidegree{1}), 0.015);
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse("x1 +", 1), SyntaxError);
  EXPECT_THROW(parse("2x1", 1), SyntaxError);
  EXPECT_THROW(parse("x1^-1", 1), SyntaxError);
  EXPECT_THROW(parse("x1^2^2", 1), SyntaxError);
  EXPECT_THROW(parse("x1/x2", 2), SyntaxError);
  EXPECT_THROW(parse("1/0", 1), SyntaxError);
  EXPECT_THROW(parse("(x1", 1), SyntaxError);
  EXPECT_THROW(parse("", 1), SyntaxError);
  EXPECT_THROW(parse("x3", 2), VariableOutOfRange);
  try {
    parse("x1 + * 2", 1);
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.position(), 5u);
  }
}

TEST(Parse, RoundTripIsFixedPoint) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 1 + trial % 4;
    const Polynomial f = random_poly(n, 4, rng);
    const Polynomial g = parse(to_string(f), n);
    EXPECT_EQ(g, f);
    EXPECT_EQ(parse(to_string(g), n), g);
  }
  EXPECT_EQ(to_string(parse("1 + x1^2*x2^2*(x1^2 + x2^2 - 3)", 2)),
            "1 - 3*x1^2*x2^2 + x1^4*x2^2 + x1^2*x2^4");
}
