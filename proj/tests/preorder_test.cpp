#include <cmath>

#include <gtest/gtest.h>

#include "sosperturb/parse.hpp"
#include "sosperturb/preorder.hpp"

using namespace sosperturb;

namespace {

SemialgebraicSystem system_of(std::vector<std::string> gens, std::size_t n, bool asserted = true) {
  SemialgebraicSystem s;
  for (const auto& g : gens) s.generators.push_back(parse(g, n));
  s.assert_moment_problem = asserted;
  return s;
}

const SemialgebraicSystem kUnitInterval = system_of({"x1", "1 - x1"}, 1);
const SemialgebraicSystem kCubed = system_of({"(1 - x1^2)^3"}, 1);

void expect_degree_discipline(const PreorderCertificate& c) {
  for (const auto& t : c.terms) {
    EXPECT_LE(2 * t.sigma.basis.max_degree() + t.product.degree(), 2 * c.r);
  }
}

}  // namespace

TEST(EnumerateProducts, UnitInterval) {
  const auto terms = enumerate_products(kUnitInterval, 2);
  ASSERT_EQ(terms.size(), 4u);
  EXPECT_EQ(terms[0].product, parse("1", 1));
  EXPECT_EQ(terms[1].product, parse("x1", 1));
  EXPECT_EQ(terms[2].product, parse("1 - x1", 1));
  EXPECT_EQ(terms[3].product, parse("x1 - x1^2", 1));
  EXPECT_EQ(terms[3].e, (std::vector<int>{1, 1}));
}

TEST(EnumerateProducts, DegreeFilter) {
  const auto terms = enumerate_products(kCubed, 4);
  ASSERT_EQ(terms.size(), 1u);
  EXPECT_EQ(terms[0].e, std::vector<int>{0});
}

TEST(EnumerateProducts, DuplicatesKept) {
  const auto terms = enumerate_products(system_of({"x1", "x2", "x1*x2"}, 2), 2);
  // 1, x1, x2, x1*x2 (from e = 110) and x1*x2 (from e = 001).
  ASSERT_EQ(terms.size(), 5u);
  int count = 0;
  for (const auto& t : terms) count += t.product == parse("x1*x2", 2);
  EXPECT_EQ(count, 2);
}

TEST(EnumerateProducts, Errors) {
  SemialgebraicSystem many;
  for (int i = 0; i < 11; ++i) many.generators.push_back(parse("x1", 1));
  EXPECT_THROW(enumerate_products(many, 2), TooManyGenerators);
  EXPECT_THROW(enumerate_products(kUnitInterval, -1), InvalidArgument);
  SemialgebraicSystem zero;
  zero.generators.push_back(Polynomial(1));
  EXPECT_THROW(enumerate_products(zero, 2), InvalidArgument);
}

TEST(BuildPreorderSdp, Feasibility) {
  const auto f1 = solve(build_preorder_sdp(parse("x1", 1), 0.0, Polynomial(1), kUnitInterval, 1));
  EXPECT_EQ(f1.status, SdpStatus::Optimal);
  const auto f2 =
      solve(build_preorder_sdp(parse("x1 - x1^2", 1), 0.0, Polynomial(1), kUnitInterval, 1));
  EXPECT_EQ(f2.status, SdpStatus::Optimal);
  const auto f3 = solve(build_preorder_sdp(parse("1 - x1^2", 1), 0.0, Polynomial(1), kCubed, 3));
  EXPECT_EQ(f3.status, SdpStatus::PrimalLikelyInfeasible);
  EXPECT_THROW(build_preorder_sdp(parse("x1^4", 1), 0.0, Polynomial(1), kCubed, 1), DegreeTooLow);
}

TEST(EpsilonStarPreorder, ZeroForMembers) {
  const auto a = epsilon_star_preorder(parse("x1", 1), 1, theta_big(1, 1), kUnitInterval);
  EXPECT_NEAR(a.eps_star, 0.0, 1e-7);
  EXPECT_LE(a.gap, kDualityGapTolerance);
  const auto b = epsilon_star_preorder(parse("(x1 - 3)^2", 1), 1, theta_big(1, 1), kCubed);
  EXPECT_NEAR(b.eps_star, 0.0, 1e-7);
}

TEST(EpsilonStarPreorder, ThetaSmallThresholdDecreases) {
  const Polynomial f = parse("1 - x1^2", 1);
  double previous = INFINITY;
  for (int r = 3; r <= 5; ++r) {
    const auto res = epsilon_star_preorder(f, r, theta_small(1, r), kCubed);
    EXPECT_GT(res.min_eps, 0.0) << "r=" << r;
    EXPECT_LT(res.min_eps, previous) << "r=" << r;
    EXPECT_LE(res.gap, kDualityGapTolerance);
    ASSERT_TRUE(res.preorder_certificate);
    EXPECT_LE(res.preorder_certificate->residual_linf, 1e-6);
    expect_degree_discipline(*res.preorder_certificate);
    previous = res.min_eps;
  }
}

TEST(Membership, GeneratorItself) {
  const auto c = membership(parse("x1", 1), 0.1, Perturbation::Kind::ThetaSmall, kUnitInterval, 5);
  EXPECT_EQ(c.r, 1);
  EXPECT_LE(c.residual_linf, 1e-6);
  EXPECT_LE(verify_preorder(c.target, c.terms), 1e-6);
  EXPECT_EQ(c.annotation, "certifies nonnegativity of f on K_S");
  EXPECT_TRUE(c.warning.empty());
  expect_degree_discipline(c);
}

TEST(Membership, CubedInterval) {
  const auto c = membership(parse("1 - x1^2", 1), 0.5, Perturbation::Kind::ThetaSmall, kCubed, 12);
  EXPECT_LE(c.r, 12);
  EXPECT_LE(c.residual_linf, 1e-6);
  expect_degree_discipline(c);
}

TEST(Membership, EmptyIntersectionWithBox) {
  const auto s = system_of({"x1 - 2"}, 1, false);
  const auto c = membership(parse("-1", 1), 1.0, Perturbation::Kind::ThetaBig, s, 10);
  EXPECT_LE(c.residual_linf, 1e-6);
  EXPECT_NE(c.annotation.find("[-1,1]^n only"), std::string::npos);
  EXPECT_FALSE(c.warning.empty());
  const auto smaller = membership(parse("-1", 1), 0.05, Perturbation::Kind::ThetaBig, s, 10);
  EXPECT_GT(smaller.r, c.r);
  EXPECT_LE(smaller.residual_linf, 1e-6);
}

TEST(Membership, EmptySystemMatchesMinimalR) {
  const SemialgebraicSystem none;
  const Polynomial m = parse("1 + x1^2*x2^2*(x1^2 + x2^2 - 3)", 2);
  for (int r = 3; r <= 4; ++r) {
    const auto a = epsilon_star_preorder(m, r, theta_big(2, r), none);
    const auto b = epsilon_star(m, r, theta_big(2, r));
    EXPECT_NEAR(a.min_eps, b.min_eps, 1e-6);
  }
  const auto c = membership(m, 0.001, Perturbation::Kind::ThetaBig, none, 6);
  const auto d = minimal_r(m, 0.001, Perturbation::theta_big(), 6);
  EXPECT_EQ(c.r, d.r);
}

TEST(Membership, Errors) {
  EXPECT_THROW(membership(parse("x1", 1), 0.0, Perturbation::Kind::ThetaBig, kUnitInterval, 3),
               InvalidArgument);
  EXPECT_THROW(membership(parse("x1", 1), 0.1, Perturbation::Kind::Custom, kUnitInterval, 3),
               InvalidArgument);
  EXPECT_THROW(membership(parse("1 - x1^2", 1), 1e-9, Perturbation::Kind::ThetaBig, kCubed, 2),
               NotFoundWithinRMax);
}

TEST(ParseSystem, Format) {
  const auto s = parse_system(
      "# interval\nnvars 2\nmoment_problem asserted\nnote compact\n\nx1\n1 - x2^2\n");
  EXPECT_EQ(s.n_vars(), 2u);
  EXPECT_TRUE(s.assert_moment_problem);
  EXPECT_EQ(s.note, "compact");
  ASSERT_EQ(s.generators.size(), 2u);
  EXPECT_EQ(s.generators[1], parse("1 - x2^2", 2));

  const auto empty = parse_system("nvars 1\nmoment_problem unknown\n");
  ASSERT_EQ(empty.generators.size(), 1u);
  EXPECT_EQ(empty.generators[0], parse("1", 1));
  EXPECT_FALSE(empty.assert_moment_problem);

  EXPECT_THROW(parse_system("x1\n"), InvalidArgument);
  EXPECT_THROW(parse_system("nvars 1\nmoment_problem maybe\n"), InvalidArgument);
  EXPECT_THROW(parse_system("nvars 1\nx2\n"), VariableOutOfRange);
  EXPECT_THROW(parse_system("nvars 1\nx1 +\n"), InvalidArgument);
  EXPECT_THROW(parse_system("nvars 1\n0\n"), InvalidArgument);
}
