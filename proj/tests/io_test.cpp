#include <gtest/gtest.h>

#include "sosperturb/io.hpp"

using namespace sosperturb;

namespace {

Json example_certificate() {
  const Polynomial f = parse("1 - x1^2", 1);
  const auto res = epsilon_star(f, 2, theta_big(1, 2));
  return certificate_json(res);
}

}  // namespace

TEST(PolynomialJson, RoundTrip) {
  const Polynomial f = parse("3*x1^2*x2 - 0.5*x2 + 7", 2);
  const Json j = polynomial_json(f);
  ASSERT_EQ(j.size(), 3u);
  EXPECT_EQ(j[0]["exponents"], Json({0, 0}));
  EXPECT_EQ(j[2]["exponents"], Json({2, 1}));
  EXPECT_EQ(polynomial_from_json(Json::parse(j.dump()), 2), f);
  EXPECT_EQ(polynomial_json(Polynomial(3)), Json::array());
  EXPECT_THROW(polynomial_from_json(j, 3), DimensionMismatch);
}

TEST(PolynomialJson, NonFiniteBecomesNull) {
  EXPECT_TRUE(number_or_null(std::nan("")).is_null());
  EXPECT_TRUE(number_or_null(INFINITY).is_null());
  EXPECT_TRUE(std::isnan(number_or_nan(Json(nullptr))));
  EXPECT_EQ(number_or_nan(Json(2.5)), 2.5);
}

TEST(MomentsJson, RoundTrip) {
  const MomentVector y(1, 2, {{Multidegree{0}, 1.0}, {Multidegree{1}, 0.25},
                              {Multidegree{2}, 0.5}});
  const MomentVector back = moments_from_json(Json::parse(moments_json(y).dump()));
  EXPECT_EQ(back.values(), y.values());
  EXPECT_EQ(back.order(), 2);
}

TEST(LowerTriangle, RoundTrip) {
  Matrix m(3, 3);
  m << 1, 2, 3, 2, 4, 5, 3, 5, 6;
  const Json j = lower_triangle_json(m);
  EXPECT_EQ(j, Json({1.0, 2.0, 4.0, 3.0, 5.0, 6.0}));
  EXPECT_EQ(matrix_from_lower_triangle(j, 3), m);
  EXPECT_THROW(matrix_from_lower_triangle(j, 2), InvalidArgument);
}

TEST(VerifyCertificate, AcceptsEmitted) {
  const Json cert = example_certificate();
  const Polynomial target = polynomial_from_json(cert["target"], 1);
  const auto rep = verify_certificate_json(Json::parse(cert.dump()), target);
  EXPECT_LE(rep.residual(), 1e-6);
  EXPECT_GE(rep.min_gram_eigenvalue, -1e-8);
}

TEST(VerifyCertificate, DetectsTampering) {
  Json cert = example_certificate();
  const Polynomial target = polynomial_from_json(cert["target"], 1);
  cert["gram"][0] = cert["gram"][0].get<double>() + 1e-2;
  const auto rep = verify_certificate_json(cert, target);
  EXPECT_NEAR(rep.gram_residual, 1e-2, 1e-6);
  EXPECT_GT(rep.residual(), 1e-6);

  Json wrong_eps = example_certificate();
  const Polynomial shifted = target + Polynomial::constant(1, 1e-3);
  EXPECT_GT(verify_certificate_json(wrong_eps, shifted).residual(), 1e-6);
}

TEST(VerifyCertificate, Errors) {
  Json cert = example_certificate();
  EXPECT_THROW(verify_certificate_json(cert, parse("1", 2)), DimensionMismatch);
  Json bad_basis = cert;
  std::swap(bad_basis["basis"][0], bad_basis["basis"][1]);
  EXPECT_THROW(verify_certificate_json(bad_basis, parse("1", 1)), InvalidArgument);
  Json short_gram = cert;
  short_gram["gram"].erase(0);
  EXPECT_THROW(verify_certificate_json(short_gram, parse("1", 1)), InvalidArgument);
}

TEST(VerifyCertificate, Preorder) {
  SemialgebraicSystem s;
  s.generators = {parse("x1", 1), parse("1 - x1", 1)};
  s.assert_moment_problem = true;
  const auto c = membership(parse("x1 - x1^2", 1), 0.1, Perturbation::Kind::ThetaSmall, s, 4);
  Json j = preorder_certificate_json(c);
  EXPECT_EQ(j["kind"], "preorder");
  EXPECT_EQ(j["terms"].size(), c.terms.size());
  EXPECT_LE(verify_certificate_json(Json::parse(j.dump()), c.target).residual(), 1e-6);
  j["terms"][0]["gram"][0] = j["terms"][0]["gram"][0].get<double>() + 1e-2;
  EXPECT_GT(verify_certificate_json(j, c.target).residual(), 1e-6);
}
