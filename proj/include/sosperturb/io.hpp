#pragma once

// JSON forms of polynomials, certificates and moment vectors. Needs
// nlohmann/json (vendor/json.hpp) on the include path.

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "sosperturb/errors.hpp"
#include "sosperturb/moments.hpp"
#include "sosperturb/parse.hpp"
#include "sosperturb/polynomial.hpp"
#include "sosperturb/preorder.hpp"
#include "sosperturb/sos.hpp"

namespace sosperturb {

using Json = nlohmann::ordered_json;

/// Non-finite values have no JSON literal and become null.
inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline double number_or_nan(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline Json exponents_json(const Multidegree& a) { return Json(a.exponents()); }

inline Json basis_json(const MonomialBasis& b) {
  Json out = Json::array();
  for (const auto& a : b.entries()) out.push_back(exponents_json(a));
  return out;
}

/// Lower triangle of a symmetric matrix, row by row.
inline Json lower_triangle_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) out.push_back(m(i, j));
  }
  return out;
}

inline Matrix matrix_from_lower_triangle(const Json& j, std::size_t size) {
  if (!j.is_array() || j.size() != size * (size + 1) / 2) {
    throw InvalidArgument("gram has " + std::to_string(j.size()) + " entries, expected " +
                          std::to_string(size * (size + 1) / 2));
  }
  Matrix m(size, size);
  std::size_t k = 0;
  for (std::size_t i = 0; i < size; ++i) {
    for (std::size_t j2 = 0; j2 <= i; ++j2) {
      const double v = j[k++].get<double>();
      m(i, j2) = v;
      m(j2, i) = v;
    }
  }
  return m;
}

inline std::vector<Multidegree> exponents_list(const Json& j, std::size_t n_vars) {
  std::vector<Multidegree> out;
  for (const auto& e : j) {
    auto v = e.get<std::vector<int>>();
    if (v.size() != n_vars) throw DimensionMismatch("exponent vector length differs from nvars");
    for (int x : v) {
      if (x < 0) throw InvalidArgument("negative exponent");
    }
    out.emplace_back(std::move(v));
  }
  return out;
}

/// [{exponents, coeff}, ...] in graded lex order; the zero polynomial is [].
inline Json polynomial_json(const Polynomial& f) {
  Json out = Json::array();
  for (const auto& [alpha, c] : f.terms()) {
    out.push_back({{"exponents", exponents_json(alpha)}, {"coeff", c}});
  }
  return out;
}

inline Polynomial polynomial_from_json(const Json& j, std::size_t n_vars) {
  if (!j.is_array()) throw InvalidArgument("polynomial must be an array of terms");
  Polynomial::TermMap t;
  for (const auto& term : j) {
    auto v = term.at("exponents").get<std::vector<int>>();
    if (v.size() != n_vars) throw DimensionMismatch("exponent vector length differs from nvars");
    t[Multidegree(std::move(v))] += term.at("coeff").get<double>();
  }
  return Polynomial(n_vars, std::move(t));
}

inline Json squares_json(const std::vector<Polynomial>& squares) {
  Json out = Json::array();
  for (const auto& h : squares) out.push_back(polynomial_json(h));
  return out;
}

inline Json gram_block_json(const GramCertificate& c) {
  return {{"basis", basis_json(c.basis)},
          {"gram", lower_triangle_json(c.gram)},
          {"squares", squares_json(c.squares)},
          {"residual_linf", c.residual_linf}};
}

inline Json trajectory_json(const std::vector<TrajectoryPoint>& t) {
  Json out = Json::array();
  for (const auto& p : t) out.push_back({{"r", p.r}, {"eps_star", number_or_null(p.eps_star)}});
  return out;
}

inline Json moments_json(const MomentVector& y) {
  Json values = Json::array();
  for (const auto& [alpha, v] : y.values()) {
    values.push_back({{"exponents", exponents_json(alpha)}, {"value", v}});
  }
  return {{"order", y.order()}, {"nvars", y.n_vars()}, {"values", std::move(values)}};
}

inline MomentVector moments_from_json(const Json& j) {
  const auto n = j.at("nvars").get<std::size_t>();
  std::map<Multidegree, double> values;
  for (const auto& e : j.at("values")) {
    auto v = e.at("exponents").get<std::vector<int>>();
    if (v.size() != n) throw DimensionMismatch("moment exponent length differs from nvars");
    values.emplace(Multidegree(std::move(v)), e.at("value").get<double>());
  }
  return MomentVector(n, j.at("order").get<int>(), std::move(values));
}

/// {kind, nvars, r, eps, perturbation, target, eps_star, min_eps, gap, basis,
/// gram, squares, residual_linf}: a certificate that target = f + eps p is a
/// sum of squares at degree r.
inline Json certificate_json(const GramCertificate& c, int r, double eps, const Polynomial& p,
                             double eps_star, double min_eps, double gap) {
  Json j = {{"kind", "sos"},
            {"nvars", c.basis.n_vars()},
            {"r", r},
            {"eps", eps},
            {"perturbation", polynomial_json(p)},
            {"target", polynomial_json(c.target)},
            {"eps_star", number_or_null(eps_star)},
            {"min_eps", number_or_null(min_eps)},
            {"gap", number_or_null(gap)}};
  j.update(gram_block_json(c));
  return j;
}

inline Json certificate_json(const ApproximationResult& res) {
  return certificate_json(*res.certificate, res.r, res.certified_eps, res.perturbation,
                          res.eps_star, res.min_eps, res.gap);
}

inline Json preorder_certificate_json(const PreorderCertificate& c) {
  Json terms = Json::array();
  for (const auto& t : c.terms) {
    Json term = {{"e", t.e}, {"product", polynomial_json(t.product)}};
    term.update(gram_block_json(t.sigma));
    terms.push_back(std::move(term));
  }
  return {{"kind", "preorder"},
          {"nvars", c.target.n_vars()},
          {"r", c.r},
          {"eps", c.eps},
          {"perturbation", polynomial_json(c.perturbation)},
          {"target", polynomial_json(c.target)},
          {"terms", std::move(terms)},
          {"residual_linf", c.residual_linf},
          {"annotation", c.annotation},
          {"warning", c.warning}};
}

/// Residuals of a stored certificate against f + eps p, recomputed from the
/// stored Gram data and squares with polynomial arithmetic only.
struct VerifyReport {
  double gram_residual = 0.0;
  double squares_residual = 0.0;
  double min_gram_eigenvalue = 0.0;
  double residual() const { return std::max(gram_residual, squares_residual); }
};

namespace detail {
struct StoredBlock {
  MonomialBasis basis;
  Matrix gram;
  std::vector<Polynomial> squares;
};

inline StoredBlock read_block(const Json& j, std::size_t n) {
  const auto entries = exponents_list(j.at("basis"), n);
  int max_deg = 0;
  for (const auto& a : entries) max_deg = std::max(max_deg, a.total());
  MonomialBasis b(n, max_deg);
  if (b.entries() != entries) throw InvalidArgument("basis is not a graded lex monomial basis");
  StoredBlock out{b, matrix_from_lower_triangle(j.at("gram"), b.size()), {}};
  for (const auto& s : j.at("squares")) out.squares.push_back(polynomial_from_json(s, n));
  return out;
}
}  // namespace detail

inline VerifyReport verify_certificate_json(const Json& cert, const Polynomial& target) {
  const auto n = cert.at("nvars").get<std::size_t>();
  if (n != target.n_vars()) {
    throw DimensionMismatch("certificate nvars = " + std::to_string(n) +
                            " but the polynomial has nvars = " + std::to_string(target.n_vars()));
  }
  VerifyReport rep;
  rep.min_gram_eigenvalue = std::numeric_limits<double>::infinity();
  if (cert.value("kind", "sos") == "preorder") {
    Polynomial from_gram(n), from_squares(n);
    for (const auto& t : cert.at("terms")) {
      const Polynomial g = polynomial_from_json(t.at("product"), n);
      const auto blk = detail::read_block(t, n);
      from_gram = from_gram + gram_polynomial(blk.basis, blk.gram) * g;
      Polynomial sigma(n);
      for (const auto& h : blk.squares) sigma = sigma + h * h;
      from_squares = from_squares + sigma * g;
      rep.min_gram_eigenvalue = std::min(rep.min_gram_eigenvalue, min_eigenvalue(blk.gram));
    }
    rep.gram_residual = from_gram.max_coeff_diff(target);
    rep.squares_residual = from_squares.max_coeff_diff(target);
    return rep;
  }
  const auto blk = detail::read_block(cert, n);
  rep.gram_residual = gram_polynomial(blk.basis, blk.gram).max_coeff_diff(target);
  rep.squares_residual = verify_certificate(target, blk.squares);
  rep.min_gram_eigenvalue = min_eigenvalue(blk.gram);
  return rep;
}

}  // namespace sosperturb
