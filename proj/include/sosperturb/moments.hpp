#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sosperturb/errors.hpp"
#include "sosperturb/linalg.hpp"
#include "sosperturb/polynomial.hpp"

namespace sosperturb {

/// Values y_alpha = L(x^alpha) of a linear form L for every |alpha| <= order.
class MomentVector {
 public:
  MomentVector() = default;
  MomentVector(std::size_t n_vars, int order, std::map<Multidegree, double> values)
      : n_vars_(n_vars), order_(order), values_(std::move(values)) {
    if (n_vars == 0) throw InvalidArgument("moment vector needs n_vars >= 1");
    const MonomialBasis all(n_vars, order);
    for (const auto& alpha : all.entries()) {
      auto it = values_.find(alpha);
      if (it == values_.end()) {
        throw IncompleteMoments("moment vector is missing a multidegree of total " +
                                std::to_string(alpha.total()));
      }
    }
    for (const auto& [alpha, v] : values_) {
      if (alpha.n_vars() != n_vars || alpha.total() > order) {
        throw InvalidArgument("moment vector has an entry outside its order");
      }
    }
    if (!std::isfinite(values_.at(Multidegree::zero(n_vars)))) {
      throw InvalidArgument("moment vector mass L(1) is not finite");
    }
  }

  std::size_t n_vars() const { return n_vars_; }
  int order() const { return order_; }
  const std::map<Multidegree, double>& values() const { return values_; }
  double operator[](const Multidegree& alpha) const {
    auto it = values_.find(alpha);
    if (it == values_.end()) throw IncompleteMoments("moment not available");
    return it->second;
  }
  /// L(f) for deg f <= order.
  double apply(const Polynomial& f) const {
    double s = 0.0;
    for (const auto& [alpha, c] : f.terms()) s += c * (*this)[alpha];
    return s;
  }

 private:
  std::size_t n_vars_ = 0;
  int order_ = 0;
  std::map<Multidegree, double> values_;
};

/// Moments of sum_k weights[k] * delta(atoms[k]) up to the given order.
inline MomentVector atomic_moments(std::size_t n_vars,
                                   const std::vector<std::vector<double>>& atoms,
                                   std::span<const double> weights, int order) {
  if (atoms.size() != weights.size()) throw DimensionMismatch("atoms and weights differ in count");
  std::map<Multidegree, double> values;
  const MonomialBasis all(n_vars, order);
  for (const auto& alpha : all.entries()) {
    const Polynomial mono = Polynomial::monomial(alpha);
    double s = 0.0;
    for (std::size_t k = 0; k < atoms.size(); ++k) s += weights[k] * mono.eval(atoms[k]);
    values.emplace(alpha, s);
  }
  return MomentVector(n_vars, order, std::move(values));
}

/// M[a, b] = y_{alpha_a + alpha_b} over the degree-r monomial basis.
struct MomentMatrix {
  MonomialBasis basis;
  Matrix matrix;
};

inline MomentMatrix moment_matrix(const MomentVector& y, int r) {
  if (r < 0) throw InvalidArgument("moment_matrix: r must be >= 0");
  if (y.order() < 2 * r) {
    throw IncompleteMoments("moment vector of order " + std::to_string(y.order()) +
                            " cannot fill a degree-" + std::to_string(r) + " moment matrix");
  }
  MonomialBasis b(y.n_vars(), r);
  Matrix m(b.size(), b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = i; j < b.size(); ++j) {
      const double v = y[b[i] + b[j]];
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return {std::move(b), std::move(m)};
}

inline bool psd_check(const MomentMatrix& m, double tol) {
  return min_eigenvalue(m.matrix) >= -tol;
}

inline constexpr double kLemmaTolerance = 1e-7;

namespace detail {
inline void require_psd(const MomentVector& y, int r, double tol) {
  if (!psd_check(moment_matrix(y, r), tol)) {
    throw NotPsd("moment matrix is not PSD; lemma hypothesis unmet");
  }
}
}  // namespace detail

/// Univariate: L(x^(2k)) <= max(L(1), L(x^(2r))) for k = 0..r, given a PSD
/// moment matrix.
inline bool check_lemma1(const MomentVector& y, int r, double tol = kLemmaTolerance) {
  if (y.n_vars() != 1) throw InvalidArgument("check_lemma1 needs a univariate moment vector");
  detail::require_psd(y, r, tol);
  const double bound = std::max(y[Multidegree{0}], y[Multidegree{2 * r}]);
  for (int k = 0; k <= r; ++k) {
    if (y[Multidegree{2 * k}] > bound + tol) return false;
  }
  return true;
}

/// Given a PSD moment matrix and marginal even moments L(x_i^(2k)) <= tau for
/// all i and k = 0..r, checks |L(x^alpha)| <= tau for every |alpha| <= 2r.
/// The two-variable case is the bivariate bound on L(x^(2 alpha)).
inline bool check_lemma3(const MomentVector& y, int r, double tau, double tol = kLemmaTolerance) {
  detail::require_psd(y, r, tol);
  const std::size_t n = y.n_vars();
  for (std::size_t i = 0; i < n; ++i) {
    for (int k = 0; k <= r; ++k) {
      const double v = y[Multidegree::unit(n, i, 2 * k)];
      if (v > tau + tol) {
        throw HypothesisUnmet("marginal moment L(x" + std::to_string(i + 1) + "^" +
                              std::to_string(2 * k) + ") = " + std::to_string(v) +
                              " exceeds tau = " + std::to_string(tau));
      }
    }
  }
  const MonomialBasis all(n, 2 * r);
  for (const auto& alpha : all.entries()) {
    if (std::abs(y[alpha]) > tau + tol) return false;
  }
  return true;
}

struct CauchySchwarzResult {
  bool holds = true;
  /// First violating pair (alpha, beta) when holds is false.
  std::optional<std::pair<Multidegree, Multidegree>> violation;
};

/// L(x^(a+b))^2 <= L(x^(2a)) L(x^(2b)) for all |a|, |b| <= r.
inline CauchySchwarzResult cauchy_schwarz_check(const MomentVector& y, int r,
                                                double tol = kLemmaTolerance) {
  detail::require_psd(y, r, tol);
  const MonomialBasis b(y.n_vars(), r);
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      const double lhs = std::pow(y[b[i] + b[j]], 2);
      const double rhs = y[b[i] + b[i]] * y[b[j] + b[j]];
      if (lhs > rhs + tol) return {false, std::make_pair(b[i], b[j])};
    }
  }
  return {};
}

}  // namespace sosperturb
