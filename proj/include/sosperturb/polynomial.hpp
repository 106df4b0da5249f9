#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sosperturb/errors.hpp"

namespace sosperturb {

/// Coefficients with magnitude at or below this are dropped on normalization.
inline constexpr double kDropTolerance = 1e-14;

/// An exponent vector alpha in N^n together with its total degree |alpha|.
///
/// Ordering is graded lexicographic: lower total degree first; within a
/// degree, the vector with the larger leading exponent comes first, so for
/// two variables the degree-1 monomials order as x1, x2 and the degree-2
/// monomials as x1^2, x1*x2, x2^2.
class Multidegree {
 public:
  Multidegree() = default;
  explicit Multidegree(std::vector<int> exponents)
      : exponents_(std::move(exponents)) {
    for (int e : exponents_) {
      if (e < 0) throw InvalidArgument("negative exponent in multidegree");
      total_ += e;
    }
  }
  Multidegree(std::initializer_list<int> exponents)
      : Multidegree(std::vector<int>(exponents)) {}

  /// The zero multidegree (constant monomial) in n variables.
  static Multidegree zero(std::size_t n_vars) {
    return Multidegree(std::vector<int>(n_vars, 0));
  }
  /// x_var^power in n variables (var is 0-based).
  static Multidegree unit(std::size_t n_vars, std::size_t var, int power = 1) {
    std::vector<int> e(n_vars, 0);
    e.at(var) = power;
    return Multidegree(std::move(e));
  }

  std::size_t n_vars() const { return exponents_.size(); }
  int total() const { return total_; }
  int operator[](std::size_t i) const { return exponents_[i]; }
  const std::vector<int>& exponents() const { return exponents_; }

  Multidegree operator+(const Multidegree& other) const {
    if (other.n_vars() != n_vars()) {
      throw DimensionMismatch("multidegree variable counts differ");
    }
    std::vector<int> e(exponents_);
    for (std::size_t i = 0; i < e.size(); ++i) e[i] += other.exponents_[i];
    return Multidegree(std::move(e));
  }

  /// True iff every exponent is even.
  bool is_even() const {
    return std::all_of(exponents_.begin(), exponents_.end(),
                       [](int e) { return e % 2 == 0; });
  }

  friend bool operator==(const Multidegree& a, const Multidegree& b) {
    return a.exponents_ == b.exponents_;
  }
  friend bool operator<(const Multidegree& a, const Multidegree& b) {
    if (a.total_ != b.total_) return a.total_ < b.total_;
    return b.exponents_ < a.exponents_;
  }

 private:
  std::vector<int> exponents_;
  int total_ = 0;
};

/// Sparse real polynomial in n variables: a map from multidegree to nonzero
/// coefficient, kept in graded lex order.
class Polynomial {
 public:
  using TermMap = std::map<Multidegree, double>;

  explicit Polynomial(std::size_t n_vars) : n_vars_(n_vars) {
    if (n_vars == 0) throw InvalidArgument("polynomial needs n_vars >= 1");
  }
  Polynomial(std::size_t n_vars, TermMap terms)
      : n_vars_(n_vars), terms_(std::move(terms)) {
    if (n_vars == 0) throw InvalidArgument("polynomial needs n_vars >= 1");
    for (const auto& [alpha, c] : terms_) {
      if (alpha.n_vars() != n_vars_) {
        throw DimensionMismatch("term has wrong number of variables");
      }
    }
    normalize();
  }

  static Polynomial constant(std::size_t n_vars, double c) {
    return Polynomial(n_vars, {{Multidegree::zero(n_vars), c}});
  }
  static Polynomial monomial(const Multidegree& alpha, double c = 1.0) {
    return Polynomial(alpha.n_vars(), {{alpha, c}});
  }
  /// The coordinate polynomial x_var (0-based).
  static Polynomial variable(std::size_t n_vars, std::size_t var) {
    return monomial(Multidegree::unit(n_vars, var));
  }

  std::size_t n_vars() const { return n_vars_; }
  const TermMap& terms() const { return terms_; }
  std::size_t num_terms() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  /// Total degree; 0 for the zero polynomial (check is_zero()).
  int degree() const { return terms_.empty() ? 0 : terms_.rbegin()->first.total(); }

  double coeff(const Multidegree& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? 0.0 : it->second;
  }

  Polynomial operator+(const Polynomial& g) const {
    check_same(g);
    TermMap t(terms_);
    for (const auto& [alpha, c] : g.terms_) t[alpha] += c;
    return Polynomial(n_vars_, std::move(t));
  }
  Polynomial operator-(const Polynomial& g) const { return *this + g * -1.0; }
  Polynomial operator-() const { return *this * -1.0; }

  Polynomial operator*(double c) const {
    TermMap t;
    for (const auto& [alpha, a] : terms_) t.emplace(alpha, a * c);
    return Polynomial(n_vars_, std::move(t));
  }
  friend Polynomial operator*(double c, const Polynomial& f) { return f * c; }

  Polynomial operator*(const Polynomial& g) const {
    check_same(g);
    TermMap t;
    for (const auto& [a, ca] : terms_) {
      for (const auto& [b, cb] : g.terms_) t[a + b] += ca * cb;
    }
    return Polynomial(n_vars_, std::move(t));
  }

  /// Integer power by repeated multiplication; pow(0) is the constant 1.
  Polynomial pow(int k) const {
    if (k < 0) throw InvalidArgument("negative polynomial power");
    Polynomial result = constant(n_vars_, 1.0);
    for (int i = 0; i < k; ++i) result = result * *this;
    return result;
  }

  /// Evaluates at a point. Monomials are formed from per-variable power
  /// tables built by repeated multiplication.
  double eval(std::span<const double> x) const {
    if (x.size() != n_vars_) {
      throw DimensionMismatch("evaluation point has wrong dimension");
    }
    const int d = degree();
    std::vector<std::vector<double>> powers(n_vars_, std::vector<double>(d + 1));
    for (std::size_t i = 0; i < n_vars_; ++i) {
      powers[i][0] = 1.0;
      for (int k = 1; k <= d; ++k) powers[i][k] = powers[i][k - 1] * x[i];
    }
    double sum = 0.0;
    for (const auto& [alpha, c] : terms_) {
      double m = c;
      for (std::size_t i = 0; i < n_vars_; ++i) m *= powers[i][alpha[i]];
      sum += m;
    }
    return sum;
  }
  double eval(std::initializer_list<double> x) const {
    return eval(std::span<const double>(x.begin(), x.size()));
  }

  /// Sum of absolute coefficient values.
  double l1_norm() const {
    double s = 0.0;
    for (const auto& [alpha, c] : terms_) s += std::abs(c);
    return s;
  }

  /// Largest absolute coefficient difference to g.
  double max_coeff_diff(const Polynomial& g) const {
    check_same(g);
    double m = 0.0;
    for (const auto& [alpha, c] : terms_) m = std::max(m, std::abs(c - g.coeff(alpha)));
    for (const auto& [alpha, c] : g.terms_) {
      if (!terms_.contains(alpha)) m = std::max(m, std::abs(c));
    }
    return m;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.n_vars_ == b.n_vars_ && a.terms_ == b.terms_;
  }

 private:
  void check_same(const Polynomial& g) const {
    if (g.n_vars_ != n_vars_) {
      throw DimensionMismatch("polynomials have different numbers of variables");
    }
  }
  void normalize() {
    std::erase_if(terms_, [](const auto& kv) {
      return !(std::abs(kv.second) > kDropTolerance);
    });
  }

  std::size_t n_vars_;
  TermMap terms_;
};

inline Polynomial add(const Polynomial& f, const Polynomial& g) { return f + g; }
inline Polynomial mul(const Polynomial& f, const Polynomial& g) { return f * g; }
inline Polynomial scale(const Polynomial& f, double c) { return f * c; }
inline double eval(const Polynomial& f, std::span<const double> x) { return f.eval(x); }
inline double l1_norm(const Polynomial& f) { return f.l1_norm(); }

/// Binomial coefficient C(n, k) in 64-bit arithmetic.
inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

/// All multidegrees of total at most max_degree, in graded lex order, with the
/// inverse index map.
class MonomialBasis {
 public:
  MonomialBasis(std::size_t n_vars, int max_degree)
      : n_vars_(n_vars), max_degree_(max_degree) {
    if (n_vars == 0) throw InvalidArgument("basis needs n_vars >= 1");
    if (max_degree < 0) throw InvalidArgument("basis needs max_degree >= 0");
    std::vector<int> e(n_vars, 0);
    for (int d = 0; d <= max_degree; ++d) fill(e, 0, d);
    for (std::size_t i = 0; i < entries_.size(); ++i) index_.emplace(entries_[i], i);
  }

  std::size_t n_vars() const { return n_vars_; }
  int max_degree() const { return max_degree_; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<Multidegree>& entries() const& { return entries_; }
  std::vector<Multidegree> entries() && { return std::move(entries_); }
  const Multidegree& operator[](std::size_t i) const { return entries_[i]; }
  /// Position of alpha, or size() if alpha is not in the basis.
  std::size_t index_of(const Multidegree& alpha) const {
    auto it = index_.find(alpha);
    return it == index_.end() ? entries_.size() : it->second;
  }
  bool contains(const Multidegree& alpha) const { return index_.contains(alpha); }

 private:
  // Emits every exponent vector of the given remaining degree for variables
  // var..n-1, leading variable taking its largest value first.
  void fill(std::vector<int>& e, std::size_t var, int remaining) {
    if (var + 1 == n_vars_) {
      e[var] = remaining;
      entries_.emplace_back(e);
      return;
    }
    for (int k = remaining; k >= 0; --k) {
      e[var] = k;
      fill(e, var + 1, remaining - k);
    }
    e[var] = 0;
  }

  std::size_t n_vars_;
  int max_degree_;
  std::vector<Multidegree> entries_;
  std::map<Multidegree, std::size_t> index_;
};

inline MonomialBasis basis(std::size_t n_vars, int r) { return MonomialBasis(n_vars, r); }

/// 1 + sum_j x_j^(2r).
inline Polynomial theta_big(int n, int r) {
  if (n < 1) throw InvalidArgument("theta_big: n must be >= 1");
  if (r < 1) throw InvalidArgument("theta_big: r must be >= 1");
  const auto nv = static_cast<std::size_t>(n);
  Polynomial::TermMap t{{Multidegree::zero(nv), 1.0}};
  for (std::size_t j = 0; j < nv; ++j) t[Multidegree::unit(nv, j, 2 * r)] += 1.0;
  return Polynomial(nv, std::move(t));
}

/// sum_i sum_{k=0..r} x_i^(2k) / k!. Coefficients are formed in floating
/// point; for very large r the tail drops below kDropTolerance and vanishes.
inline Polynomial theta_small(int n, int r) {
  if (n < 1) throw InvalidArgument("theta_small: n must be >= 1");
  if (r < 0) throw InvalidArgument("theta_small: r must be >= 0");
  const auto nv = static_cast<std::size_t>(n);
  Polynomial::TermMap t;
  for (std::size_t i = 0; i < nv; ++i) {
    double inv_factorial = 1.0;
    for (int k = 0; k <= r; ++k) {
      if (k > 0) inv_factorial /= k;
      t[Multidegree::unit(nv, i, 2 * k)] += inv_factorial;
    }
  }
  return Polynomial(nv, std::move(t));
}

/// The polynomial x -> f(l x): each coefficient c_alpha becomes c_alpha l^|alpha|.
inline Polynomial scale_box(const Polynomial& f, double l) {
  if (!(l > 0.0)) throw InvalidArgument("scale_box: l must be positive");
  Polynomial::TermMap t;
  for (const auto& [alpha, c] : f.terms()) t.emplace(alpha, c * std::pow(l, alpha.total()));
  return Polynomial(f.n_vars(), std::move(t));
}

}  // namespace sosperturb
