#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sosperturb/errors.hpp"
#include "sosperturb/linalg.hpp"
#include "sosperturb/moments.hpp"
#include "sosperturb/polynomial.hpp"
#include "sosperturb/sdp.hpp"

namespace sosperturb {

/// min_eps at or below this counts as "already SOS".
inline constexpr double kSosThreshold = 1e-7;
/// Largest acceptable certificate reconstruction error.
inline constexpr double kResidualTolerance = 1e-6;
/// Largest acceptable |Gram-side optimum - moment-side optimum|.
inline constexpr double kDualityGapTolerance = 1e-6;
inline constexpr double kClipTolerance = 1e-10;

/// z^T Q z for the monomial column z of `basis`.
inline Polynomial gram_polynomial(const MonomialBasis& basis, const Matrix& gram) {
  if (gram.rows() != static_cast<Eigen::Index>(basis.size()) || gram.cols() != gram.rows()) {
    throw DimensionMismatch("Gram matrix does not match its basis");
  }
  Polynomial::TermMap t;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    t[basis[i] + basis[i]] += gram(i, i);
    for (std::size_t j = i + 1; j < basis.size(); ++j) {
      t[basis[i] + basis[j]] += gram(i, j) + gram(j, i);
    }
  }
  return Polynomial(basis.n_vars(), std::move(t));
}

/// Splits a PSD Gram matrix into squares h_i = sqrt(lambda_i) v_i^T z,
/// dropping eigenvalues below clip_tol * lambda_max.
inline std::vector<Polynomial> extract_certificate(const Matrix& gram, const MonomialBasis& basis,
                                                   double clip_tol = kClipTolerance) {
  if (gram.rows() != static_cast<Eigen::Index>(basis.size()) || gram.cols() != gram.rows()) {
    throw DimensionMismatch("Gram matrix does not match its basis");
  }
  const Matrix sym = 0.5 * (gram + gram.transpose());
  const Eigendecomposition ed = eigendecompose(sym);
  std::vector<Polynomial> squares;
  if (ed.values.size() == 0) return squares;
  const double lmax = ed.values(ed.values.size() - 1);
  const double lmin = ed.values(0);
  const double neg_floor = std::max(1e-8, clip_tol) * (1.0 + max_abs_entry(sym));
  if (lmin < -neg_floor) {
    throw NotPsd("Gram matrix has eigenvalue " + std::to_string(lmin));
  }
  for (Eigen::Index k = ed.values.size() - 1; k >= 0; --k) {
    const double lambda = ed.values(k);
    if (!(lambda > clip_tol * lmax) || lambda <= 0.0) continue;
    Polynomial::TermMap t;
    const double s = std::sqrt(lambda);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      t.emplace(basis[i], s * ed.vectors(static_cast<Eigen::Index>(i), k));
    }
    Polynomial h(basis.n_vars(), std::move(t));
    if (!h.is_zero()) squares.push_back(std::move(h));
  }
  return squares;
}

/// max |coeff(sum_i h_i^2) - coeff(target)|, using only polynomial arithmetic.
inline double verify_certificate(const Polynomial& target, const std::vector<Polynomial>& squares) {
  Polynomial sum(target.n_vars());
  for (const auto& h : squares) {
    if (h.n_vars() != target.n_vars()) throw DimensionMismatch("square has wrong n_vars");
    sum = sum + h * h;
  }
  return sum.max_coeff_diff(target);
}

/// A PSD Gram matrix over a monomial basis, its square decomposition, and
/// the reconstruction error against `target` (recomputed here).
struct GramCertificate {
  MonomialBasis basis;
  Matrix gram;
  std::vector<Polynomial> squares;
  Polynomial target;
  double residual_linf = 0.0;

  GramCertificate(MonomialBasis b, Matrix g, Polynomial tgt, double clip_tol = kClipTolerance)
      : basis(std::move(b)), gram(0.5 * (g + g.transpose())), target(std::move(tgt)) {
    squares = extract_certificate(gram, basis, clip_tol);
    residual_linf = verify_certificate(target, squares);
  }
};

struct TrajectoryPoint {
  int r;
  double eps_star;
};

struct ApproximationResult {
  int r = 0;
  /// Moment-side optimum min L(f) s.t. L(p) <= 1, M(L) PSD.
  double eps_star = 0.0;
  /// -eps_star: smallest eps with f + eps p in the cone at this r.
  double min_eps = 0.0;
  /// Gram-side optimum min eps; equals min_eps up to the duality gap.
  double gram_optimum = 0.0;
  /// |gram_optimum - min_eps|.
  double gap = 0.0;
  Polynomial perturbation{1};
  /// Weight of `perturbation` in the certified target f + certified_eps p.
  double certified_eps = 0.0;
  std::optional<GramCertificate> certificate;
  MomentVector dual_moments;
  SdpStatus status = SdpStatus::Optimal;
  std::vector<TrajectoryPoint> trajectory;
};

class NotFoundWithinRMax : public Error {
 public:
  NotFoundWithinRMax(const std::string& what, std::vector<TrajectoryPoint> trajectory)
      : Error(what), trajectory_(std::move(trajectory)) {}
  const std::vector<TrajectoryPoint>& trajectory() const { return trajectory_; }

 private:
  std::vector<TrajectoryPoint> trajectory_;
};

/// Perturbation family p_r used by the degree searches.
struct Perturbation {
  enum class Kind { ThetaBig, ThetaSmall, Custom };
  Kind kind = Kind::ThetaBig;
  std::function<Polynomial(std::size_t n_vars, int r)> custom;
  std::string name = "theta-big";

  static Perturbation theta_big() { return {Kind::ThetaBig, {}, "theta-big"}; }
  static Perturbation theta_small() { return {Kind::ThetaSmall, {}, "theta-small"}; }
  static Perturbation from(std::function<Polynomial(std::size_t, int)> f, std::string name) {
    return {Kind::Custom, std::move(f), std::move(name)};
  }

  Polynomial at(std::size_t n_vars, int r) const {
    switch (kind) {
      case Kind::ThetaBig: return sosperturb::theta_big(static_cast<int>(n_vars), r);
      case Kind::ThetaSmall: return sosperturb::theta_small(static_cast<int>(n_vars), r);
      case Kind::Custom: break;
    }
    Polynomial p = custom(n_vars, r);
    if (p.n_vars() != n_vars) throw DimensionMismatch("custom perturbation has wrong n_vars");
    return p;
  }
};

namespace detail {

/// How the perturbation weight enters a certificate system.
struct EpsMode {
  bool minimize = true;  // minimize eps >= 0; otherwise eps is fixed
  double fixed = 0.0;
};

/// SDP for  f + eps p = sum_k sigma_k * products[k],  sigma_k SOS of degree
/// 2 * floor((2r - deg products[k]) / 2). One equality per monomial of degree
/// <= 2r, in graded lex order, so constraint i is moment `moments[i]`.
///
/// When minimizing, eps is the last 1x1 block (eps >= 0). The dual then reads
/// min L(f) s.t. L(p) <= 1 and every localizing matrix PSD, with L = -y and
/// the dual slack of the eps block equal to 1 - L(p).
struct CertificateSystem {
  SdpProblem problem;
  MonomialBasis moments;
  std::vector<MonomialBasis> block_bases;
  std::vector<Polynomial> products;
  int eps_block = -1;
  Polynomial target;
  Polynomial perturbation;
};

inline int half_degree_floor(int d) { return d / 2; }

inline CertificateSystem build_certificate_system(const Polynomial& f, const Polynomial& p,
                                                  const std::vector<Polynomial>& products, int r,
                                                  EpsMode mode) {
  if (f.n_vars() != p.n_vars()) throw DimensionMismatch("f and p have different n_vars");
  if (r < 0) throw InvalidArgument("r must be >= 0");
  if (f.degree() > 2 * r) {
    throw DegreeTooLow("deg f = " + std::to_string(f.degree()) + " exceeds 2r = " +
                       std::to_string(2 * r));
  }
  if (!p.is_zero() && p.degree() > 2 * r) {
    throw DegreeTooLow("deg p = " + std::to_string(p.degree()) + " exceeds 2r = " +
                       std::to_string(2 * r));
  }
  const std::size_t n = f.n_vars();
  std::vector<int> sizes;
  std::vector<MonomialBasis> bases;
  for (const auto& g : products) {
    if (g.n_vars() != n) throw DimensionMismatch("product has wrong n_vars");
    if (g.is_zero()) throw InvalidArgument("zero generator product");
    if (g.degree() > 2 * r) throw DegreeTooLow("product degree exceeds 2r");
    bases.emplace_back(n, half_degree_floor(2 * r - g.degree()));
    sizes.push_back(static_cast<int>(bases.back().size()));
  }
  const int eps_block = mode.minimize ? static_cast<int>(sizes.size()) : -1;
  if (mode.minimize) sizes.push_back(1);

  MonomialBasis moments(n, 2 * r);
  std::vector<LinearForm> rows(moments.size());
  for (std::size_t k = 0; k < products.size(); ++k) {
    const auto& b = bases[k];
    for (std::size_t i = 0; i < b.size(); ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        const Multidegree ab = b[i] + b[j];
        for (const auto& [delta, c] : products[k].terms()) {
          const std::size_t row = moments.index_of(ab + delta);
          rows[row].entries.push_back(
              {static_cast<int>(k), static_cast<int>(i), static_cast<int>(j), c});
        }
      }
    }
  }
  const Polynomial target = mode.minimize ? f : f + p * mode.fixed;
  if (mode.minimize) {
    for (const auto& [gamma, c] : p.terms()) {
      rows[moments.index_of(gamma)].entries.push_back({eps_block, 0, 0, -c});
    }
  }
  SdpProblem problem(sizes, 0);
  for (std::size_t i = 0; i < moments.size(); ++i) {
    const int idx = problem.add_constraint(std::move(rows[i]), target.coeff(moments[i]));
    if (idx != static_cast<int>(i)) {
      throw SolverFailure("degenerate certificate system: duplicate moment rows");
    }
  }
  LinearForm objective;
  if (mode.minimize) objective.entries.push_back({eps_block, 0, 0, 1.0});
  problem.set_objective(std::move(objective));
  return {std::move(problem), std::move(moments), std::move(bases), products, eps_block,
          target, p};
}

inline bool near_optimal(const SdpSolution& s) {
  return s.status == SdpStatus::Optimal ||
         ((s.status == SdpStatus::NumericalTrouble || s.status == SdpStatus::IterationLimit) &&
          s.primal_residual <= 1e-7 && s.dual_residual <= 1e-7 &&
          std::abs(s.primal_objective - s.dual_objective) <= 0.1 * kDualityGapTolerance);
}

inline MomentVector dual_moments_of(const CertificateSystem& sys, const SdpSolution& s) {
  std::map<Multidegree, double> values;
  for (std::size_t i = 0; i < sys.moments.size(); ++i) {
    values.emplace(sys.moments[i], -s.dual_vector(static_cast<Eigen::Index>(i)));
  }
  return MomentVector(sys.moments.n_vars(), sys.moments.max_degree(), std::move(values));
}

/// Diagonal Gram matrix for p over `basis` when p = sum c_a x^(2a) with all
/// c_a >= 0 and every x^a in the basis; nullopt otherwise.
inline std::optional<Matrix> diagonal_gram(const Polynomial& p, const MonomialBasis& basis) {
  Matrix d = Matrix::Zero(basis.size(), basis.size());
  for (const auto& [alpha, c] : p.terms()) {
    if (c < 0.0 || !alpha.is_even()) return std::nullopt;
    std::vector<int> half(alpha.n_vars());
    for (std::size_t i = 0; i < half.size(); ++i) half[i] = alpha[i] / 2;
    const std::size_t idx = basis.index_of(Multidegree(std::move(half)));
    if (idx == basis.size()) return std::nullopt;
    d(idx, idx) += c;
  }
  return d;
}

}  // namespace detail

/// Gram-side SDP for  min eps  s.t.  f + eps p = z^T Q z,  Q PSD,  eps >= 0.
/// Block 0 is Q (size s(r)); block 1 is the 1x1 eps block.
inline SdpProblem build_gram_system(const Polynomial& f, const Polynomial& p, int r) {
  return detail::build_certificate_system(f, p, {Polynomial::constant(f.n_vars(), 1.0)}, r, {})
      .problem;
}

namespace detail {

// Solves a minimize-eps certificate system; fills everything but the
// certificate. The raw solution is returned through `raw`.
inline ApproximationResult solve_min_eps(const CertificateSystem& sys, int r,
                                         const SolverSettings& settings, SdpSolution& raw) {
  raw = solve(sys.problem, settings);
  ApproximationResult out;
  out.r = r;
  out.perturbation = sys.perturbation;
  out.status = raw.status;
  if (raw.status == SdpStatus::PrimalLikelyInfeasible) {
    // No eps puts f + eps p in the cone at this degree.
    out.eps_star = -std::numeric_limits<double>::infinity();
    out.min_eps = std::numeric_limits<double>::infinity();
    out.gram_optimum = std::numeric_limits<double>::infinity();
    return out;
  }
  if (!near_optimal(raw)) {
    throw SolverFailure(std::string("SDP solve ended with status ") + to_string(raw.status));
  }
  out.eps_star = -raw.dual_objective;
  out.min_eps = -out.eps_star;
  out.gram_optimum = raw.primal_objective;
  out.gap = std::abs(raw.primal_objective - raw.dual_objective);
  out.dual_moments = dual_moments_of(sys, raw);
  out.certified_eps = raw.primal_objective;
  return out;
}

}  // namespace detail

/// Computes eps_r* = min L(f) over linear forms with L(p) <= 1 and PSD moment
/// matrix, together with the Gram-side optimum and an SOS certificate for
/// f + gram_optimum * p.
inline ApproximationResult epsilon_star(const Polynomial& f, int r, const Polynomial& p,
                                        const SolverSettings& settings = {}) {
  const auto sys = detail::build_certificate_system(
      f, p, {Polynomial::constant(f.n_vars(), 1.0)}, r, {});
  SdpSolution s;
  ApproximationResult out = detail::solve_min_eps(sys, r, settings, s);
  if (s.status == SdpStatus::PrimalLikelyInfeasible) return out;
  out.certificate.emplace(sys.block_bases[0], s.primal_blocks[0], f + p * out.certified_eps);
  return out;
}

struct SosCheck {
  bool is_sos = false;
  std::optional<GramCertificate> certificate;
  SdpStatus status = SdpStatus::Optimal;
};

/// Decides whether f is a sum of squares by the pure feasibility SDP
/// f = z^T Q z, Q PSD, with z the monomials of degree <= deg(f)/2.
inline SosCheck is_sos(const Polynomial& f, const SolverSettings& settings = {}) {
  if (f.degree() % 2 != 0) return {false, std::nullopt, SdpStatus::PrimalLikelyInfeasible};
  const int r = f.degree() / 2;
  const auto sys = detail::build_certificate_system(
      f, Polynomial(f.n_vars()), {Polynomial::constant(f.n_vars(), 1.0)}, r, {false, 0.0});
  const SdpSolution s = solve(sys.problem, settings);
  SosCheck out;
  out.status = s.status;
  if (!detail::near_optimal(s)) return out;
  out.certificate.emplace(sys.block_bases[0], s.primal_blocks[0], f);
  out.is_sos = out.certificate->residual_linf <= kResidualTolerance;
  return out;
}

namespace detail {

// Certificate for f + eps p at the degree of `at`, reusing the Gram matrix
// of the optimum when p has a diagonal Gram representation, otherwise
// solving the fixed-eps feasibility problem.
inline GramCertificate certificate_for_eps(const Polynomial& f, const Polynomial& p, double eps,
                                           const ApproximationResult& at,
                                           const SolverSettings& settings) {
  const GramCertificate& base = *at.certificate;
  if (eps >= at.certified_eps) {
    if (auto d = diagonal_gram(p, base.basis)) {
      Matrix g = base.gram + (eps - at.certified_eps) * *d;
      return GramCertificate(base.basis, std::move(g), f + p * eps);
    }
  }
  const auto sys = build_certificate_system(f, p, {Polynomial::constant(f.n_vars(), 1.0)}, at.r,
                                            {false, eps});
  const SdpSolution s = solve(sys.problem, settings);
  if (!near_optimal(s)) {
    throw SolverFailure(std::string("fixed-eps certificate solve ended with status ") +
                        to_string(s.status));
  }
  return GramCertificate(sys.block_bases[0], s.primal_blocks[0], f + p * eps);
}

// Membership of f + eps p at degree r by the fixed-eps feasibility problem;
// thresholds are unknown (NaN) in the result.
inline std::optional<ApproximationResult> fixed_eps_result(const Polynomial& f,
                                                           const Polynomial& p, double eps, int r,
                                                           const SolverSettings& settings) {
  const auto sys = build_certificate_system(f, p, {Polynomial::constant(f.n_vars(), 1.0)}, r,
                                            {false, eps});
  const SdpSolution s = solve(sys.problem, settings);
  if (!near_optimal(s)) return std::nullopt;
  ApproximationResult out;
  out.r = r;
  out.eps_star = std::numeric_limits<double>::quiet_NaN();
  out.min_eps = std::numeric_limits<double>::quiet_NaN();
  out.gram_optimum = std::numeric_limits<double>::quiet_NaN();
  out.gap = std::numeric_limits<double>::quiet_NaN();
  out.perturbation = p;
  out.certified_eps = eps;
  out.status = s.status;
  out.certificate.emplace(sys.block_bases[0], s.primal_blocks[0], f + p * eps);
  if (out.certificate->residual_linf > kResidualTolerance) return std::nullopt;
  return out;
}

inline int first_degree(const Polynomial& f) { return std::max(1, (f.degree() + 1) / 2); }

}  // namespace detail

/// Smallest r in [ceil(deg f / 2), r_max] with eps >= -eps_r*, with a
/// certificate for f + eps p_r at that r.
inline ApproximationResult minimal_r(const Polynomial& f, double eps, const Perturbation& kind,
                                     int r_max, const SolverSettings& settings = {}) {
  if (!(eps > 0.0)) throw InvalidArgument("minimal_r: eps must be positive");
  const int r0 = detail::first_degree(f);
  if (r_max < r0) {
    throw InvalidArgument("r_max = " + std::to_string(r_max) + " is below ceil(deg f / 2) = " +
                          std::to_string(r0));
  }
  std::vector<TrajectoryPoint> trajectory;
  for (int r = r0; r <= r_max; ++r) {
    const Polynomial p = kind.at(f.n_vars(), r);
    ApproximationResult res;
    try {
      res = epsilon_star(f, r, p, settings);
    } catch (const SolverFailure&) {
      // The moment side has no attained optimum (possible when p does not
      // bound every moment); decide membership at this r directly.
      trajectory.push_back({r, std::numeric_limits<double>::quiet_NaN()});
      if (auto direct = detail::fixed_eps_result(f, p, eps, r, settings)) {
        direct->trajectory = std::move(trajectory);
        return *direct;
      }
      continue;
    }
    trajectory.push_back({r, res.eps_star});
    if (res.certificate && res.min_eps <= eps) {
      res.certificate = detail::certificate_for_eps(f, p, eps, res, settings);
      res.certified_eps = eps;
      res.trajectory = std::move(trajectory);
      return res;
    }
  }
  throw NotFoundWithinRMax("no r <= " + std::to_string(r_max) + " makes f + " +
                               std::to_string(eps) + " * p_r a sum of squares",
                           std::move(trajectory));
}

/// Certifies f >= 0 on [-l, l]^n: runs the unit-box search on f(l x) and maps
/// the certificate back, so it certifies f + eps (1 + sum_j (x_j / l)^(2r)).
inline ApproximationResult approximate_on_box(const Polynomial& f, double eps, double l, int r_max,
                                              const SolverSettings& settings = {}) {
  const Polynomial g = scale_box(f, l);
  ApproximationResult res = minimal_r(g, eps, Perturbation::theta_big(), r_max, settings);
  if (l == 1.0) return res;
  res.perturbation = scale_box(res.perturbation, 1.0 / l);
  const GramCertificate& c = *res.certificate;
  Vector d(c.basis.size());
  for (std::size_t i = 0; i < c.basis.size(); ++i) d(i) = std::pow(l, -c.basis[i].total());
  Matrix g_back = d.asDiagonal() * c.gram * d.asDiagonal();
  const MonomialBasis basis = c.basis;
  res.certificate.emplace(basis, std::move(g_back), f + res.perturbation * res.certified_eps);
  // Moments of the rescaled problem correspond to L'(x^a) = L(x^a) l^|a|.
  std::map<Multidegree, double> values;
  for (const auto& [alpha, v] : res.dual_moments.values()) {
    values.emplace(alpha, v * std::pow(l, alpha.total()));
  }
  res.dual_moments = MomentVector(res.dual_moments.n_vars(), res.dual_moments.order(),
                                  std::move(values));
  return res;
}

}  // namespace sosperturb
