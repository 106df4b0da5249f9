#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sosperturb/errors.hpp"
#include "sosperturb/parse.hpp"
#include "sosperturb/polynomial.hpp"
#include "sosperturb/sdp.hpp"
#include "sosperturb/sos.hpp"

namespace sosperturb {

inline constexpr std::size_t kMaxGenerators = 10;

/// Generators g_1..g_s of K_S = {x : g_i(x) >= 0}. An empty list stands for
/// the single generator 1.
struct SemialgebraicSystem {
  std::vector<Polynomial> generators;
  bool assert_moment_problem = false;
  std::string note;

  std::size_t n_vars() const { return generators.empty() ? 0 : generators.front().n_vars(); }

  void validate() const {
    if (generators.size() > kMaxGenerators) {
      throw TooManyGenerators(std::to_string(generators.size()) + " generators exceed the cap of " +
                              std::to_string(kMaxGenerators));
    }
    for (const auto& g : generators) {
      if (g.is_zero()) throw InvalidArgument("zero polynomial as generator");
      if (g.n_vars() != generators.front().n_vars()) {
        throw DimensionMismatch("generators have different n_vars");
      }
    }
  }
};

/// g^e = prod_{i : e_i = 1} g_i.
struct ProductTerm {
  std::vector<int> e;
  Polynomial product;
};

namespace detail {
inline std::vector<Polynomial> effective_generators(const SemialgebraicSystem& s,
                                                    std::size_t n_vars) {
  if (!s.generators.empty()) return s.generators;
  return {Polynomial::constant(n_vars, 1.0)};
}
}  // namespace detail

/// All e in {0,1}^s with deg g^e <= two_r, e = 0 first, then by the binary
/// value of e read with e_1 as lowest bit.
inline std::vector<ProductTerm> enumerate_products(const SemialgebraicSystem& s, int two_r,
                                                   std::size_t n_vars) {
  if (two_r < 0) throw InvalidArgument("enumerate_products: two_r must be >= 0");
  s.validate();
  if (!s.generators.empty() && s.n_vars() != n_vars) {
    throw DimensionMismatch("system n_vars differs from the polynomial's");
  }
  const auto gens = detail::effective_generators(s, n_vars);
  std::vector<ProductTerm> out;
  const std::size_t count = std::size_t{1} << gens.size();
  for (std::size_t mask = 0; mask < count; ++mask) {
    std::vector<int> e(gens.size(), 0);
    int deg = 0;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      if (mask >> i & 1U) {
        e[i] = 1;
        deg += gens[i].degree();
      }
    }
    if (deg > two_r) continue;
    Polynomial prod = Polynomial::constant(n_vars, 1.0);
    for (std::size_t i = 0; i < gens.size(); ++i) {
      if (e[i]) prod = prod * gens[i];
    }
    out.push_back({std::move(e), std::move(prod)});
  }
  return out;
}

inline std::vector<ProductTerm> enumerate_products(const SemialgebraicSystem& s, int two_r) {
  if (s.generators.empty()) throw InvalidArgument("empty system needs an explicit n_vars");
  return enumerate_products(s, two_r, s.n_vars());
}

namespace detail {
inline std::vector<Polynomial> products_only(const std::vector<ProductTerm>& terms) {
  std::vector<Polynomial> out;
  out.reserve(terms.size());
  for (const auto& t : terms) out.push_back(t.product);
  return out;
}
}  // namespace detail

/// Feasibility SDP for  f + eps p = sum_e sigma_e g^e  in T_{2r}.
inline SdpProblem build_preorder_sdp(const Polynomial& f, double eps, const Polynomial& p,
                                     const SemialgebraicSystem& s, int r) {
  const auto terms = enumerate_products(s, 2 * r, f.n_vars());
  return detail::build_certificate_system(f, p, detail::products_only(terms), r, {false, eps})
      .problem;
}

struct PreorderTerm {
  std::vector<int> e;
  Polynomial product;
  GramCertificate sigma;
};

struct PreorderCertificate {
  int r = 0;
  double eps = 0.0;
  Polynomial perturbation{1};
  Polynomial target{1};
  std::vector<PreorderTerm> terms;
  /// max |coeff(sum_e (sum_i h_i^2) g^e) - coeff(target)|, recomputed from
  /// the squares.
  double residual_linf = 0.0;
  std::string annotation;
  std::string warning;
};

/// Reconstruction error of a preorder decomposition against `target`.
inline double verify_preorder(const Polynomial& target, const std::vector<PreorderTerm>& terms) {
  Polynomial sum(target.n_vars());
  for (const auto& t : terms) {
    Polynomial sigma(target.n_vars());
    for (const auto& h : t.sigma.squares) sigma = sigma + h * h;
    sum = sum + sigma * t.product;
  }
  return sum.max_coeff_diff(target);
}

struct PreorderApproximation : ApproximationResult {
  std::optional<PreorderCertificate> preorder_certificate;
};

namespace detail {

inline PreorderCertificate assemble_preorder(const CertificateSystem& sys,
                                             const std::vector<ProductTerm>& terms,
                                             const std::vector<Matrix>& blocks, double eps, int r) {
  PreorderCertificate c;
  c.r = r;
  c.eps = eps;
  c.perturbation = sys.perturbation;
  c.target = sys.target;
  if (sys.eps_block >= 0) c.target = sys.target + sys.perturbation * eps;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    GramCertificate sigma(sys.block_bases[k], blocks[k], Polynomial(sys.target.n_vars()));
    sigma.target = gram_polynomial(sigma.basis, sigma.gram);
    sigma.residual_linf = verify_certificate(sigma.target, sigma.squares);
    c.terms.push_back({terms[k].e, terms[k].product, std::move(sigma)});
  }
  c.residual_linf = verify_preorder(c.target, c.terms);
  return c;
}

}  // namespace detail

/// Moment side  min L(f)  s.t.  L(p) <= 1  and  M(g^e y) PSD  for every
/// admissible e, paired with the Gram side  min eps  s.t. f + eps p in T_{2r}.
/// The decomposition returned certifies f + gram_optimum * p.
inline PreorderApproximation epsilon_star_preorder(const Polynomial& f, int r, const Polynomial& p,
                                                   const SemialgebraicSystem& s,
                                                   const SolverSettings& settings = {}) {
  const auto terms = enumerate_products(s, 2 * r, f.n_vars());
  const auto sys =
      detail::build_certificate_system(f, p, detail::products_only(terms), r, {});
  SdpSolution raw;
  PreorderApproximation out;
  static_cast<ApproximationResult&>(out) = detail::solve_min_eps(sys, r, settings, raw);
  if (raw.status == SdpStatus::PrimalLikelyInfeasible) return out;
  std::vector<Matrix> blocks(raw.primal_blocks.begin(),
                             raw.primal_blocks.begin() + static_cast<long>(terms.size()));
  out.preorder_certificate = detail::assemble_preorder(sys, terms, blocks, out.certified_eps, r);
  return out;
}

namespace detail {

// Decomposition of f + eps p at degree r. Raises the e = 0 block by
// (eps - at) times a diagonal Gram matrix of p when possible, otherwise
// solves the fixed-eps feasibility problem. nullopt when that is infeasible.
inline std::optional<PreorderCertificate> preorder_for_eps(
    const Polynomial& f, const Polynomial& p, const SemialgebraicSystem& s, double eps, int r,
    const PreorderApproximation* at, const SolverSettings& settings) {
  const auto terms = enumerate_products(s, 2 * r, f.n_vars());
  if (at != nullptr && at->preorder_certificate && eps >= at->certified_eps) {
    const auto& base = *at->preorder_certificate;
    if (auto d = diagonal_gram(p, base.terms.front().sigma.basis)) {
      const auto sys = build_certificate_system(f, p, products_only(terms), r, {false, eps});
      std::vector<Matrix> blocks;
      for (const auto& t : base.terms) blocks.push_back(t.sigma.gram);
      blocks.front() += (eps - at->certified_eps) * *d;
      return assemble_preorder(sys, terms, blocks, eps, r);
    }
  }
  const auto sys = build_certificate_system(f, p, products_only(terms), r, {false, eps});
  const SdpSolution sol = solve(sys.problem, settings);
  if (!near_optimal(sol)) return std::nullopt;
  auto c = assemble_preorder(sys, terms, sol.primal_blocks, eps, r);
  if (c.residual_linf > kResidualTolerance) return std::nullopt;
  return c;
}

}  // namespace detail

class PreorderNotFound : public NotFoundWithinRMax {
 public:
  using NotFoundWithinRMax::NotFoundWithinRMax;
};

/// Smallest r <= r_max with f + eps p_r in T_{2r}, p_r = Theta_r or theta_r,
/// with the full decomposition.
inline PreorderCertificate membership(const Polynomial& f, double eps, Perturbation::Kind kind,
                                      const SemialgebraicSystem& s, int r_max,
                                      const SolverSettings& settings = {}) {
  if (!(eps > 0.0)) throw InvalidArgument("membership: eps must be positive");
  if (kind == Perturbation::Kind::Custom) {
    throw InvalidArgument("membership supports theta-big and theta-small only");
  }
  s.validate();
  const Perturbation fam =
      kind == Perturbation::Kind::ThetaBig ? Perturbation::theta_big() : Perturbation::theta_small();
  const int r0 = detail::first_degree(f);
  if (r_max < r0) {
    throw InvalidArgument("r_max = " + std::to_string(r_max) + " is below ceil(deg f / 2) = " +
                          std::to_string(r0));
  }
  std::vector<TrajectoryPoint> trajectory;
  for (int r = r0; r <= r_max; ++r) {
    const Polynomial p = fam.at(f.n_vars(), r);
    std::optional<PreorderCertificate> found;
    try {
      const auto res = epsilon_star_preorder(f, r, p, s, settings);
      trajectory.push_back({r, res.eps_star});
      if (res.preorder_certificate && res.min_eps <= eps) {
        found = detail::preorder_for_eps(f, p, s, eps, r, &res, settings);
      }
    } catch (const SolverFailure&) {
      trajectory.push_back({r, std::numeric_limits<double>::quiet_NaN()});
      found = detail::preorder_for_eps(f, p, s, eps, r, nullptr, settings);
    }
    if (!found) continue;
    found->annotation = kind == Perturbation::Kind::ThetaSmall
                            ? "certifies nonnegativity of f on K_S"
                            : "certifies nonnegativity of f on K_S intersected with [-1,1]^n only";
    if (!s.assert_moment_problem) {
      found->warning =
          "moment problem not asserted for S: completeness of the degree search is not guaranteed";
    }
    return *found;
  }
  throw PreorderNotFound("no r <= " + std::to_string(r_max) + " puts f + " + std::to_string(eps) +
                             " * p_r in the truncated preordering",
                         std::move(trajectory));
}

/// Reads a system description:
///   nvars <n>
///   moment_problem asserted|unknown
///   note <free text>          (optional)
///   <generator polynomial>    (one per line)
/// Blank lines and lines starting with '#' are ignored.
inline SemialgebraicSystem parse_system(const std::string& text) {
  SemialgebraicSystem s;
  std::optional<std::size_t> n;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string body = line.substr(first, last - first + 1);
    const auto where = "system line " + std::to_string(lineno) + ": ";
    if (body.rfind("nvars", 0) == 0) {
      std::istringstream ls(body.substr(5));
      long v = 0;
      std::string rest;
      if (!(ls >> v) || v < 1 || (ls >> rest)) throw InvalidArgument(where + "bad nvars line");
      n = static_cast<std::size_t>(v);
    } else if (body.rfind("moment_problem", 0) == 0) {
      std::istringstream ls(body.substr(14));
      std::string v, rest;
      ls >> v;
      if (ls >> rest || (v != "asserted" && v != "unknown")) {
        throw InvalidArgument(where + "moment_problem must be 'asserted' or 'unknown'");
      }
      s.assert_moment_problem = v == "asserted";
    } else if (body.rfind("note", 0) == 0 && (body.size() == 4 || body[4] == ' ')) {
      s.note = body.size() > 5 ? body.substr(5) : "";
    } else {
      if (!n) throw InvalidArgument(where + "generator before the nvars line");
      try {
        s.generators.push_back(parse(body, *n));
      } catch (const SyntaxError& e) {
        throw InvalidArgument(where + e.what());
      }
    }
  }
  if (!n) throw InvalidArgument("system file has no nvars line");
  s.validate();
  if (s.generators.empty()) s.generators.push_back(Polynomial::constant(*n, 1.0));
  return s;
}

}  // namespace sosperturb
