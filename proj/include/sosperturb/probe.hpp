#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sosperturb/errors.hpp"
#include "sosperturb/polynomial.hpp"
#include "sosperturb/sos.hpp"

namespace sosperturb {

/// SplitMix64: state += 0x9E3779B97F4A7C15, then two xor-shift-multiply
/// rounds. uniform() takes the top 53 bits of each output, giving [0, 1).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::uint64_t state_;
};

/// Coefficients uniform in [-bound, bound], drawn in graded lex order over
/// every monomial of degree <= d.
inline Polynomial random_polynomial(std::size_t n_vars, int d, double bound, SplitMix64& rng) {
  const MonomialBasis b(n_vars, d);
  Polynomial::TermMap t;
  for (const auto& alpha : b.entries()) t.emplace(alpha, rng.uniform(-bound, bound));
  return Polynomial(n_vars, std::move(t));
}

inline constexpr int kProbeGridPoints = 33;

/// Minimum of f over the uniform grid with `points` nodes per axis on [-1,1]^n.
inline double grid_minimum(const Polynomial& f, int points = kProbeGridPoints) {
  const std::size_t n = f.n_vars();
  std::vector<int> idx(n, 0);
  std::vector<double> x(n);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) x[i] = -1.0 + 2.0 * idx[i] / (points - 1);
    best = std::min(best, f.eval(x));
    std::size_t i = 0;
    while (i < n && ++idx[i] == points) idx[i++] = 0;
    if (i == n) break;
  }
  return best;
}

struct ProbeRow {
  int index = 0;
  bool accepted = false;
  double grid_min = 0.0;
  /// Minimal r found; empty when rejected or not found within r_max.
  std::optional<int> r;
  std::string outcome;  // "rejected", "certified", "not-found", "solver-failure"
};

struct ProbeReport {
  std::vector<ProbeRow> rows;
  int accepted = 0;
  int rejected = 0;
  /// Accepted samples without a certificate up to r_max; possibly false
  /// accepts of the grid filter (their grid minimum is reported).
  int r_max_failures = 0;
  int max_r = 0;
};

struct ProbeConfig {
  std::size_t n_vars = 1;
  int degree = 2;
  double coef_bound = 1.0;
  double eps = 0.5;
  int samples = 20;
  std::uint64_t seed = 0;
  int r_max = 10;
};

/// Samples random polynomials, keeps those nonnegative on the grid and
/// records the minimal r making f + eps Theta_r a sum of squares.
inline ProbeReport degree_probe(const ProbeConfig& cfg, const SolverSettings& settings = {}) {
  if (cfg.samples < 1) throw InvalidArgument("degree-probe needs samples >= 1");
  if (cfg.n_vars < 1) throw InvalidArgument("degree-probe needs n >= 1");
  if (cfg.degree < 0) throw InvalidArgument("degree-probe needs d >= 0");
  if (!(cfg.coef_bound > 0.0)) throw InvalidArgument("degree-probe needs N > 0");
  if (!(cfg.eps > 0.0)) throw InvalidArgument("degree-probe needs eps > 0");
  SplitMix64 rng(cfg.seed);
  ProbeReport rep;
  for (int s = 0; s < cfg.samples; ++s) {
    const Polynomial f = random_polynomial(cfg.n_vars, cfg.degree, cfg.coef_bound, rng);
    ProbeRow row;
    row.index = s;
    row.grid_min = grid_minimum(f);
    row.accepted = row.grid_min >= 0.0;
    if (!row.accepted) {
      row.outcome = "rejected";
      ++rep.rejected;
      rep.rows.push_back(row);
      continue;
    }
    ++rep.accepted;
    const int r_max = std::max(cfg.r_max, detail::first_degree(f));
    try {
      const auto res = minimal_r(f, cfg.eps, Perturbation::theta_big(), r_max, settings);
      row.r = res.r;
      row.outcome = "certified";
      rep.max_r = std::max(rep.max_r, res.r);
    } catch (const NotFoundWithinRMax&) {
      row.outcome = "not-found";
      ++rep.r_max_failures;
    } catch (const SolverFailure&) {
      row.outcome = "solver-failure";
      ++rep.r_max_failures;
    }
    rep.rows.push_back(row);
  }
  if (rep.accepted == 0) {
    throw NoSamplesAccepted("none of " + std::to_string(cfg.samples) +
                            " samples is nonnegative on the grid");
  }
  return rep;
}

}  // namespace sosperturb
