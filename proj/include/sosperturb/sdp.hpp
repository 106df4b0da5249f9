#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <iostream>
#include <limits>
#include <ostream>
#include <tuple>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "sosperturb/errors.hpp"
#include "sosperturb/linalg.hpp"

namespace sosperturb {

/// One nonzero of a symmetric coefficient matrix: entry (row, col) and its
/// mirror (col, row) of block `block` both equal `value`. Stored with
/// row >= col.
struct SymEntry {
  int block;
  int row;
  int col;
  double value;

  friend bool operator==(const SymEntry&, const SymEntry&) = default;
};

/// A linear functional <A, X> + a^T x over the block variables X and the free
/// scalars x.
struct LinearForm {
  std::vector<SymEntry> entries;
  std::vector<std::pair<int, double>> free_coeffs;

  friend bool operator==(const LinearForm&, const LinearForm&) = default;
};

struct Constraint {
  LinearForm lhs;
  double rhs = 0.0;

  friend bool operator==(const Constraint&, const Constraint&) = default;
};

/// Standard-form SDP:
///
///   minimize   <C, X> + c^T x
///   subject to <A_i, X> + a_i^T x = b_i,  i = 1..m
///              X = diag(X_1, ..., X_k) PSD, x free.
///
/// Its dual is  maximize b^T y  s.t.  C - sum_i y_i A_i = Z PSD,
/// c = sum_i y_i a_i.
class SdpProblem {
 public:
  SdpProblem(std::vector<int> block_sizes, int free_vars)
      : block_sizes_(std::move(block_sizes)), free_vars_(free_vars) {
    if (free_vars_ < 0) throw InvalidArgument("negative free variable count");
    for (int s : block_sizes_) {
      if (s < 1) throw InvalidArgument("block sizes must be positive");
    }
  }

  /// Adds <lhs> = rhs and returns its row index. An exact duplicate of an
  /// existing row is not stored again; the existing index is returned.
  int add_constraint(LinearForm lhs, double rhs) {
    Constraint c{canonical(std::move(lhs)), rhs};
    for (std::size_t i = 0; i < constraints_.size(); ++i) {
      if (constraints_[i] == c) return static_cast<int>(i);
    }
    constraints_.push_back(std::move(c));
    return static_cast<int>(constraints_.size() - 1);
  }

  void set_objective(LinearForm objective) { objective_ = canonical(std::move(objective)); }

  const std::vector<int>& block_sizes() const { return block_sizes_; }
  int free_vars() const { return free_vars_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  const LinearForm& objective() const { return objective_; }
  std::size_t num_constraints() const { return constraints_.size(); }

 private:
  LinearForm canonical(LinearForm f) const {
    for (auto& e : f.entries) {
      if (e.block < 0 || e.block >= static_cast<int>(block_sizes_.size())) {
        throw DimensionMismatch("coefficient refers to a missing block");
      }
      if (e.row < e.col) std::swap(e.row, e.col);
      if (e.col < 0 || e.row >= block_sizes_[e.block]) {
        throw DimensionMismatch("coefficient index outside its block");
      }
    }
    std::sort(f.entries.begin(), f.entries.end(), [](const SymEntry& a, const SymEntry& b) {
      return std::tie(a.block, a.row, a.col) < std::tie(b.block, b.row, b.col);
    });
    std::vector<SymEntry> merged;
    for (const auto& e : f.entries) {
      if (!merged.empty() && merged.back().block == e.block && merged.back().row == e.row &&
          merged.back().col == e.col) {
        merged.back().value += e.value;
      } else {
        merged.push_back(e);
      }
    }
    std::erase_if(merged, [](const SymEntry& e) { return e.value == 0.0; });
    f.entries = std::move(merged);

    for (const auto& [k, v] : f.free_coeffs) {
      if (k < 0 || k >= free_vars_) throw DimensionMismatch("free coefficient index out of range");
    }
    std::sort(f.free_coeffs.begin(), f.free_coeffs.end());
    std::vector<std::pair<int, double>> fm;
    for (const auto& kv : f.free_coeffs) {
      if (!fm.empty() && fm.back().first == kv.first) {
        fm.back().second += kv.second;
      } else {
        fm.push_back(kv);
      }
    }
    std::erase_if(fm, [](const auto& kv) { return kv.second == 0.0; });
    f.free_coeffs = std::move(fm);
    return f;
  }

  std::vector<int> block_sizes_;
  int free_vars_;
  std::vector<Constraint> constraints_;
  LinearForm objective_;
};

enum class SdpStatus { Optimal, NumericalTrouble, PrimalLikelyInfeasible, IterationLimit };

inline const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::NumericalTrouble: return "NumericalTrouble";
    case SdpStatus::PrimalLikelyInfeasible: return "PrimalLikelyInfeasible";
    case SdpStatus::IterationLimit: return "IterationLimit";
  }
  return "?";
}

struct SolverSettings {
  double gap_tolerance = 1e-8;
  double feas_tolerance = 1e-8;
  int max_iterations = 200;
  double infeasibility_threshold = 1e8;
  int max_block_size = 400;
  /// 0 silent; 1 summary; 2 per-iteration trace on std::clog.
  int verbosity = 0;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalTrouble;
  std::vector<Matrix> primal_blocks;
  Vector free_values;
  Vector dual_vector;
  std::vector<Matrix> dual_slack_blocks;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  /// |primal - dual| / (1 + |primal| + |dual|).
  double gap = 0.0;
  /// ||b - A(X) - B x|| / (1 + ||b||).
  double primal_residual = 0.0;
  /// (||C - A^T y - Z|| + ||c - B^T y||) / (1 + ||C||).
  double dual_residual = 0.0;
  int iterations = 0;
};

namespace detail {

// Primal-dual path-following with Nesterov-Todd scaling and a Mehrotra
// predictor-corrector. Free variables enter the Newton system through a
// bordered Schur complement that is reduced with the factorization of the
// PSD part.
class InteriorPoint {
 public:
  InteriorPoint(const SdpProblem& p, const SolverSettings& s) : p_(p), s_(s) {
    m_ = static_cast<int>(p.num_constraints());
    nb_ = static_cast<int>(p.block_sizes().size());
    nf_ = p.free_vars();
    by_block_.resize(nb_);
    for (int i = 0; i < m_; ++i) {
      std::vector<std::vector<SymEntry>> split(nb_);
      for (const auto& e : p.constraints()[i].lhs.entries) split[e.block].push_back(e);
      for (int b = 0; b < nb_; ++b) {
        if (!split[b].empty()) by_block_[b].push_back({i, std::move(split[b])});
      }
    }
    b_.resize(m_);
    for (int i = 0; i < m_; ++i) b_(i) = p.constraints()[i].rhs;
    free_mat_ = Matrix::Zero(m_, nf_);
    for (int i = 0; i < m_; ++i) {
      for (const auto& [k, v] : p.constraints()[i].lhs.free_coeffs) free_mat_(i, k) = v;
    }
    c_free_ = Vector::Zero(nf_);
    for (const auto& [k, v] : p.objective().free_coeffs) c_free_(k) = v;
    c_blocks_ = zeros();
    for (const auto& e : p.objective().entries) {
      c_blocks_[e.block](e.row, e.col) += e.value;
      if (e.row != e.col) c_blocks_[e.block](e.col, e.row) += e.value;
    }
    total_dim_ = 0;
    for (int s : p.block_sizes()) total_dim_ += s;
  }

  SdpSolution run() {
    SdpSolution sol;
    const double b_norm = b_.size() ? b_.lpNorm<Eigen::Infinity>() : 0.0;
    double c_norm = 0.0;
    for (const auto& c : c_blocks_) c_norm = std::max(c_norm, max_abs_entry(c));
    if (nf_ > 0) c_norm = std::max(c_norm, c_free_.lpNorm<Eigen::Infinity>());

    std::vector<Matrix> x = zeros();
    std::vector<Matrix> z = zeros();
    for (int k = 0; k < nb_; ++k) {
      x[k].diagonal().setConstant(1.0 + b_norm);
      z[k].diagonal().setConstant(1.0 + c_norm);
    }
    Vector xf = Vector::Zero(nf_);
    Vector y = Vector::Zero(m_);

    const double b_l2 = b_.norm();
    double c_fro = 0.0;
    for (const auto& c : c_blocks_) c_fro += c.squaredNorm();
    c_fro = std::sqrt(c_fro + c_free_.squaredNorm());

    // Late iterates can lose accuracy; a failed run reports the most accurate
    // iterate seen.
    SdpSolution best;
    double best_score = std::numeric_limits<double>::infinity();
    auto give_up = [&](SdpStatus status) {
      const double score = std::max({sol.primal_residual, sol.dual_residual, sol.gap});
      SdpSolution out = best_score < score ? best : sol;
      out.status = status;
      out.iterations = sol.iterations;
      return out;
    };

    int stalls = 0;
    for (int iter = 0;; ++iter) {
      // Residuals and objectives at the current iterate.
      Vector rp = b_ - apply_a(x) - free_mat_ * xf;
      std::vector<Matrix> rd = apply_at(y);
      double rd_norm2 = 0.0;
      for (int k = 0; k < nb_; ++k) {
        rd[k] = c_blocks_[k] - rd[k] - z[k];
        rd_norm2 += rd[k].squaredNorm();
      }
      Vector rf = c_free_ - free_mat_.transpose() * y;
      double pobj = c_free_.dot(xf);
      for (int k = 0; k < nb_; ++k) pobj += c_blocks_[k].cwiseProduct(x[k]).sum();
      const double dobj = b_.dot(y);
      double xz = 0.0;
      for (int k = 0; k < nb_; ++k) xz += x[k].cwiseProduct(z[k]).sum();
      const double mu = total_dim_ > 0 ? xz / total_dim_ : 0.0;

      sol.primal_objective = pobj;
      sol.dual_objective = dobj;
      sol.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
      sol.primal_residual = rp.norm() / (1.0 + b_l2);
      sol.dual_residual = (std::sqrt(rd_norm2) + rf.norm()) / (1.0 + c_fro);
      sol.iterations = iter;
      sol.primal_blocks = x;
      sol.dual_slack_blocks = z;
      sol.free_values = xf;
      sol.dual_vector = y;
      if (const double score = std::max({sol.primal_residual, sol.dual_residual, sol.gap});
          score < best_score) {
        best_score = score;
        best = sol;
      }

      if (s_.verbosity >= 2) {
        std::clog << std::scientific << std::setprecision(3) << "iter " << iter
                  << " pobj " << pobj << " dobj " << dobj << " pinf " << sol.primal_residual
                  << " dinf " << sol.dual_residual << " mu " << mu << '\n';
      }

      if (sol.primal_residual <= s_.feas_tolerance && sol.dual_residual <= s_.feas_tolerance &&
          sol.gap <= s_.gap_tolerance) {
        sol.status = SdpStatus::Optimal;
        return sol;
      }
      if (dobj > s_.infeasibility_threshold || farkas_ray(y, dobj)) {
        sol.status = SdpStatus::PrimalLikelyInfeasible;
        return sol;
      }
      // A diverging dual iterate with bounded objective means the dual optimum
      // is not attained; the Newton systems are unusable from here on.
      if (m_ > 0 && y.lpNorm<Eigen::Infinity>() > s_.infeasibility_threshold * (1.0 + b_norm)) {
        return give_up(SdpStatus::NumericalTrouble);
      }
      if (iter >= s_.max_iterations) {
        return give_up(SdpStatus::IterationLimit);
      }

      // Nesterov-Todd scaling point W = G G^T with G^T Z G = G^-1 X G^-T = diag(lambda).
      std::vector<Matrix> g(nb_), g_inv(nb_), w(nb_);
      std::vector<Vector> lambda(nb_);
      for (int k = 0; k < nb_; ++k) {
        Eigen::LLT<Matrix> lx(x[k]), lz(z[k]);
        if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) {
          return give_up(SdpStatus::NumericalTrouble);
        }
        const Matrix lxm = lx.matrixL();
        const Matrix lzm = lz.matrixL();
        Eigen::JacobiSVD<Matrix> svd(lzm.transpose() * lxm, Eigen::ComputeFullV);
        lambda[k] = svd.singularValues();
        if (lambda[k].minCoeff() <= 0.0) {
          return give_up(SdpStatus::NumericalTrouble);
        }
        const Vector inv_sqrt = lambda[k].cwiseSqrt().cwiseInverse();
        g[k] = lxm * svd.matrixV() * inv_sqrt.asDiagonal();
        const Matrix lx_inv =
            lx.matrixL().solve(Matrix::Identity(x[k].rows(), x[k].cols()));
        g_inv[k] = lambda[k].cwiseSqrt().asDiagonal() * svd.matrixV().transpose() * lx_inv;
        w[k] = g[k] * g[k].transpose();
      }

      SchurSolver schur;
      if (!schur.factor(scaled_constraints(g))) {
        return give_up(SdpStatus::NumericalTrouble);
      }
      Eigen::LLT<Matrix> border_chol;
      Matrix minv_b;
      if (nf_ > 0) {
        minv_b = schur.solve(free_mat_);
        Matrix border = free_mat_.transpose() * minv_b;
        if (!regularized_llt(border, border_chol)) {
          return give_up(SdpStatus::NumericalTrouble);
        }
      }

      std::vector<Matrix> wrdw(nb_);
      for (int k = 0; k < nb_; ++k) wrdw[k] = w[k] * rd[k] * w[k];
      const Vector a_wrdw = apply_a(wrdw);

      auto direction = [&](const std::vector<Matrix>& h, std::vector<Matrix>& dx,
                           std::vector<Matrix>& dz, Vector& dy, Vector& dxf) {
        const Vector rhs = rp - apply_a(h) + a_wrdw;
        if (nf_ > 0) {
          const Vector minv_rhs = schur.solve(rhs);
          dxf = border_chol.solve(free_mat_.transpose() * minv_rhs - rf);
          dy = minv_rhs - minv_b * dxf;
        } else {
          dxf = Vector::Zero(0);
          dy = schur.solve(rhs);
        }
        auto assemble = [&] {
          dz = apply_at(dy);
          dx.resize(nb_);
          for (int k = 0; k < nb_; ++k) {
            dz[k] = rd[k] - dz[k];
            dx[k] = h[k] - w[k] * dz[k] * w[k];
            dx[k] = 0.5 * (dx[k] + dx[k].transpose());
            dz[k] = 0.5 * (dz[k] + dz[k].transpose());
          }
        };
        assemble();
        if (nf_ > 0) return;
        // Refine dy against the primal equations A(dx) = rp actually met.
        for (int pass = 0; pass < 2; ++pass) {
          const Vector err = rp - apply_a(dx);
          if (err.norm() <= 1e-14 * (1.0 + rp.norm())) break;
          dy += schur.solve(err);
          assemble();
        }
      };

      // Predictor (affine scaling): H = -X.
      std::vector<Matrix> h(nb_);
      for (int k = 0; k < nb_; ++k) h[k] = -x[k];
      std::vector<Matrix> dx, dz;
      Vector dy, dxf;
      direction(h, dx, dz, dy, dxf);
      double ap = 1.0, ad = 1.0;
      for (int k = 0; k < nb_; ++k) {
        ap = std::min(ap, max_step(x[k], dx[k]));
        ad = std::min(ad, max_step(z[k], dz[k]));
      }
      double xz_aff = 0.0;
      for (int k = 0; k < nb_; ++k) {
        xz_aff += (x[k] + ap * dx[k]).cwiseProduct(z[k] + ad * dz[k]).sum();
      }
      const double mu_aff = xz_aff / total_dim_;
      double sigma = mu > 0.0 ? std::pow(std::max(0.0, mu_aff) / mu, 3) : 0.0;
      sigma = std::clamp(sigma, 0.0, 1.0);

      // Corrector: solve V D + D V = 2 sigma mu I - 2 V^2 - (dx_p dz_p + dz_p dx_p)
      // in the scaled space where V = diag(lambda).
      for (int k = 0; k < nb_; ++k) {
        const Matrix sdx = g_inv[k] * dx[k] * g_inv[k].transpose();
        const Matrix sdz = g[k].transpose() * dz[k] * g[k];
        Matrix r = -(sdx * sdz + sdz * sdx);
        const auto n = r.rows();
        for (Eigen::Index i = 0; i < n; ++i) {
          r(i, i) += 2.0 * sigma * mu - 2.0 * lambda[k](i) * lambda[k](i);
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          for (Eigen::Index j = 0; j < n; ++j) r(i, j) /= lambda[k](i) + lambda[k](j);
        }
        r = 0.5 * (r + r.transpose());
        h[k] = g[k] * r * g[k].transpose();
      }
      direction(h, dx, dz, dy, dxf);
      ap = 1.0;
      ad = 1.0;
      for (int k = 0; k < nb_; ++k) {
        ap = std::min(ap, kStepFraction * max_step(x[k], dx[k]));
        ad = std::min(ad, kStepFraction * max_step(z[k], dz[k]));
      }
      if (!std::isfinite(ap) || !std::isfinite(ad) || !dy.allFinite()) {
        return give_up(SdpStatus::NumericalTrouble);
      }
      stalls = (ap < 1e-10 && ad < 1e-10) ? stalls + 1 : 0;
      if (stalls >= 3) {
        return give_up(SdpStatus::NumericalTrouble);
      }
      for (int k = 0; k < nb_; ++k) {
        x[k] += ap * dx[k];
        z[k] += ad * dz[k];
      }
      if (nf_ > 0) xf += ap * dxf;
      y += ad * dy;
    }
  }

 private:
  static constexpr double kStepFraction = 0.98;

  struct BlockRow {
    int constraint;
    std::vector<SymEntry> entries;
  };

  std::vector<Matrix> zeros() const {
    std::vector<Matrix> out;
    out.reserve(nb_);
    for (int s : p_.block_sizes()) out.push_back(Matrix::Zero(s, s));
    return out;
  }

  static double inner(const std::vector<SymEntry>& entries, const Matrix& x) {
    double s = 0.0;
    for (const auto& e : entries) {
      s += (e.row == e.col ? 1.0 : 2.0) * e.value * x(e.row, e.col);
    }
    return s;
  }

  Vector apply_a(const std::vector<Matrix>& x) const {
    Vector out = Vector::Zero(m_);
    for (int k = 0; k < nb_; ++k) {
      for (const auto& row : by_block_[k]) out(row.constraint) += inner(row.entries, x[k]);
    }
    return out;
  }

  std::vector<Matrix> apply_at(const Vector& y) const {
    std::vector<Matrix> out = zeros();
    for (int k = 0; k < nb_; ++k) {
      for (const auto& row : by_block_[k]) {
        const double yi = y(row.constraint);
        for (const auto& e : row.entries) {
          out[k](e.row, e.col) += yi * e.value;
          if (e.row != e.col) out[k](e.col, e.row) += yi * e.value;
        }
      }
    }
    return out;
  }

  // Row i is svec(G^T A_i G) over all blocks, with off-diagonal entries
  // weighted by sqrt(2), so the Schur complement <A_i, W A_j W> equals
  // (S S^T)_ij for this matrix S.
  Matrix scaled_constraints(const std::vector<Matrix>& g) const {
    Eigen::Index cols = 0;
    std::vector<Eigen::Index> offset(nb_);
    for (int k = 0; k < nb_; ++k) {
      offset[k] = cols;
      const auto n = g[k].rows();
      cols += n * (n + 1) / 2;
    }
    Matrix out = Matrix::Zero(m_, cols);
    const double root2 = std::sqrt(2.0);
    for (int k = 0; k < nb_; ++k) {
      const auto n = g[k].rows();
      Matrix scaled(n, n);
      for (const auto& row : by_block_[k]) {
        scaled.setZero();
        for (const auto& e : row.entries) {
          if (e.row == e.col) {
            scaled.noalias() += e.value * g[k].row(e.row).transpose() * g[k].row(e.row);
          } else {
            scaled.noalias() += e.value * g[k].row(e.row).transpose() * g[k].row(e.col);
            scaled.noalias() += e.value * g[k].row(e.col).transpose() * g[k].row(e.row);
          }
        }
        Eigen::Index c = offset[k];
        for (Eigen::Index j = 0; j < n; ++j) {
          for (Eigen::Index i = 0; i <= j; ++i) {
            out(row.constraint, c++) = i == j ? scaled(i, i) : root2 * scaled(i, j);
          }
        }
      }
    }
    return out;
  }

  // Solves (S S^T) v = h through a QR factorization of S^T, which avoids
  // forming the Schur complement explicitly. Falls back to a regularized
  // Cholesky of S S^T when S is numerically rank deficient.
  class SchurSolver {
   public:
    bool factor(Matrix scaled) {
      s_ = std::move(scaled);
      const auto m = s_.rows();
      if (s_.cols() >= m) {
        Eigen::HouseholderQR<Matrix> qr(s_.transpose());
        r_ = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
        const Vector d = r_.diagonal().cwiseAbs();
        if (d.minCoeff() > 1e-13 * std::max(1.0, d.maxCoeff())) {
          use_qr_ = true;
          return true;
        }
      }
      use_qr_ = false;
      return regularized_llt(s_ * s_.transpose(), llt_);
    }

    template <typename Rhs>
    Matrix solve(const Rhs& h) const {
      Matrix v = raw_solve(h);
      // One step of iterative refinement against the unformed product S S^T.
      const Matrix resid = h - s_ * (s_.transpose() * v);
      v += raw_solve(resid);
      return v;
    }

   private:
    template <typename Rhs>
    Matrix raw_solve(const Rhs& h) const {
      if (!use_qr_) return llt_.solve(h);
      const Matrix t = r_.transpose().triangularView<Eigen::Lower>().solve(h);
      return r_.triangularView<Eigen::Upper>().solve(t);
    }

    Matrix s_;
    Matrix r_;
    Eigen::LLT<Matrix> llt_;
    bool use_qr_ = false;
  };

  // Cholesky with escalating diagonal regularization.
  static bool regularized_llt(const Matrix& a, Eigen::LLT<Matrix>& chol) {
    chol.compute(a);
    if (chol.info() == Eigen::Success) return true;
    const double scale = std::max(1.0, a.diagonal().cwiseAbs().maxCoeff());
    for (double reg = 1e-14; reg <= 1e-8; reg *= 100.0) {
      Matrix shifted = a;
      shifted.diagonal().array() += reg * scale;
      chol.compute(shifted);
      if (chol.info() == Eigen::Success) return true;
    }
    return false;
  }

  // Largest alpha with X + alpha dX PSD (infinity when unbounded).
  static double max_step(const Matrix& x, const Matrix& dx) {
    Eigen::LLT<Matrix> llt(x);
    if (llt.info() != Eigen::Success) return 0.0;
    const Matrix half = llt.matrixL().solve(dx);
    Matrix t = llt.matrixL().solve(half.transpose());
    t = 0.5 * (t + t.transpose());
    const double lmin = min_eigenvalue(t);
    return lmin >= 0.0 ? std::numeric_limits<double>::infinity() : -1.0 / lmin;
  }

  // Approximate Farkas certificate for primal infeasibility: b^T y > 0 with
  // -A^T y PSD and B^T y = 0, both up to 1 / infeasibility_threshold after
  // normalizing by b^T y.
  bool farkas_ray(const Vector& y, double dobj) const {
    if (!(dobj > 0.0) || m_ == 0) return false;
    const double tol = 1.0 / s_.infeasibility_threshold;
    const std::vector<Matrix> aty = apply_at(y);
    for (int k = 0; k < nb_; ++k) {
      if (min_eigenvalue(-aty[k] / dobj) < -tol) return false;
    }
    if (nf_ > 0 && (free_mat_.transpose() * y).norm() / dobj > tol) return false;
    return true;
  }

  const SdpProblem& p_;
  const SolverSettings& s_;
  int m_ = 0, nb_ = 0, nf_ = 0, total_dim_ = 0;
  std::vector<std::vector<BlockRow>> by_block_;
  Vector b_;
  Matrix free_mat_;
  Vector c_free_;
  std::vector<Matrix> c_blocks_;
};

}  // namespace detail

/// Solves the standard-form SDP. Deterministic: fixed starting point
/// X = (1 + ||b||_inf) I, Z = (1 + ||C||_inf) I, y = 0, x = 0.
inline SdpSolution solve(const SdpProblem& problem, const SolverSettings& settings = {}) {
  if (!(settings.gap_tolerance > 0) || !(settings.feas_tolerance > 0) ||
      !(settings.infeasibility_threshold > 0) || settings.max_iterations < 1) {
    throw InvalidArgument("solver tolerances must be positive");
  }
  if (problem.num_constraints() == 0) throw InvalidArgument("SDP has no constraints");
  for (int s : problem.block_sizes()) {
    if (s > settings.max_block_size) {
      throw InvalidArgument("block of size " + std::to_string(s) + " exceeds the cap of " +
                            std::to_string(settings.max_block_size));
    }
  }
  SdpSolution sol = detail::InteriorPoint(problem, settings).run();
  if (settings.verbosity >= 1) {
    std::clog << "sdp: " << to_string(sol.status) << " after " << sol.iterations
              << " iterations, pobj " << sol.primal_objective << " dobj " << sol.dual_objective
              << '\n';
  }
  return sol;
}

/// Writes a sparse text dump of the problem:
///
///   blocks <s_1> ... <s_k>
///   free <count>
///   rhs <i> <b_i>                  one per constraint, i = 1..m
///   <i> <block> <row> <col> <value>  one per lower-triangle nonzero; i = 0 is
///                                    the objective, indices are 1-based
///   freecoef <i> <var> <value>     free-variable coefficients
inline void dump_sparse_text(const SdpProblem& problem, std::ostream& out) {
  out << std::setprecision(17);
  out << "blocks";
  for (int s : problem.block_sizes()) out << ' ' << s;
  out << "\nfree " << problem.free_vars() << '\n';
  for (std::size_t i = 0; i < problem.num_constraints(); ++i) {
    out << "rhs " << i + 1 << ' ' << problem.constraints()[i].rhs << '\n';
  }
  auto write_form = [&](std::size_t idx, const LinearForm& f) {
    for (const auto& e : f.entries) {
      out << idx << ' ' << e.block + 1 << ' ' << e.row + 1 << ' ' << e.col + 1 << ' ' << e.value
          << '\n';
    }
    for (const auto& [k, v] : f.free_coeffs) out << "freecoef " << idx << ' ' << k + 1 << ' ' << v << '\n';
  };
  write_form(0, problem.objective());
  for (std::size_t i = 0; i < problem.num_constraints(); ++i) {
    write_form(i + 1, problem.constraints()[i].lhs);
  }
}

}  // namespace sosperturb
