#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "sosperturb/linalg.hpp"
#include "sosperturb/sdp.hpp"

using namespace sosperturb;

namespace {

// min over x > 0 of x + 1/x, by bisection on the derivative 1 - 1/x^2.
double min_x_plus_inverse() {
  double lo = 1e-3, hi = 1e3;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (1.0 - 1.0 / (mid * mid) > 0.0 ? hi : lo) = mid;
  }
  return lo + 1.0 / lo;
}

LinearForm single(int block, int row, int col, double v) { return {{{block, row, col, v}}, {}}; }

}  // namespace

TEST(Solve, OneByOneEquality) {
  SdpProblem p({1}, 0);
  p.add_constraint(single(0, 0, 0, 1.0), 3.0);
  p.set_objective(single(0, 0, 0, 1.0));
  const SdpSolution s = solve(p);
  ASSERT_EQ(s.status, SdpStatus::Optimal);
  EXPECT_NEAR(s.primal_blocks[0](0, 0), 3.0, 1e-7);
  EXPECT_NEAR(s.primal_objective, 3.0, 1e-7);
}

TEST(Solve, TwoByTwoTraceWithFixedOffDiagonal) {
  const double oracle = min_x_plus_inverse();
  ASSERT_NEAR(oracle, 2.0, 1e-12);
  SdpProblem p({2}, 0);
  // <A, X> = 2 X_12 with the symmetric entry convention, so rhs 2 fixes X_12 = 1.
  p.add_constraint(single(0, 1, 0, 1.0), 2.0);
  p.set_objective({{{0, 0, 0, 1.0}, {0, 1, 1, 1.0}}, {}});
  const SdpSolution s = solve(p);
  ASSERT_EQ(s.status, SdpStatus::Optimal);
  EXPECT_NEAR(s.primal_objective, oracle, 1e-6);
  EXPECT_NEAR(s.dual_objective, oracle, 1e-6);
  const Matrix expected = Matrix::Ones(2, 2);
  EXPECT_LT((s.primal_blocks[0] - expected).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(Solve, InfeasibleNegativeConstant) {
  // X = -1 with X PSD: the SOS feasibility problem of the constant -1.
  SdpProblem p({1}, 0);
  p.add_constraint(single(0, 0, 0, 1.0), -1.0);
  const SdpSolution s = solve(p);
  EXPECT_EQ(s.status, SdpStatus::PrimalLikelyInfeasible);
}

TEST(Solve, FreeVariable) {
  // minimize t  s.t.  X_11 - t = 2,  X_11 + X_22 = 5,  X PSD:  t = -3 at X = diag(0, 5)... with
  // X_11 >= 0 the optimum is X_11 = 0, t = -2.
  SdpProblem p({2}, 1);
  p.add_constraint({{{0, 0, 0, 1.0}}, {{0, -1.0}}}, 2.0);
  p.add_constraint({{{0, 0, 0, 1.0}, {0, 1, 1, 1.0}}, {}}, 5.0);
  p.set_objective({{}, {{0, 1.0}}});
  const SdpSolution s = solve(p);
  ASSERT_EQ(s.status, SdpStatus::Optimal);
  EXPECT_NEAR(s.free_values(0), -2.0, 1e-6);
  EXPECT_NEAR(s.primal_objective, -2.0, 1e-6);
}

TEST(Solve, DuplicateRowsAreMerged) {
  SdpProblem p({2}, 0);
  EXPECT_EQ(p.add_constraint(single(0, 0, 0, 1.0), 1.0), 0);
  EXPECT_EQ(p.add_constraint(single(0, 1, 1, 1.0), 1.0), 1);
  EXPECT_EQ(p.add_constraint(single(0, 0, 0, 1.0), 1.0), 0);
  EXPECT_EQ(p.add_constraint({{{0, 0, 1, 2.0}}, {}}, 0.0), 2);
  EXPECT_EQ(p.add_constraint({{{0, 1, 0, 1.0}, {0, 1, 0, 1.0}}, {}}, 0.0), 2);
  EXPECT_EQ(p.num_constraints(), 3u);
}

TEST(Solve, RejectsBadInput) {
  SdpProblem p({2}, 0);
  EXPECT_THROW(p.add_constraint(single(1, 0, 0, 1.0), 1.0), DimensionMismatch);
  EXPECT_THROW(p.add_constraint(single(0, 2, 0, 1.0), 1.0), DimensionMismatch);
  EXPECT_THROW(solve(p), InvalidArgument);
  p.add_constraint(single(0, 0, 0, 1.0), 1.0);
  SolverSettings bad;
  bad.gap_tolerance = 0.0;
  EXPECT_THROW(solve(p, bad), InvalidArgument);
  SolverSettings small;
  small.max_block_size = 1;
  EXPECT_THROW(solve(p, small), InvalidArgument);
  EXPECT_THROW(SdpProblem({0}, 0), InvalidArgument);
}

TEST(Solve, RandomFeasibleProblemsAreSolved) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<int> sizes{3 + trial % 3, 2};
    const int m = 4 + trial % 5;
    std::vector<Matrix> x0;
    for (int s : sizes) {
      Matrix a = Matrix::NullaryExpr(s, s, [&] { return g(rng); });
      x0.push_back(a * a.transpose() + 0.5 * Matrix::Identity(s, s));
    }
    SdpProblem p(sizes, 0);
    for (int i = 0; i < m; ++i) {
      LinearForm f;
      double rhs = 0.0;
      for (int k = 0; k < static_cast<int>(sizes.size()); ++k) {
        for (int r = 0; r < sizes[k]; ++r) {
          for (int c = 0; c <= r; ++c) {
            const double v = g(rng);
            f.entries.push_back({k, r, c, v});
            rhs += (r == c ? 1.0 : 2.0) * v * x0[k](r, c);
          }
        }
      }
      ASSERT_EQ(p.add_constraint(std::move(f), rhs), i);
    }
    LinearForm obj;
    for (int k = 0; k < static_cast<int>(sizes.size()); ++k) {
      Matrix a = Matrix::NullaryExpr(sizes[k], sizes[k], [&] { return g(rng); });
      const Matrix c = a * a.transpose() + Matrix::Identity(sizes[k], sizes[k]);
      for (int r = 0; r < sizes[k]; ++r) {
        for (int cc = 0; cc <= r; ++cc) obj.entries.push_back({k, r, cc, c(r, cc)});
      }
    }
    p.set_objective(std::move(obj));
    const SdpSolution s = solve(p);
    ASSERT_EQ(s.status, SdpStatus::Optimal) << "trial " << trial;
    EXPECT_LE(s.primal_residual, 1e-8);
    EXPECT_LE(std::abs(s.primal_objective - s.dual_objective),
              1e-6 * (1.0 + std::abs(s.primal_objective)));
    EXPECT_GE(s.primal_objective, s.dual_objective - 1e-7);
    for (const auto& b : s.primal_blocks) EXPECT_GE(min_eigenvalue(b), -1e-8);
  }
}

TEST(Solve, Deterministic) {
  SdpProblem p({2}, 0);
  p.add_constraint(single(0, 1, 0, 1.0), 2.0);
  p.add_constraint(single(0, 0, 0, 1.0), 3.0);
  p.set_objective({{{0, 0, 0, 1.0}, {0, 1, 1, 2.0}}, {}});
  const SdpSolution a = solve(p), b = solve(p);
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.primal_objective, b.primal_objective);
  EXPECT_EQ(a.dual_objective, b.dual_objective);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(DumpSparseText, Format) {
  SdpProblem p({2, 1}, 1);
  p.add_constraint({{{0, 1, 0, 0.5}, {1, 0, 0, 1.0}}, {{0, -1.0}}}, 4.0);
  p.set_objective(single(1, 0, 0, 1.0));
  std::ostringstream out;
  dump_sparse_text(p, out);
  EXPECT_EQ(out.str(),
            "blocks 2 1\nfree 1\nrhs 1 4\n0 2 1 1 1\n1 1 2 1 0.5\n1 2 1 1 1\nfreecoef 1 1 -1\n");
}

TEST(Eigen, Decompositions) {
  const auto id = eigendecompose(Matrix::Identity(3, 3));
  EXPECT_TRUE(id.values.isApprox(Vector::Ones(3)));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = -1.0;
  d(1, 1) = 2.0;
  EXPECT_NEAR(eigendecompose(d).values(0), -1.0, 1e-15);
  EXPECT_NEAR(eigendecompose(d).values(1), 2.0, 1e-15);
  Matrix a(2, 2);
  a << 2, 1, 1, 2;
  // Characteristic polynomial (2 - t)^2 - 1 has roots 1 and 3.
  const auto ed = eigendecompose(a);
  EXPECT_NEAR(ed.values(0), 1.0, 1e-14);
  EXPECT_NEAR(ed.values(1), 3.0, 1e-14);
  const Matrix back = ed.vectors * ed.values.asDiagonal() * ed.vectors.transpose();
  EXPECT_LE((back - a).cwiseAbs().maxCoeff(), 1e-9 * a.cwiseAbs().maxCoeff());
  EXPECT_NEAR(min_eigenvalue(a), 1.0, 1e-14);
}
