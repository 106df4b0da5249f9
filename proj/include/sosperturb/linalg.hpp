#pragma once

#include <Eigen/Dense>

#include "sosperturb/errors.hpp"

namespace sosperturb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Eigendecomposition {
  Vector values;   // ascending
  Matrix vectors;  // orthonormal columns, vectors.col(i) pairs with values(i)
};

inline Eigendecomposition eigendecompose(const Matrix& a) {
  if (a.rows() != a.cols()) throw InvalidArgument("eigendecompose: matrix not square");
  if (a.size() == 0) return {Vector(0), Matrix(0, 0)};
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) {
    throw ConvergenceFailure("symmetric eigensolver did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

inline double min_eigenvalue(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw ConvergenceFailure("symmetric eigensolver did not converge");
  }
  return es.eigenvalues()(0);
}

inline double max_abs_entry(const Matrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

}  // namespace sosperturb
