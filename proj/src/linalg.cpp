#include "fxtflow/linalg.hpp"

#include <cmath>

namespace fxt::linalg {

bool is_symmetric(const Matrix& M, double rel_tol) {
  if (M.rows() != M.cols()) return false;
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  return (M - M.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

Vector symmetric_eigenvalues(const Matrix& M) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(M, Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

double smallest_nonzero_eigenvalue(const Matrix& M, double rel_cut) {
  const Vector vals = symmetric_eigenvalues(M);
  const double top = vals.cwiseAbs().maxCoeff();
  if (top == 0.0) return 0.0;
  for (int i = 0; i < vals.size(); ++i) {
    if (vals[i] > rel_cut * top) return vals[i];
  }
  return 0.0;
}

double largest_eigenvalue(const Matrix& M) { return symmetric_eigenvalues(M).maxCoeff(); }

int numerical_rank(const Matrix& M, double rel_cut) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(M);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < s.size(); ++i) r += s[i] > rel_cut * s[0] ? 1 : 0;
  return r;
}

double spectral_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues()[0];
}

Vector least_squares(const Matrix& M, const Vector& rhs) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(M);
  cod.setThreshold(kZeroCutoff);
  return cod.solve(rhs);
}

Matrix null_space_projector(const Matrix& M, double rel_cut) {
  const int n = static_cast<int>(M.cols());
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  int r = 0;
  if (s.size() > 0 && s[0] > 0.0) {
    for (int i = 0; i < s.size(); ++i) r += s[i] > rel_cut * s[0] ? 1 : 0;
  }
  const Matrix Vr = svd.matrixV().leftCols(r);
  return Matrix::Identity(n, n) - Vr * Vr.transpose();
}

}  // namespace fxt::linalg
