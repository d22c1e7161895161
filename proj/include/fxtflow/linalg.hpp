#pragma once

#include "fxtflow/core.hpp"

namespace fxt::linalg {

/// Relative cutoff used for zero eigenvalues and singular values.
inline constexpr double kZeroCutoff = 1e-10;

bool is_symmetric(const Matrix& M, double rel_tol = 1e-10);

/// Ascending eigenvalues of a symmetric matrix.
Vector symmetric_eigenvalues(const Matrix& M);

/// Smallest eigenvalue above kZeroCutoff * largest. Returns 0 for the zero matrix.
double smallest_nonzero_eigenvalue(const Matrix& M, double rel_cut = kZeroCutoff);

double largest_eigenvalue(const Matrix& M);

int numerical_rank(const Matrix& M, double rel_cut = kZeroCutoff);

double spectral_norm(const Matrix& M);

/// Minimum-norm least-squares solution of M x = rhs.
Vector least_squares(const Matrix& M, const Vector& rhs);

/// Orthogonal projector onto null(M), from an SVD with relative cutoff.
Matrix null_space_projector(const Matrix& M, double rel_cut = kZeroCutoff);

}  // namespace fxt::linalg
