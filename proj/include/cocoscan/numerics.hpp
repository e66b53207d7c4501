#pragma once

#include <cstddef>
#include <vector>

#include "cocoscan/error.hpp"
#include "cocoscan/matrix.hpp"

namespace cocoscan {

/// Eigenpairs sorted by descending eigenvalue; column i of `vectors` is the
/// unit eigenvector for `values[i]`, with its first nonzero component positive.
struct EigenDecomposition {
  std::vector<double> values;
  Matrix vectors;
};

/// Cholesky breakdown. `pivot()` is the zero-based index of the first
/// non-positive pivot.
class FactorizationError : public NumericFailure {
 public:
  FactorizationError(std::size_t pivot, const std::string& what)
      : NumericFailure(what), pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

struct JacobiOptions {
  double off_tolerance = 1e-12;  // relative to ||A||_F
  int max_sweeps = 100;
  double symmetry_tolerance = 1e-10;  // relative to ||A||_F
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
EigenDecomposition sym_eig(const Matrix& a, const JacobiOptions& opts = {});

/// Lower-triangular L with L*L^T = a.
Matrix cholesky(const Matrix& a);

/// Solves L*X = B (forward substitution).
Matrix solve_lower(const Matrix& l, const Matrix& b);
/// Solves L^T*X = B (back substitution against the transpose).
Matrix solve_lower_transposed(const Matrix& l, const Matrix& b);

/// X with A*X = B for symmetric positive-definite A, via Cholesky.
Matrix spd_solve(const Matrix& a, const Matrix& b);

/// A + eps*I with eps = eps_rel * trace(A)/dim, or eps_rel when the trace is 0.
Matrix ridge_regularize(const Matrix& a, double eps_rel);

/// Flip each column so that its first nonzero entry is positive.
void normalize_column_signs(Matrix& vectors);

}  // namespace cocoscan
