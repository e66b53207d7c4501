#include "cocoscan/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace cocoscan {

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw InvalidInput("matrix data length " + std::to_string(data_.size()) +
                       " does not match " + std::to_string(rows_) + "x" +
                       std::to_string(cols_));
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw InvalidInput("ragged matrix initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix Matrix::select_rows(std::span<const std::size_t> idx) const {
  Matrix out(idx.size(), cols_);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    auto src = row(idx[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Matrix Matrix::select_columns(std::span<const std::size_t> idx) const {
  Matrix out(rows_, idx.size());
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t j = 0; j < idx.size(); ++j) out(r, j) = (*this)(r, idx[j]);
  return out;
}

Matrix Matrix::first_columns(std::size_t n) const {
  std::vector<std::size_t> idx(std::min(n, cols_));
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return select_columns(idx);
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

double Matrix::frobenius_norm() const noexcept {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

double Matrix::trace() const {
  if (!square()) throw InvalidInput("trace of non-square matrix");
  double s = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) s += (*this)(i, i);
  return s;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw InvalidInput("matrix product dimension mismatch: " +
                       std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                       " * " + std::to_string(b.rows()) + "x" +
                       std::to_string(b.cols()));
  }
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto brow = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aik * brow[j];
    }
  }
  return c;
}

Matrix transpose_times(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw InvalidInput("a^T*b row mismatch");
  Matrix c(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    auto arow = a.row(k);
    auto brow = b.row(k);
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = arow[i];
      if (aki == 0.0) continue;
      auto out = c.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) out[j] += aki * brow[j];
    }
  }
  return c;
}

namespace {
template <class Op>
Matrix elementwise(const Matrix& a, const Matrix& b, Op op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidInput("elementwise dimension mismatch");
  Matrix c(a.rows(), a.cols());
  auto x = a.data();
  auto y = b.data();
  auto z = c.data();
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = op(x[i], y[i]);
  return c;
}
}  // namespace

Matrix operator+(const Matrix& a, const Matrix& b) {
  return elementwise(a, b, std::plus<>{});
}
Matrix operator-(const Matrix& a, const Matrix& b) {
  return elementwise(a, b, std::minus<>{});
}
Matrix operator*(double s, const Matrix& a) {
  Matrix c = a;
  for (double& v : c.data()) v *= s;
  return c;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// ---------------------------------------------------------------------------
// Symmetric eigendecomposition

void normalize_column_signs(Matrix& vectors) {
  for (std::size_t c = 0; c < vectors.cols(); ++c) {
    double maxabs = 0.0;
    for (std::size_t r = 0; r < vectors.rows(); ++r)
      maxabs = std::max(maxabs, std::abs(vectors(r, c)));
    if (maxabs == 0.0) continue;
    const double threshold = 1e-8 * maxabs;
    for (std::size_t r = 0; r < vectors.rows(); ++r) {
      const double v = vectors(r, c);
      if (std::abs(v) <= threshold) continue;
      if (v < 0.0)
        for (std::size_t k = 0; k < vectors.rows(); ++k) vectors(k, c) = -vectors(k, c);
      break;
    }
  }
}

EigenDecomposition sym_eig(const Matrix& input, const JacobiOptions& opts) {
  if (!input.square()) {
    throw InvalidInput("sym_eig: matrix is " + std::to_string(input.rows()) +
                       "x" + std::to_string(input.cols()) + ", not square");
  }
  if (!input.all_finite()) throw InvalidInput("sym_eig: non-finite entry");
  const std::size_t n = input.rows();
  const double norm = input.frobenius_norm();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(input(i, j) - input(j, i)) > opts.symmetry_tolerance * norm)
        throw InvalidInput("sym_eig: matrix not symmetric at (" +
                           std::to_string(i) + "," + std::to_string(j) + ")");

  // Work on the symmetrized copy; vt holds eigenvectors as rows.
  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a(i, j) = 0.5 * (input(i, j) + input(j, i));
  Matrix vt = Matrix::identity(n);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  bool converged = false;
  for (int sweep = 0; sweep <= opts.max_sweeps; ++sweep) {
    if (off_norm() <= opts.off_tolerance * norm) {
      converged = true;
      break;
    }
    if (sweep == opts.max_sweeps) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        if (theta < 0.0) t = -t;
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        auto rowp = a.row(p);
        auto rowq = a.row(q);
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double g = rowp[r];
          const double h = rowq[r];
          rowp[r] = g - s * (h + g * tau);
          rowq[r] = h + s * (g - h * tau);
          a(r, p) = rowp[r];
          a(r, q) = rowq[r];
        }
        auto vp = vt.row(p);
        auto vq = vt.row(q);
        for (std::size_t r = 0; r < n; ++r) {
          const double g = vp[r];
          const double h = vq[r];
          vp[r] = g - s * (h + g * tau);
          vq[r] = h + s * (g - h * tau);
        }
      }
    }
  }
  if (!converged) {
    throw NumericFailure("sym_eig: Jacobi did not converge in " +
                         std::to_string(opts.max_sweeps) + " sweeps");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i) > a(j, j);
  });

  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = Matrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    auto v = vt.row(order[k]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v[r];
  }
  normalize_column_signs(out.vectors);
  return out;
}

// ---------------------------------------------------------------------------
// Cholesky and triangular solves

Matrix cholesky(const Matrix& a) {
  if (!a.square()) throw InvalidInput("cholesky: matrix not square");
  const std::size_t n = a.rows();
  Matrix l(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    auto li = l.row(i);
    for (std::size_t j = 0; j <= i; ++j) {
      auto lj = l.row(j);
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= li[k] * lj[k];
      if (i == j) {
        if (!(s > 0.0) || !std::isfinite(s)) {
          throw FactorizationError(
              i, "cholesky: matrix not positive definite (pivot " +
                     std::to_string(i) + " = " + std::to_string(s) + ")");
        }
        li[i] = std::sqrt(s);
      } else {
        li[j] = s / lj[j];
      }
    }
  }
  return l;
}

Matrix solve_lower(const Matrix& l, const Matrix& b) {
  if (!l.square() || l.rows() != b.rows())
    throw InvalidInput("solve_lower: dimension mismatch");
  const std::size_t n = l.rows();
  Matrix x = b;
  for (std::size_t i = 0; i < n; ++i) {
    auto xi = x.row(i);
    for (std::size_t k = 0; k < i; ++k) {
      const double lik = l(i, k);
      if (lik == 0.0) continue;
      auto xk = x.row(k);
      for (std::size_t j = 0; j < xi.size(); ++j) xi[j] -= lik * xk[j];
    }
    const double d = l(i, i);
    for (double& v : xi) v /= d;
  }
  return x;
}

Matrix solve_lower_transposed(const Matrix& l, const Matrix& b) {
  if (!l.square() || l.rows() != b.rows())
    throw InvalidInput("solve_lower_transposed: dimension mismatch");
  const std::size_t n = l.rows();
  Matrix x = b;
  for (std::size_t ii = n; ii-- > 0;) {
    auto xi = x.row(ii);
    for (std::size_t k = ii + 1; k < n; ++k) {
      const double lki = l(k, ii);
      if (lki == 0.0) continue;
      auto xk = x.row(k);
      for (std::size_t j = 0; j < xi.size(); ++j) xi[j] -= lki * xk[j];
    }
    const double d = l(ii, ii);
    for (double& v : xi) v /= d;
  }
  return x;
}

Matrix spd_solve(const Matrix& a, const Matrix& b) {
  if (!a.square()) throw InvalidInput("spd_solve: matrix not square");
  if (b.rows() != a.rows()) {
    throw InvalidInput("spd_solve: right-hand side has " +
                       std::to_string(b.rows()) + " rows, expected " +
                       std::to_string(a.rows()));
  }
  const Matrix l = cholesky(a);
  return solve_lower_transposed(l, solve_lower(l, b));
}

Matrix ridge_regularize(const Matrix& a, double eps_rel) {
  if (!a.square()) throw InvalidInput("ridge_regularize: matrix not square");
  if (!(eps_rel > 0.0)) throw InvalidInput("ridge_regularize: eps_rel must be > 0");
  const std::size_t n = a.rows();
  const double tr = a.trace();
  const double eps = tr == 0.0 ? eps_rel : eps_rel * tr / static_cast<double>(n);
  Matrix out = a;
  for (std::size_t i = 0; i < n; ++i) out(i, i) += eps;
  return out;
}

}  // namespace cocoscan
