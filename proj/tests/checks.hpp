#pragma once

// Property checks shared by the unit tests and the acceptance gate.

#include <algorithm>
#include <cmath>
#include <vector>

#include "cocoscan/classifiers.hpp"
#include "cocoscan/features.hpp"
#include "cocoscan/numerics.hpp"
#include "oracles.hpp"

namespace checks {

using namespace cocoscan;

/// c classes of `per` samples in d dims with random class offsets.
inline SpectralDataset random_classes(oracle::Rng& rng, std::size_t c, std::size_t per, std::size_t d,
                                      double separation = 2.0) {
  Matrix centers = oracle::random_matrix(rng, c, d, -separation, separation);
  Matrix x(c * per, d);
  std::vector<int> y(c * per);
  for (std::size_t i = 0; i < c * per; ++i) {
    y[i] = static_cast<int>(i % c);
    for (std::size_t j = 0; j < d; ++j) x(i, j) = centers(y[i], j) + rng.normal();
  }
  std::vector<double> axis(d);
  for (std::size_t j = 0; j < d; ++j) axis[j] = 1.0 + static_cast<double>(j);
  std::vector<ClassLabel> labels;
  for (std::size_t k = 0; k < c; ++k) labels.push_back({static_cast<int>(k), "k" + std::to_string(k)});
  return SpectralDataset(x, y, WavelengthAxis(axis), labels);
}

struct LdaEquivalence {
  double power_sum_error = 0;    // max_k |tr(W^k) - sum lambda^k| / scale_k
  double eigvec_residual = 0;    // max_i ||W t_i - lambda_i t_i|| / (||W|| ||t_i||)
};

/// Forms W = S_w_reg^-1 S_B explicitly and compares its spectrum with the
/// model's. The model keeps r <= c-1 eigenvalues; the rest of W's spectrum
/// must be zero, which the power sums k = 1..d pin down.
inline LdaEquivalence lda_equivalence(const SpectralDataset& ds, const LdaModel& model) {
  const auto stats = class_statistics(ds);
  const auto sc = scatter_matrices(ds, stats);
  const Matrix sw = ridge_regularize(sc.s_w, model.ridge_eps_rel);
  const Matrix w = spd_solve(sw, sc.s_b);
  const std::size_t d = w.rows();
  LdaEquivalence out;
  Matrix power = Matrix::identity(d);
  double lmax = 0;
  for (double l : model.eigenvalues) lmax = std::max(lmax, std::abs(l));
  for (std::size_t k = 1; k <= d; ++k) {
    power = oracle::naive_mul(power, w);
    double expected = 0;
    for (double l : model.eigenvalues) expected += std::pow(l, static_cast<double>(k));
    const double scale = std::max({std::abs(expected), std::pow(lmax, static_cast<double>(k)), 1e-300});
    out.power_sum_error = std::max(out.power_sum_error, std::abs(power.trace() - expected) / scale);
  }
  const double wn = oracle::frob(w);
  for (std::size_t i = 0; i < model.eigenvalues.size(); ++i) {
    double res = 0, tn = 0;
    for (std::size_t r = 0; r < d; ++r) {
      double wt = 0;
      for (std::size_t c = 0; c < d; ++c) wt += w(r, c) * model.projection(c, i);
      const double diff = wt - model.eigenvalues[i] * model.projection(r, i);
      res += diff * diff;
      tn += model.projection(r, i) * model.projection(r, i);
    }
    out.eigvec_residual = std::max(out.eigvec_residual, std::sqrt(res) / (wn * std::sqrt(tn)));
  }
  return out;
}

/// Dual variables alpha_i (unsigned) for every training row.
inline std::vector<double> full_alphas(const SvmBinaryModel& m, std::size_t n, const std::vector<int>& y) {
  std::vector<double> a(n, 0.0);
  for (std::size_t s = 0; s < m.support_indices.size(); ++s)
    a[m.support_indices[s]] = m.alphas[s] * y[m.support_indices[s]];
  return a;
}

/// Largest KKT violation beyond `tol` (0 when all conditions hold), with the
/// decision values recomputed from the stored model.
inline double kkt_excess(const SvmBinaryModel& m, const Matrix& x, const std::vector<int>& y, double tol) {
  const auto a = full_alphas(m, x.rows(), y);
  double worst = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double yf = y[i] * predict_svm_binary(m, x.row(i));
    double v = 0;
    if (a[i] <= 0.0)
      v = (1 - tol) - yf;
    else if (a[i] >= m.c_param)
      v = yf - (1 + tol);
    else
      v = std::abs(yf - 1) - tol;
    worst = std::max(worst, v);
  }
  return worst;
}

inline double signed_alpha_sum(const SvmBinaryModel& m) {
  double s = 0;
  for (double a : m.alphas) s += a;
  return s;
}

/// Kernel matrix computed without the library's Kernel.
inline Matrix gram(const Matrix& x, bool rbf, double gamma) {
  Matrix g(x.rows(), x.rows());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.rows(); ++j) {
      double dotp = 0, sq = 0;
      for (std::size_t k = 0; k < x.cols(); ++k) {
        dotp += x(i, k) * x(j, k);
        sq += (x(i, k) - x(j, k)) * (x(i, k) - x(j, k));
      }
      g(i, j) = rbf ? std::exp(-gamma * sq) : dotp;
    }
  return g;
}

}  // namespace checks
