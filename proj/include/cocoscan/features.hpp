#pragma once

#include <cstddef>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "cocoscan/dataset.hpp"
#include "cocoscan/matrix.hpp"

namespace cocoscan {

struct ClassStatistics {
  std::vector<double> global_mean;  // mu, length d
  Matrix class_means;               // c x d, row j = mu_j
  std::vector<std::size_t> class_counts;
  std::vector<double> priors;  // n_j / N
};

/// Within-class (prior-weighted class covariances) and between-class scatter.
struct ScatterPair {
  Matrix s_w;
  Matrix s_b;
};

enum class LdaVariant { ClassIndependent, ClassDependent };

std::string_view to_string(LdaVariant v);
LdaVariant parse_lda_variant(std::string_view s);

struct LdaConfig {
  std::size_t components = 0;  // 0 selects c-1
  double ridge_eps_rel = 1e-6;
  LdaVariant variant = LdaVariant::ClassIndependent;
  bool pca_first = false;  // reduce to min(n-c, 40) principal components first

  friend bool operator==(const LdaConfig&, const LdaConfig&) = default;
};

/// Fitted discriminant projection. For the class-dependent variant the
/// projection holds one d x r block per class, side by side, and the
/// eigenvalues follow the same block order.
struct LdaModel {
  ClassStatistics stats;
  Matrix projection;
  std::vector<double> eigenvalues;
  std::size_t components = 0;  // r per block
  LdaVariant variant = LdaVariant::ClassIndependent;
  double ridge_eps_rel = 1e-6;
  bool pca_first = false;

  std::size_t input_dim() const noexcept { return projection.rows(); }
  std::size_t output_dim() const noexcept { return projection.cols(); }
};

struct PcaModel {
  std::vector<double> mean;
  Matrix components;  // d x r, orthonormal columns
  std::vector<double> explained_variance;

  std::size_t input_dim() const noexcept { return components.rows(); }
  std::size_t output_dim() const noexcept { return components.cols(); }
};

ClassStatistics class_statistics(const SpectralDataset& ds);
ScatterPair scatter_matrices(const SpectralDataset& ds, const ClassStatistics& stats);

/// Solves s_b v = lambda s_w v by Cholesky whitening of the ridge-regularized
/// s_w and keeps the leading discriminant directions.
LdaModel fit_lda(const SpectralDataset& ds, const LdaConfig& config = {});
Matrix transform_lda(const LdaModel& model, const Matrix& x);

PcaModel fit_pca(const Matrix& x, std::size_t components);
Matrix transform_pca(const PcaModel& model, const Matrix& x);

/// Columns appended by Gram-Schmidt against the unit basis until `q` has
/// `target` orthonormal columns.
Matrix complete_orthonormal(const Matrix& q, std::size_t target);

void write_model(std::ostream& out, const LdaModel& model);
void write_model(std::ostream& out, const PcaModel& model);
LdaModel read_lda_model(std::istream& in);
PcaModel read_pca_model(std::istream& in);

}  // namespace cocoscan
