#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "cocoscan/matrix.hpp"

namespace cocoscan {

// ---------------------------------------------------------------------------
// k-nearest neighbours

enum class Metric { Euclidean, Manhattan };

std::string_view to_string(Metric m);
Metric parse_metric(std::string_view s);

double distance(Metric m, std::span<const double> a, std::span<const double> b) noexcept;

struct KnnModel {
  Matrix exemplars;
  std::vector<int> labels;
  std::size_t k = 5;
  Metric metric = Metric::Euclidean;
  int num_classes = 0;
};

/// Stores the training data; `num_classes` defaults to max label + 1.
KnnModel fit_knn(const Matrix& x, std::span<const int> y, std::size_t k,
                 Metric metric = Metric::Euclidean, int num_classes = 0);

/// Majority vote among the k nearest exemplars. Equal distances rank the lower
/// exemplar index first; vote ties go to the smaller summed neighbour distance,
/// then to the lower class id.
int predict_knn(const KnnModel& model, std::span<const double> x0);

// ---------------------------------------------------------------------------
// Support vector machines

enum class KernelType { Linear, Rbf };

struct Kernel {
  KernelType type = KernelType::Linear;
  double gamma = 1.0;  // rbf only

  double operator()(std::span<const double> a, std::span<const double> b) const noexcept;
};

struct SvmParams {
  Kernel kernel;
  double c = 1.0;
  double tol = 1e-3;
  int max_passes = 200;
};

struct SvmBinaryModel {
  Matrix support_vectors;
  std::vector<double> alphas;  // y_i * alpha_i
  std::vector<std::size_t> support_indices;  // rows of the training matrix
  double bias = 0.0;
  Kernel kernel;
  double c_param = 1.0;
  bool converged = false;
  int passes = 0;
};

/// SMO on the soft-margin dual with labels in {-1, +1}.
SvmBinaryModel fit_svm_binary(const Matrix& x, std::span<const int> y, const SvmParams& params);

/// Signed decision value sum_i alpha_i K(sv_i, x0) + bias.
double predict_svm_binary(const SvmBinaryModel& model, std::span<const double> x0);

struct SvmPairModel {
  int class_a = 0;  // +1 side
  int class_b = 0;  // -1 side
  SvmBinaryModel machine;
};

struct SvmMulticlassModel {
  int num_classes = 0;
  std::vector<SvmPairModel> pairwise;
};

/// One-vs-one: one binary machine per unordered class pair.
SvmMulticlassModel fit_svm_multiclass(const Matrix& x, std::span<const int> y,
                                      const SvmParams& params, int num_classes = 0);

/// Most pairwise wins. Ties go to the larger sum of |score| over the machines
/// each tied class won, then to the lower class id.
int predict_svm_multiclass(const SvmMulticlassModel& model, std::span<const double> x0);

/// 1 / (p * mean per-feature population variance); 1 for constant data.
double default_rbf_gamma(const Matrix& x);

void write_model(std::ostream& out, const KnnModel& model);
void write_model(std::ostream& out, const SvmMulticlassModel& model);
KnnModel read_knn_model(std::istream& in);
SvmMulticlassModel read_svm_model(std::istream& in);

}  // namespace cocoscan
